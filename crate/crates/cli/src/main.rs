//! Command line front end for the thermal separability library.
//!
//! Exit codes: 0 on success, 2 for malformed input or out-of-range
//! parameters, 3 for structurally invalid Hamiltonians or for requests the
//! system cannot answer (such as deciding separability from a bare
//! spectrum), 4 when a demanded symmetry certificate is refused.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{BetaRange, CmdError, Ctx, RingSweep};
use thermosep::thermal::Constants;

#[derive(Parser)]
#[command(
    name = "thermosep",
    version,
    about = "Separability thresholds of thermal oscillator states"
)]
struct Cli {
    /// Reduced Planck constant used throughout
    #[arg(long, global = true, default_value_t = 1.0)]
    hbar: f64,

    /// Boltzmann constant converting inverse temperatures
    #[arg(long = "kB", global = true, default_value_t = 1.0)]
    k_b: f64,

    /// Worker threads for sweeps; 0 keeps the library default. Output is
    /// identical for any value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Stamp the CSV comment line with the current unix time. Off by
    /// default so reruns are byte-identical.
    #[arg(long, global = true)]
    timestamp: bool,

    /// Write to this file instead of standard output
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normal mode frequencies of a system, as CSV
    Spectrum {
        /// JSON system descriptor (ring, potential, or spectrum)
        #[arg(long)]
        system: String,
    },
    /// Critical temperature of a system, as JSON
    Tcrit {
        /// JSON system descriptor (ring, potential, or spectrum)
        #[arg(long)]
        system: String,
        /// Demand an exact threshold backed by a site-transitive symmetry;
        /// refused (exit 4) if the potential lacks it. On a bare spectrum
        /// this flag is the caller's own assertion.
        #[arg(long)]
        exact_symmetric: bool,
    },
    /// Dimensionless separability boundary across all spectral spreads,
    /// as CSV over the inverse spread
    PhaseDiagram {
        /// Number of inverse-spread samples in (0, 1]
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// Critical temperature sweep over the pinning-to-coupling ratio of a
    /// harmonic ring, as CSV
    Ring {
        /// Number of ring sites
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Smallest delta/omega in the sweep
        #[arg(long, default_value_t = 0.01)]
        min_ratio: f64,
        /// Largest delta/omega in the sweep
        #[arg(long, default_value_t = 100.0)]
        max_ratio: f64,
        /// Number of logarithmically spaced sweep points
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
    /// p-measure and entanglement bound of the thermal state, as CSV
    Pmeasure {
        /// JSON system descriptor (ring, potential, or spectrum)
        #[arg(long)]
        system: String,
        /// Single inverse temperature
        #[arg(long, conflicts_with = "beta_sweep")]
        beta: Option<f64>,
        /// Logarithmic sweep LO:HI:COUNT of inverse temperatures
        #[arg(long)]
        beta_sweep: Option<String>,
    },
    /// Decide separability of the thermal state at one temperature, as JSON
    CheckSep {
        /// JSON system descriptor; must carry a site basis (ring or
        /// potential)
        #[arg(long)]
        system: String,
        /// Inverse temperature of the state
        #[arg(long)]
        beta: f64,
        /// Demand an exact verdict backed by a site-transitive symmetry;
        /// refused (exit 4) if the potential lacks it
        #[arg(long)]
        exact_symmetric: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    for (name, value) in [("--hbar", cli.hbar), ("--kB", cli.k_b)] {
        if !(value.is_finite() && value > 0.0) {
            eprintln!("error: {name} must be a positive finite number, got {value}");
            return ExitCode::from(2);
        }
    }

    let ctx = Ctx {
        constants: Constants {
            hbar: cli.hbar,
            k_b: cli.k_b,
        },
        args_echo: std::env::args().skip(1).collect::<Vec<_>>().join(" "),
        timestamp: cli.timestamp.then(|| {
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        }),
    };

    let run = || -> Result<String, CmdError> {
        match &cli.command {
            Command::Spectrum { system } => commands::run_spectrum(&ctx, system),
            Command::Tcrit {
                system,
                exact_symmetric,
            } => commands::run_tcrit(&ctx, system, *exact_symmetric),
            Command::PhaseDiagram { points } => commands::run_phase_diagram(&ctx, *points),
            Command::Ring {
                n,
                min_ratio,
                max_ratio,
                points,
            } => commands::run_ring(
                &ctx,
                &RingSweep {
                    n: *n,
                    min_ratio: *min_ratio,
                    max_ratio: *max_ratio,
                    points: *points,
                },
            ),
            Command::Pmeasure {
                system,
                beta,
                beta_sweep,
            } => {
                let range = match (beta, beta_sweep) {
                    (Some(b), None) => BetaRange::Single(*b),
                    (None, Some(text)) => commands::parse_beta_sweep(text)?,
                    (None, None) => {
                        return Err(CmdError {
                            code: 2,
                            message: "pass either --beta or --beta-sweep".into(),
                        })
                    }
                    (Some(_), Some(_)) => unreachable!("clap rejects conflicting flags"),
                };
                commands::run_pmeasure(&ctx, system, &range)
            }
            Command::CheckSep {
                system,
                beta,
                exact_symmetric,
            } => commands::run_check_sep(&ctx, system, *beta, *exact_symmetric),
        }
    };

    let result = if cli.jobs > 0 {
        match rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build()
        {
            Ok(pool) => pool.install(run),
            Err(e) => {
                eprintln!("error: cannot start {} worker threads: {e}", cli.jobs);
                return ExitCode::from(2);
            }
        }
    } else {
        run()
    };

    match result {
        Ok(text) => {
            if let Some(path) = &cli.output {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::FAILURE;
                }
            } else {
                print!("{text}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
