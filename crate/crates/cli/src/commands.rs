//! The work behind each subcommand: load a system, run the core routines,
//! render text. Everything returns `Result<String, CmdError>` so `main`
//! owns process exit codes in one place.

use rayon::prelude::*;
use serde::Serialize;

use thermosep::hamiltonians::{ring_dispersion, ResolvedSystem, RingParams, SystemDescriptor};
use thermosep::measures::{eof_lower_bound, p_measure};
use thermosep::separability::{
    check_full_separability, critical_beta, critical_sigma, CriticalMethod, CriticalResult,
    SeparabilityVerdict,
};
use thermosep::thermal::{thermal_cm, Constants, ThermalPoint};

use crate::output::{fmt_g, ser_extended, Table};

/// A subcommand failure carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CmdError {
    pub code: u8,
    pub message: String,
}

impl CmdError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CmdError {
            code,
            message: message.into(),
        }
    }
}

impl From<thermosep::Error> for CmdError {
    fn from(e: thermosep::Error) -> Self {
        use thermosep::Error::*;
        let code = match e {
            // malformed input text or out-of-range request parameters
            Parse(_) | OutOfDomain { .. } | InvalidFrequency { .. } => 2,
            // structurally broken Hamiltonians and states
            NotSquare { .. }
            | OddDimension { .. }
            | NotSymmetric { .. }
            | NotPositiveSemiDefinite { .. }
            | NotPositiveDefinite { .. }
            | ZeroMode { .. }
            | SingularSpectrum { .. }
            | DimensionMismatch { .. }
            | OrderingMismatch { .. }
            | EmptySpectrum
            | InvalidSystem(_) => 3,
        };
        CmdError::new(code, e.to_string())
    }
}

/// Shared context assembled in `main` from global flags.
pub struct Ctx {
    pub constants: Constants,
    pub args_echo: String,
    pub timestamp: Option<u64>,
}

fn load_system(path: &str) -> Result<(SystemDescriptor, ResolvedSystem), CmdError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::new(2, format!("cannot read {path}: {e}")))?;
    let descriptor = SystemDescriptor::from_json_str(&text)?;
    let resolved = descriptor.resolve()?;
    Ok((descriptor, resolved))
}

fn descriptor_kind(d: &SystemDescriptor) -> &'static str {
    match d {
        SystemDescriptor::Ring(_) => "ring",
        SystemDescriptor::Potential(_) => "potential",
        SystemDescriptor::Spectrum(_) => "spectrum",
    }
}

/// Resolves the exactness of a threshold statement. Detected symmetry
/// makes it exact on its own; the flag demands a certificate and fails
/// loudly (exit 4) when the potential cannot back it; a bare spectrum has
/// nothing to check, so there the flag is the caller's own assertion.
fn exactness(resolved: &ResolvedSystem, flag: bool) -> Result<bool, CmdError> {
    match resolved.shift_invariant {
        Some(true) => Ok(true),
        Some(false) => {
            if flag {
                Err(CmdError::new(
                    4,
                    "symmetry certificate refused: the potential is not shift invariant",
                ))
            } else {
                Ok(false)
            }
        }
        None => Ok(flag),
    }
}

#[derive(Serialize)]
struct SystemEcho {
    kind: &'static str,
    n_modes: usize,
    omega_min: f64,
    omega_max: f64,
    #[serde(serialize_with = "ser_extended")]
    ratio: f64,
}

fn system_echo(d: &SystemDescriptor, r: &ResolvedSystem) -> SystemEcho {
    SystemEcho {
        kind: descriptor_kind(d),
        n_modes: r.spectrum.len(),
        omega_min: r.spectrum.omega_min(),
        omega_max: r.spectrum.omega_max(),
        ratio: r.spectrum.ratio(),
    }
}

// ---- spectrum --------------------------------------------------------------

pub fn run_spectrum(ctx: &Ctx, system: &str) -> Result<String, CmdError> {
    let (_, resolved) = load_system(system)?;
    let s = &resolved.spectrum;
    let mut table = Table::new(
        &ctx.args_echo,
        ctx.timestamp,
        vec!["j", "omega_j", "omega_min", "omega_max", "r"],
    );
    for (j, &w) in s.frequencies().iter().enumerate() {
        table.push(vec![
            j.to_string(),
            fmt_g(w),
            fmt_g(s.omega_min()),
            fmt_g(s.omega_max()),
            fmt_g(s.ratio()),
        ]);
    }
    Ok(table.render())
}

// ---- tcrit -----------------------------------------------------------------

#[derive(Serialize)]
struct TcritRecord {
    tool_version: &'static str,
    input: SystemEcho,
    #[serde(serialize_with = "ser_extended")]
    beta_crit: f64,
    t_crit: f64,
    #[serde(serialize_with = "ser_extended")]
    sigma_r: f64,
    t_star: f64,
    omega0_star: f64,
    exact: bool,
    method: CriticalMethod,
}

fn tcrit_record(
    ctx: &Ctx,
    descriptor: &SystemDescriptor,
    resolved: &ResolvedSystem,
    crit: &CriticalResult,
) -> TcritRecord {
    TcritRecord {
        tool_version: env!("CARGO_PKG_VERSION"),
        input: system_echo(descriptor, resolved),
        beta_crit: crit.beta_crit,
        t_crit: if crit.beta_crit.is_infinite() {
            0.0
        } else {
            1.0 / (ctx.constants.k_b * crit.beta_crit)
        },
        sigma_r: crit.sigma_r,
        t_star: crit.t_star,
        omega0_star: crit.omega0_star,
        exact: crit.exact,
        method: crit.method,
    }
}

pub fn run_tcrit(ctx: &Ctx, system: &str, exact_flag: bool) -> Result<String, CmdError> {
    let (descriptor, resolved) = load_system(system)?;
    let exact = exactness(&resolved, exact_flag)?;
    let crit = critical_beta(&resolved.spectrum, exact, &ctx.constants)?;
    let record = tcrit_record(ctx, &descriptor, &resolved, &crit);
    Ok(render_json(&record))
}

// ---- phase-diagram ---------------------------------------------------------

pub fn run_phase_diagram(ctx: &Ctx, points: usize) -> Result<String, CmdError> {
    if points < 2 {
        return Err(CmdError::new(
            2,
            format!("need at least 2 points, got {points}"),
        ));
    }
    let rows: Vec<(f64, f64)> = (1..=points)
        .into_par_iter()
        .map(|k| {
            let inv_r = k as f64 / points as f64;
            let sigma = critical_sigma(1.0 / inv_r)
                .expect("inverse spread in (0, 1] is always a valid ratio")
                .value;
            (inv_r, sigma)
        })
        .collect();
    let mut table = Table::new(
        &ctx.args_echo,
        ctx.timestamp,
        vec!["inv_r", "sigma_r", "t_over_boundary"],
    );
    for (inv_r, sigma) in rows {
        // the boundary temperature in units of hbar omega_max / k_B; zero
        // for the degenerate endpoint where sigma diverges
        let t_over = if sigma.is_infinite() {
            0.0
        } else {
            1.0 / sigma
        };
        table.push(vec![fmt_g(inv_r), fmt_g(sigma), fmt_g(t_over)]);
    }
    Ok(table.render())
}

// ---- ring ------------------------------------------------------------------

pub struct RingSweep {
    pub n: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub points: usize,
}

pub fn run_ring(ctx: &Ctx, sweep: &RingSweep) -> Result<String, CmdError> {
    if sweep.points < 2 {
        return Err(CmdError::new(
            2,
            format!("need at least 2 points, got {}", sweep.points),
        ));
    }
    if !(sweep.min_ratio > 0.0 && sweep.max_ratio > sweep.min_ratio) {
        return Err(CmdError::new(
            2,
            format!(
                "ratio range [{}, {}] must be positive and increasing",
                sweep.min_ratio, sweep.max_ratio
            ),
        ));
    }
    let hbar = ctx.constants.hbar;
    let k_b = ctx.constants.k_b;
    let rows: Vec<Result<(f64, f64, f64, f64), CmdError>> = (0..sweep.points)
        .into_par_iter()
        .map(|k| {
            let f = k as f64 / (sweep.points - 1) as f64;
            let x = sweep.min_ratio * (sweep.max_ratio / sweep.min_ratio).powf(f);
            let params = RingParams::new(sweep.n, 1.0, x)?;
            let spectrum = ring_dispersion(&params);
            let crit = critical_beta(&spectrum, true, &ctx.constants)?;
            // k_B T_crit / (hbar omega), with the coupling frequency 1
            let kt_over = 1.0 / (crit.beta_crit * hbar * k_b);
            Ok((x, spectrum.ratio(), crit.sigma_r, kt_over))
        })
        .collect();
    let mut table = Table::new(
        &ctx.args_echo,
        ctx.timestamp,
        vec![
            "delta_over_omega",
            "r",
            "sigma_r",
            "kt_crit_over_homega",
            "kt_nn_over_homega",
            "kt_blocks_over_homega",
        ],
    );
    // reference temperatures: nearest-neighbour entanglement survives to
    // hbar omega / 2 k_B, twenty-site blocks to about 2.8 hbar omega
    // / (sqrt(20) k_B)
    let nn = fmt_g(0.5);
    let blocks = fmt_g(2.8 / 20f64.sqrt());
    for row in rows {
        let (x, r, sigma, kt_over) = row?;
        table.push(vec![
            fmt_g(x),
            fmt_g(r),
            fmt_g(sigma),
            fmt_g(kt_over),
            nn.clone(),
            blocks.clone(),
        ]);
    }
    Ok(table.render())
}

// ---- pmeasure --------------------------------------------------------------

pub enum BetaRange {
    Single(f64),
    Sweep { lo: f64, hi: f64, count: usize },
}

pub fn parse_beta_sweep(text: &str) -> Result<BetaRange, CmdError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CmdError::new(
            2,
            format!("beta sweep must be LO:HI:COUNT, got \"{text}\""),
        ));
    }
    let lo: f64 = parts[0]
        .parse()
        .map_err(|_| CmdError::new(2, format!("bad sweep start \"{}\"", parts[0])))?;
    let hi: f64 = parts[1]
        .parse()
        .map_err(|_| CmdError::new(2, format!("bad sweep end \"{}\"", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CmdError::new(2, format!("bad sweep count \"{}\"", parts[2])))?;
    if !(lo > 0.0 && hi > lo) || count < 2 {
        return Err(CmdError::new(
            2,
            format!("sweep needs 0 < LO < HI and COUNT >= 2, got \"{text}\""),
        ));
    }
    Ok(BetaRange::Sweep { lo, hi, count })
}

pub fn run_pmeasure(ctx: &Ctx, system: &str, range: &BetaRange) -> Result<String, CmdError> {
    let (_, resolved) = load_system(system)?;
    let spectrum = resolved.spectrum;
    let betas: Vec<f64> = match *range {
        BetaRange::Single(beta) => vec![beta],
        BetaRange::Sweep { lo, hi, count } => (0..count)
            .map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64))
            .collect(),
    };
    let rows: Vec<Result<Vec<String>, CmdError>> = betas
        .into_par_iter()
        .map(|beta| {
            let t = ThermalPoint::with_constants(beta, ctx.constants)?;
            let m = p_measure(&spectrum, &t)?;
            let eof = eof_lower_bound(m.p)?;
            Ok(vec![
                fmt_g(beta),
                fmt_g(m.p),
                fmt_g(m.neg_log_p),
                fmt_g(m.omega0_star),
                fmt_g(eof),
            ])
        })
        .collect();
    let mut table = Table::new(
        &ctx.args_echo,
        ctx.timestamp,
        vec!["beta", "p", "neg_log_p", "omega0_star", "eof_lower_bound"],
    );
    for row in rows {
        table.push(row?);
    }
    Ok(table.render())
}

// ---- check-sep -------------------------------------------------------------

#[derive(Serialize)]
struct CheckSepRecord {
    tool_version: &'static str,
    input: SystemEcho,
    beta: f64,
    hbar: f64,
    k_b: f64,
    exact: bool,
    verdict: SeparabilityVerdict,
    #[serde(serialize_with = "ser_extended")]
    beta_crit: f64,
    #[serde(serialize_with = "ser_extended")]
    sigma_r: f64,
}

pub fn run_check_sep(
    ctx: &Ctx,
    system: &str,
    beta: f64,
    exact_flag: bool,
) -> Result<String, CmdError> {
    let (descriptor, resolved) = load_system(system)?;
    let Some(potential) = resolved.potential.as_ref() else {
        return Err(CmdError::new(
            3,
            "a bare spectrum fixes no site basis, so there is no state to check; \
             provide a ring or potential system",
        ));
    };
    let exact = exactness(&resolved, exact_flag)?;
    let t = ThermalPoint::with_constants(beta, ctx.constants)?;
    let gamma = thermal_cm(potential, &t)?;
    let verdict = check_full_separability(&gamma, &resolved.spectrum, &t, potential.mass(), exact)?;
    let crit = critical_beta(&resolved.spectrum, exact, &ctx.constants)?;
    let record = CheckSepRecord {
        tool_version: env!("CARGO_PKG_VERSION"),
        input: system_echo(&descriptor, &resolved),
        beta,
        hbar: ctx.constants.hbar,
        k_b: ctx.constants.k_b,
        exact,
        verdict,
        beta_crit: crit.beta_crit,
        sigma_r: crit.sigma_r,
    };
    Ok(render_json(&record))
}

fn render_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("records serialize infallibly");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_sweep_parsing() {
        assert!(matches!(
            parse_beta_sweep("0.5:10:20"),
            Ok(BetaRange::Sweep { count: 20, .. })
        ));
        for bad in [
            "1:2", "0:2:5", "2:1:5", "a:2:5", "1:2:1", "1:2:x", "1:2:3:4",
        ] {
            let e = parse_beta_sweep(bad).err().expect(bad);
            assert_eq!(e.code, 2, "input {bad}");
        }
    }

    #[test]
    fn core_errors_map_to_exit_codes() {
        let parse: CmdError = thermosep::Error::Parse("bad json".into()).into();
        assert_eq!(parse.code, 2);
        let domain: CmdError = thermosep::Error::OutOfDomain {
            name: "beta",
            value: -1.0,
            domain: "(0, inf]",
        }
        .into();
        assert_eq!(domain.code, 2);
        let matrix: CmdError = thermosep::Error::NotPositiveSemiDefinite {
            min_eigenvalue: -0.5,
        }
        .into();
        assert_eq!(matrix.code, 3);
        let zero: CmdError = thermosep::Error::ZeroMode {
            min_eigenvalue: 0.0,
            threshold: 1e-10,
        }
        .into();
        assert_eq!(zero.code, 3);
    }
}
