//! Harmonic Hamiltonians: potential matrices, translation-invariant rings,
//! and the frequency spectra they generate.
//!
//! The systems handled here have kinetic plus potential form
//! `H = sum_j p_j^2 / 2m + (m/2) sum_jk V_jk x_j x_k` with a symmetric
//! positive semi-definite coupling matrix `V`. Normal-mode frequencies are
//! the square roots of the eigenvalues of `V`, independent of the mass.
//!
//! A general quadratic Hamiltonian `H = R C R^T` (with `R` the canonical
//! coordinate row vector) is covered by [`spectrum_from_quadratic`], which
//! reads the frequencies off the symplectic eigenvalues of `C`.

use nalgebra::DMatrix;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gaussian::{self, BasisOrdering};

/// Absolute tolerance on `|V_ij - V_(i+1)(j+1)|` for shift invariance.
pub const SHIFT_INVARIANCE_TOL: f64 = 1e-10;

/// Coupling matrix of a kinetic-plus-potential Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialMatrix {
    mass: f64,
    v: DMatrix<f64>,
}

impl PotentialMatrix {
    /// Requires a square symmetric `v` and a positive finite mass. Positive
    /// semi-definiteness is checked where it matters, by the spectral
    /// routines, so that the error can name the offending eigenvalue.
    pub fn new(v: DMatrix<f64>, mass: f64) -> Result<Self> {
        if v.nrows() != v.ncols() {
            return Err(Error::NotSquare {
                rows: v.nrows(),
                cols: v.ncols(),
            });
        }
        if v.is_empty() {
            return Err(Error::InvalidSystem("potential matrix is empty".into()));
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::OutOfDomain {
                name: "mass",
                value: mass,
                domain: "(0, inf)",
            });
        }
        let asym = (0..v.nrows())
            .flat_map(|i| (0..v.ncols()).map(move |j| (i, j)))
            .fold(0.0f64, |a, (i, j)| a.max((v[(i, j)] - v[(j, i)]).abs()));
        let scale = v.iter().fold(0.0f64, |a, &x| a.max(x.abs())).max(1e-300);
        if asym > gaussian::SYMMETRY_RTOL * scale {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
                tolerance: gaussian::SYMMETRY_RTOL * scale,
            });
        }
        Ok(Self { mass, v })
    }

    pub fn n_sites(&self) -> usize {
        self.v.nrows()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }
}

/// Parameters of a nearest-neighbour harmonic ring.
///
/// Site `j` couples to `j +- 1 (mod n)` with strength `omega` and sits in an
/// on-site trap `delta`; both enter the potential quadratically, so the
/// dispersion relation is `omega_j = 2 omega sqrt(sin^2(pi j / n) +
/// (delta / 2 omega)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams {
    n: usize,
    omega: f64,
    delta: f64,
    mass: f64,
}

impl RingParams {
    /// `omega = 0` is allowed and degenerates to `n` decoupled traps.
    pub fn new(n: usize, omega: f64, delta: f64) -> Result<Self> {
        Self::with_mass(n, omega, delta, 1.0)
    }

    pub fn with_mass(n: usize, omega: f64, delta: f64, mass: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSystem("ring needs at least one site".into()));
        }
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(Error::OutOfDomain {
                name: "omega",
                value: omega,
                domain: "[0, inf)",
            });
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::OutOfDomain {
                name: "delta",
                value: delta,
                domain: "[0, inf)",
            });
        }
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::OutOfDomain {
                name: "mass",
                value: mass,
                domain: "(0, inf)",
            });
        }
        Ok(Self {
            n,
            omega,
            delta,
            mass,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }
}

/// Coefficient matrix of a general quadratic Hamiltonian `H = R C R^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticCoefficients {
    matrix: DMatrix<f64>,
    ordering: BasisOrdering,
}

impl QuadraticCoefficients {
    pub fn new(matrix: DMatrix<f64>, ordering: BasisOrdering) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let dim = matrix.nrows();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::OddDimension { dim });
        }
        let asym = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .fold(0.0f64, |a, (i, j)| {
                a.max((matrix[(i, j)] - matrix[(j, i)]).abs())
            });
        let scale = matrix
            .iter()
            .fold(0.0f64, |a, &x| a.max(x.abs()))
            .max(1e-300);
        if asym > gaussian::SYMMETRY_RTOL * scale {
            return Err(Error::NotSymmetric {
                max_asymmetry: asym,
                tolerance: gaussian::SYMMETRY_RTOL * scale,
            });
        }
        Ok(Self { matrix, ordering })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn ordering(&self) -> BasisOrdering {
        self.ordering
    }
}

/// Normal-mode frequencies, stored ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySpectrum {
    frequencies: Vec<f64>,
}

impl FrequencySpectrum {
    /// Sorts the input; every frequency must be finite and nonnegative.
    pub fn new(mut frequencies: Vec<f64>) -> Result<Self> {
        if frequencies.is_empty() {
            return Err(Error::EmptySpectrum);
        }
        for &f in &frequencies {
            if !(f.is_finite() && f >= 0.0) {
                return Err(Error::InvalidFrequency { value: f });
            }
        }
        frequencies.sort_by(f64::total_cmp);
        Ok(Self { frequencies })
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn omega_min(&self) -> f64 {
        self.frequencies[0]
    }

    pub fn omega_max(&self) -> f64 {
        *self.frequencies.last().expect("spectrum is nonempty")
    }

    /// Spread `omega_max / omega_min`; infinite when a zero mode is present.
    pub fn ratio(&self) -> f64 {
        if self.omega_min() == 0.0 {
            f64::INFINITY
        } else {
            self.omega_max() / self.omega_min()
        }
    }
}

/// Builds the circulant potential of a nearest-neighbour ring.
///
/// Diagonal `delta^2 + 2 omega^2`, off-diagonal `-omega^2` between
/// neighbours, accumulated modulo `n` so that `n = 1` collapses to the bare
/// trap and `n = 2` picks up the doubled coupling.
pub fn ring_potential(p: &RingParams) -> PotentialMatrix {
    let n = p.n;
    let w2 = p.omega * p.omega;
    let d2 = p.delta * p.delta;
    let mut v = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        v[(j, j)] += d2;
        let k = (j + 1) % n;
        v[(j, j)] += w2;
        v[(k, k)] += w2;
        v[(j, k)] -= w2;
        v[(k, j)] -= w2;
    }
    PotentialMatrix::new(v, p.mass).expect("ring potential is symmetric by construction")
}

/// Exact dispersion relation of the ring, ascending.
///
/// `j = 0` gives `delta` exactly; frequencies for `j` and `n - j` are
/// assigned from one evaluation so degenerate pairs match bit for bit.
pub fn ring_dispersion(p: &RingParams) -> FrequencySpectrum {
    let n = p.n;
    let mut freqs = vec![0.0f64; n];
    if p.omega == 0.0 {
        freqs.fill(p.delta);
    } else {
        let half_ratio = p.delta / (2.0 * p.omega);
        let offset = half_ratio * half_ratio;
        freqs[0] = p.delta;
        for j in 1..=n / 2 {
            let s = (std::f64::consts::PI * j as f64 / n as f64).sin();
            let w = 2.0 * p.omega * (s * s + offset).sqrt();
            freqs[j] = w;
            freqs[n - j] = w;
        }
    }
    FrequencySpectrum::new(freqs).expect("dispersion frequencies are finite and nonnegative")
}

/// Frequencies from a potential matrix: square roots of its eigenvalues.
///
/// Eigenvalues within `1e-12` (relative to the spectral radius) below zero
/// are clamped; anything lower is rejected.
pub fn spectrum_from_potential(p: &PotentialMatrix) -> Result<FrequencySpectrum> {
    let sym = 0.5 * (p.v.clone() + p.v.transpose());
    let eigen = sym.symmetric_eigen();
    let radius = eigen
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    let threshold = -1e-12 * radius.max(1.0);
    let mut freqs = Vec::with_capacity(eigen.eigenvalues.len());
    for &lambda in eigen.eigenvalues.iter() {
        if lambda < threshold {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: lambda,
            });
        }
        freqs.push(lambda.max(0.0).sqrt());
    }
    FrequencySpectrum::new(freqs)
}

/// Frequencies of a general quadratic Hamiltonian: twice the symplectic
/// eigenvalues of its coefficient matrix. `C` must be positive definite.
pub fn spectrum_from_quadratic(c: &QuadraticCoefficients) -> Result<FrequencySpectrum> {
    let sym = 0.5 * (c.matrix.clone() + c.matrix.transpose());
    let min_eig = sym.clone().symmetric_eigen().eigenvalues.min();
    if min_eig <= 0.0 {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min_eig,
        });
    }
    let freqs: Vec<f64> = gaussian::symplectic_moduli(&sym, c.ordering)
        .into_iter()
        .map(|d| 2.0 * d)
        .collect();
    FrequencySpectrum::new(freqs)
}

/// Whether `V` commutes with the cyclic shift of sites, i.e. is circulant.
pub fn is_shift_invariant(p: &PotentialMatrix) -> bool {
    let n = p.n_sites();
    let v = &p.v;
    for i in 0..n {
        for j in 0..n {
            let shifted = v[((i + 1) % n, (j + 1) % n)];
            if (v[(i, j)] - shifted).abs() > SHIFT_INVARIANCE_TOL {
                return false;
            }
        }
    }
    true
}

/// On-disk description of a system, as a single JSON object with exactly one
/// of the keys `ring`, `potential`, or `spectrum`:
///
/// ```json
/// {"ring": {"n": 8, "omega": 1.0, "delta": 0.25, "mass": 1.0}}
/// {"potential": {"mass": 1.0, "v": [[2.0, -1.0], [-1.0, 2.0]]}}
/// {"spectrum": {"frequencies": [1.0, 2.0, 2.0]}}
/// ```
///
/// `mass` defaults to 1 and `delta` to 0 when omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SystemDescriptor {
    Ring(RingDescriptor),
    Potential(PotentialDescriptor),
    Spectrum(SpectrumDescriptor),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDescriptor {
    pub n: usize,
    pub omega: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default = "default_mass")]
    pub mass: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialDescriptor {
    #[serde(default = "default_mass")]
    pub mass: f64,
    pub v: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumDescriptor {
    pub frequencies: Vec<f64>,
}

fn default_mass() -> f64 {
    1.0
}

/// A descriptor turned into working objects.
///
/// `potential` is `None` for bare-spectrum input; `shift_invariant` is
/// `None` when there is no potential to test.
#[derive(Debug, Clone)]
pub struct ResolvedSystem {
    pub spectrum: FrequencySpectrum,
    pub potential: Option<PotentialMatrix>,
    pub shift_invariant: Option<bool>,
}

impl SystemDescriptor {
    pub fn from_json_str(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Validates parameters and produces the spectrum (and potential where
    /// one is defined). Ring spectra use the analytic dispersion relation.
    pub fn resolve(&self) -> Result<ResolvedSystem> {
        match self {
            SystemDescriptor::Ring(r) => {
                let params = RingParams::with_mass(r.n, r.omega, r.delta, r.mass)?;
                Ok(ResolvedSystem {
                    spectrum: ring_dispersion(&params),
                    potential: Some(ring_potential(&params)),
                    shift_invariant: Some(true),
                })
            }
            SystemDescriptor::Potential(p) => {
                let n = p.v.len();
                if n == 0 {
                    return Err(Error::InvalidSystem("potential matrix is empty".into()));
                }
                for row in &p.v {
                    if row.len() != n {
                        return Err(Error::InvalidSystem(format!(
                            "potential row has {} entries, expected {}",
                            row.len(),
                            n
                        )));
                    }
                }
                let flat: Vec<f64> = p.v.iter().flatten().copied().collect();
                let v = DMatrix::from_row_slice(n, n, &flat);
                let potential = PotentialMatrix::new(v, p.mass)?;
                let spectrum = spectrum_from_potential(&potential)?;
                let shift_invariant = is_shift_invariant(&potential);
                Ok(ResolvedSystem {
                    spectrum,
                    potential: Some(potential),
                    shift_invariant: Some(shift_invariant),
                })
            }
            SystemDescriptor::Spectrum(s) => Ok(ResolvedSystem {
                spectrum: FrequencySpectrum::new(s.frequencies.clone())?,
                potential: None,
                shift_invariant: None,
            }),
        }
    }
}
