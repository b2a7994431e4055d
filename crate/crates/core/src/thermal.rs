//! Thermal (Gibbs) states of harmonic systems as covariance matrices.
//!
//! For a kinetic-plus-potential Hamiltonian the thermal covariance matrix
//! splits into position and momentum blocks
//!
//! ```text
//! gamma_x = (hbar / 2m) V^{-1/2} coth(beta hbar V^{1/2} / 2)
//! gamma_p = (m hbar / 2) V^{+1/2} coth(beta hbar V^{1/2} / 2)
//! ```
//!
//! evaluated through one eigendecomposition of `V`. In the normal-mode basis
//! the same state is a direct sum of 2x2 blocks, one per frequency; with the
//! per-mode length scale chosen to balance the two quadratures each block
//! collapses to `s * I_2` with `s = coth(beta hbar omega / 2) / 2 >= 1/2`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::gaussian::{BasisOrdering, CovarianceMatrix};
use crate::hamiltonians::{FrequencySpectrum, PotentialMatrix};

/// Eigenvalues of `V` at or below this are treated as zero modes, for which
/// no Gibbs state exists.
pub const ZERO_MODE_THRESHOLD: f64 = 1e-10;

/// Physical constants threaded through thermal-state construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub hbar: f64,
    pub k_b: f64,
}

impl Default for Constants {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            k_b: 1.0,
        }
    }
}

/// An inverse temperature together with the unit system.
///
/// `beta` may be `+inf`, which selects the ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPoint {
    pub beta: f64,
    pub constants: Constants,
}

impl ThermalPoint {
    pub fn new(beta: f64) -> Result<Self> {
        Self::with_constants(beta, Constants::default())
    }

    /// The zero-temperature point (`beta = +inf`) with default constants.
    pub fn ground() -> Self {
        Self {
            beta: f64::INFINITY,
            constants: Constants::default(),
        }
    }

    pub fn with_constants(beta: f64, constants: Constants) -> Result<Self> {
        if beta.is_nan() || beta <= 0.0 {
            return Err(Error::OutOfDomain {
                name: "beta",
                value: beta,
                domain: "(0, inf]",
            });
        }
        for (name, value) in [("hbar", constants.hbar), ("k_B", constants.k_b)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::OutOfDomain {
                    name,
                    value,
                    domain: "(0, inf)",
                });
            }
        }
        Ok(Self { beta, constants })
    }

    /// `T = 1 / (k_B beta)`; zero for the ground state.
    pub fn temperature(&self) -> f64 {
        if self.beta.is_infinite() {
            0.0
        } else {
            1.0 / (self.constants.k_b * self.beta)
        }
    }
}

/// Hyperbolic cotangent for nonnegative arguments.
///
/// Evaluated as `1 + 2 / (e^{2x} - 1)`, with the truncated Laurent series
/// `1/x + x/3` below `1e-4` where the exponential form loses digits.
/// Saturates to exactly 1 once `e^{2x}` overflows; `coth(0+) = +inf`.
pub fn coth(x: f64) -> f64 {
    debug_assert!(x >= 0.0, "coth argument must be nonnegative, got {x}");
    if x < 1e-4 {
        1.0 / x + x / 3.0
    } else {
        1.0 + 2.0 / f64::exp_m1(2.0 * x)
    }
}

/// One normal mode of a thermal state.
///
/// The covariance block is diagonal: `diag(x_variance, p_variance)`. With
/// `unit_free` set, both variances equal `coth(beta hbar omega / 2) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeBlock {
    pub omega: f64,
    pub mass: f64,
    pub unit_free: bool,
    pub x_variance: f64,
    pub p_variance: f64,
}

impl ModeBlock {
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::dvector![self.x_variance, self.p_variance])
    }

    /// `sqrt(x_variance * p_variance)`, the block's symplectic eigenvalue.
    pub fn symplectic_eigenvalue(&self) -> f64 {
        (self.x_variance * self.p_variance).sqrt()
    }
}

/// Thermal block of a single mode with unit mass.
pub fn mode_block(omega: f64, t: &ThermalPoint, unit_free: bool) -> Result<ModeBlock> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(Error::OutOfDomain {
            name: "omega",
            value: omega,
            domain: "(0, inf)",
        });
    }
    let hbar = t.constants.hbar;
    let c = coth(0.5 * t.beta * hbar * omega);
    let (x_variance, p_variance) = if unit_free {
        (0.5 * c, 0.5 * c)
    } else {
        (0.5 * hbar * c / omega, 0.5 * hbar * omega * c)
    };
    Ok(ModeBlock {
        omega,
        mass: 1.0,
        unit_free,
        x_variance,
        p_variance,
    })
}

/// Site-basis covariance matrix of the Gibbs state of a kinetic-plus-
/// potential Hamiltonian, in `Xxpp` ordering.
///
/// Rejects potentials with a zero mode: a free direction has no normalizable
/// thermal state.
pub fn thermal_cm(p: &PotentialMatrix, t: &ThermalPoint) -> Result<CovarianceMatrix> {
    let n = p.n_sites();
    let sym = 0.5 * (p.matrix().clone() + p.matrix().transpose());
    let eigen = sym.symmetric_eigen();
    let min_eig = eigen.eigenvalues.min();
    if min_eig <= ZERO_MODE_THRESHOLD {
        return Err(Error::ZeroMode {
            min_eigenvalue: min_eig,
            threshold: ZERO_MODE_THRESHOLD,
        });
    }
    let hbar = t.constants.hbar;
    let mass = p.mass();
    let mut fx = eigen.eigenvalues.clone();
    let mut fp = eigen.eigenvalues.clone();
    for (x, p_) in fx.iter_mut().zip(fp.iter_mut()) {
        let omega = x.sqrt();
        let c = coth(0.5 * t.beta * hbar * omega);
        *x = 0.5 * hbar / mass * c / omega;
        *p_ = 0.5 * hbar * mass * c * omega;
    }
    let q = &eigen.eigenvectors;
    let gamma_x = q * DMatrix::from_diagonal(&fx) * q.transpose();
    let gamma_p = q * DMatrix::from_diagonal(&fp) * q.transpose();
    let mut entries = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = gamma_x[(i, j)];
            entries[(n + i, n + j)] = gamma_p[(i, j)];
        }
    }
    CovarianceMatrix::new(entries, BasisOrdering::Xxpp)
}

/// The same thermal state in its normal-mode basis: a diagonal matrix built
/// from one [`ModeBlock`] per frequency (ascending), `Xxpp` ordering, unit
/// mass convention for the dimensionful variant.
pub fn normal_mode_cm(
    spectrum: &FrequencySpectrum,
    t: &ThermalPoint,
    unit_free: bool,
) -> Result<CovarianceMatrix> {
    let n = spectrum.len();
    let mut entries = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for (j, &omega) in spectrum.frequencies().iter().enumerate() {
        if omega <= 0.0 {
            return Err(Error::ZeroMode {
                min_eigenvalue: omega,
                threshold: 0.0,
            });
        }
        let block = mode_block(omega, t, unit_free)?;
        entries[(j, j)] = block.x_variance;
        entries[(n + j, n + j)] = block.p_variance;
    }
    CovarianceMatrix::new(entries, BasisOrdering::Xxpp)
}

/// Covariance matrix of the harmonic-oscillator ground state at frequency
/// `omega0`: `diag(hbar / 2 m omega0, m hbar omega0 / 2)`.
///
/// These are the blocks of the product comparator used by the separability
/// witness search.
pub fn eta_block(omega0: f64, mass: f64, hbar: f64) -> Result<CovarianceMatrix> {
    for (name, value) in [("omega0", omega0), ("mass", mass), ("hbar", hbar)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::OutOfDomain {
                name,
                value,
                domain: "(0, inf)",
            });
        }
    }
    let entries = DMatrix::from_diagonal(&nalgebra::dvector![
        0.5 * hbar / (mass * omega0),
        0.5 * hbar * mass * omega0
    ]);
    CovarianceMatrix::new(entries, BasisOrdering::XpInterleaved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::symplectic_eigenvalues;
    use crate::hamiltonians::{ring_dispersion, ring_potential, RingParams};
    use approx::assert_relative_eq;

    #[test]
    fn coth_series_and_exponential_branches_agree() {
        // values straddling the 1e-4 switch point
        for x in [0.9e-4, 1.0e-4, 1.1e-4, 0.01, 1.0, 20.0] {
            let reference = 1.0 / f64::tanh(x);
            assert_relative_eq!(coth(x), reference, max_relative = 1e-13);
        }
        assert_eq!(coth(400.0), 1.0);
        assert_eq!(coth(f64::INFINITY), 1.0);
    }

    #[test]
    fn thermal_point_validation() {
        assert!(ThermalPoint::new(1.0).is_ok());
        assert!(ThermalPoint::new(f64::INFINITY).is_ok());
        assert!(ThermalPoint::new(0.0).is_err());
        assert!(ThermalPoint::new(-2.0).is_err());
        assert!(ThermalPoint::new(f64::NAN).is_err());
        assert!(ThermalPoint::with_constants(
            1.0,
            Constants {
                hbar: 0.0,
                k_b: 1.0
            }
        )
        .is_err());
    }

    #[test]
    fn single_site_thermal_block() {
        let omega = 1.3f64;
        let beta = 0.7f64;
        let p = PotentialMatrix::new(DMatrix::from_element(1, 1, omega * omega), 1.0).unwrap();
        let g = thermal_cm(&p, &ThermalPoint::new(beta).unwrap()).unwrap();
        let c = coth(0.5 * beta * omega);
        assert_relative_eq!(g.entries()[(0, 0)], 0.5 * c / omega, max_relative = 1e-13);
        assert_relative_eq!(g.entries()[(1, 1)], 0.5 * c * omega, max_relative = 1e-13);
        assert_relative_eq!(g.entries()[(0, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ground_state_saturates_uncertainty() {
        let p = ring_potential(&RingParams::new(3, 1.0, 1.0).unwrap());
        let t = ThermalPoint::new(1e3).unwrap();
        let g = thermal_cm(&p, &t).unwrap();
        for nu in symplectic_eigenvalues(&g) {
            assert_relative_eq!(nu, 0.5, max_relative = 1e-6);
        }
        let t_inf = ThermalPoint::new(f64::INFINITY).unwrap();
        let g0 = thermal_cm(&p, &t_inf).unwrap();
        for nu in symplectic_eigenvalues(&g0) {
            assert_relative_eq!(nu, 0.5, max_relative = 1e-12);
        }
    }

    #[test]
    fn ring_symplectic_spectrum_matches_scalar_formula() {
        // two routes: assembled 6x6 matrix vs coth of the dispersion
        let params = RingParams::new(3, 1.0, 1.0).unwrap();
        let beta = 1.0;
        let g = thermal_cm(&ring_potential(&params), &ThermalPoint::new(beta).unwrap()).unwrap();
        let nu = symplectic_eigenvalues(&g);
        let mut expected: Vec<f64> = ring_dispersion(&params)
            .frequencies()
            .iter()
            .map(|&w| 0.5 * coth(0.5 * beta * w))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in nu.iter().zip(expected.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn gapless_ring_has_no_thermal_state() {
        let p = ring_potential(&RingParams::new(4, 1.0, 0.0).unwrap());
        assert!(matches!(
            thermal_cm(&p, &ThermalPoint::new(1.0).unwrap()),
            Err(Error::ZeroMode { .. })
        ));
    }

    #[test]
    fn mass_and_hbar_scale_out_of_symplectic_spectrum() {
        let params = RingParams::with_mass(4, 1.2, 0.8, 3.5).unwrap();
        let t = ThermalPoint::with_constants(
            0.9,
            Constants {
                hbar: 2.0,
                k_b: 1.0,
            },
        )
        .unwrap();
        let g = thermal_cm(&ring_potential(&params), &t).unwrap();
        let nu = symplectic_eigenvalues(&g);
        let mut expected: Vec<f64> = ring_dispersion(&params)
            .frequencies()
            .iter()
            .map(|&w| 0.5 * t.constants.hbar * coth(0.5 * t.beta * t.constants.hbar * w))
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in nu.iter().zip(expected.iter()) {
            assert_relative_eq!(a, b, max_relative = 1e-9);
        }
    }

    #[test]
    fn normal_mode_blocks_are_unit_free_scalars() {
        let spectrum = FrequencySpectrum::new(vec![0.5, 2.0]).unwrap();
        let t = ThermalPoint::new(2.0).unwrap();
        let g = normal_mode_cm(&spectrum, &t, true).unwrap();
        for (j, &w) in spectrum.frequencies().iter().enumerate() {
            let s = 0.5 * coth(0.5 * t.beta * w);
            assert!(s >= 0.5);
            assert_relative_eq!(g.entries()[(j, j)], s, max_relative = 1e-13);
            assert_relative_eq!(g.entries()[(2 + j, 2 + j)], s, max_relative = 1e-13);
        }
    }

    #[test]
    fn high_temperature_blocks_diverge_as_inverse_beta() {
        let omega = 1.7f64;
        let beta = 1e-6f64;
        let block = mode_block(omega, &ThermalPoint::new(beta).unwrap(), true).unwrap();
        let leading = 1.0 / (beta * omega);
        assert_relative_eq!(
            block.x_variance,
            leading,
            max_relative = 1e-10 + beta * omega * omega / 6.0
        );
    }

    #[test]
    fn normal_mode_cm_rejects_zero_frequency() {
        let spectrum = FrequencySpectrum::new(vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            normal_mode_cm(&spectrum, &ThermalPoint::new(1.0).unwrap(), true),
            Err(Error::ZeroMode { .. })
        ));
    }

    #[test]
    fn eta_block_is_a_pure_minimal_state() {
        let eta = eta_block(1.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(eta.entries()[(0, 0)], 0.5);
        assert_relative_eq!(eta.entries()[(1, 1)], 0.5);
        let nu = symplectic_eigenvalues(&eta);
        assert_relative_eq!(nu[0], 0.5, max_relative = 1e-13);

        let eta2 = eta_block(2.0, 0.5, 1.0).unwrap();
        let det = eta2.entries()[(0, 0)] * eta2.entries()[(1, 1)];
        assert_relative_eq!(det, 0.25, max_relative = 1e-13);
    }

    #[test]
    fn eta_blocks_never_dominate_each_other() {
        // different frequencies trade position against momentum spread
        let a = eta_block(0.5, 1.0, 1.0).unwrap();
        let b = eta_block(2.0, 1.0, 1.0).unwrap();
        let diff = a.entries() - b.entries();
        let margin = crate::gaussian::psd_margin(&diff).unwrap();
        assert!(margin < 0.0);
        let margin_rev = crate::gaussian::psd_margin(&(-diff)).unwrap();
        assert!(margin_rev < 0.0);
    }

    #[test]
    fn thermal_cm_is_physical() {
        let params = RingParams::new(5, 1.0, 0.3).unwrap();
        for beta in [0.05, 1.0, 40.0] {
            let t = ThermalPoint::new(beta).unwrap();
            let g = thermal_cm(&ring_potential(&params), &t).unwrap();
            assert!(g.uncertainty_margin(1.0) >= -1e-10);
        }
    }
}
