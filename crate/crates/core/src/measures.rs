//! Quantifying how far a thermal state sits from the separable region.
//!
//! The headline quantity is the p-measure: the largest `p` in `(0, 1]` such
//! that the thermal covariance matrix dominates `p` times a product
//! comparator, maximized over the comparator frequency. It is 1 exactly in
//! the separable regime and decays once the threshold temperature is
//! crossed. Through the two-mode squeezed pair with `p = exp(-tau)` the
//! value converts into an entanglement-of-formation lower bound, measured
//! in ebits.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{BasisOrdering, CovarianceMatrix};
use crate::hamiltonians::FrequencySpectrum;
use crate::thermal::{coth, ThermalPoint};

/// Reported `p` values are clamped here to keep them strictly positive in
/// serialized output; the exact magnitude survives in `neg_log_p`.
pub const P_FLOOR: f64 = 1e-300;

/// The p-measure of a thermal spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PMeasureResult {
    /// Largest comparator fraction dominated by the state, in `(0, 1]`.
    pub p: f64,
    /// `-ln p`, exact even when `p` itself underflows.
    pub neg_log_p: f64,
    /// Comparator frequency attaining the maximum.
    pub omega0_star: f64,
    /// Set when `p` was clamped to [`P_FLOOR`].
    pub underflow: bool,
}

/// Computes the p-measure of the Gibbs state with the given normal-mode
/// spectrum.
///
/// Mode `j` admits the fraction `min((omega0/omega_j) c_j, (omega_j/omega0) c_j, 1)`
/// with `c_j = coth(beta hbar omega_j / 2)`; the measure maximizes the worst
/// mode over `omega0`. In logarithms the qualifying band of every mode is an
/// interval, so the optimum has the closed form
/// `ln p = min(0, (A - B) / 2)` with `A = min_j ln(omega_j c_j)` and
/// `B = max_j ln(omega_j / c_j)`, attained at `omega0 = exp((A + B)/2)`.
pub fn p_measure(spectrum: &FrequencySpectrum, t: &ThermalPoint) -> Result<PMeasureResult> {
    if spectrum.omega_min() <= 0.0 {
        return Err(Error::OutOfDomain {
            name: "omega_min",
            value: spectrum.omega_min(),
            domain: "(0, inf)",
        });
    }
    let hbar = t.constants.hbar;
    let mut a = f64::INFINITY;
    let mut b = f64::NEG_INFINITY;
    for &omega in spectrum.frequencies() {
        let c = coth(0.5 * t.beta * hbar * omega);
        a = a.min((omega * c).ln());
        b = b.max((omega / c).ln());
    }
    let neg_log_p = f64::max(0.0, 0.5 * (b - a));
    let underflow = neg_log_p > -P_FLOOR.ln();
    Ok(PMeasureResult {
        p: if underflow {
            P_FLOOR
        } else {
            (-neg_log_p).exp()
        },
        neg_log_p,
        omega0_star: (0.5 * (a + b)).exp(),
        underflow,
    })
}

/// A two-mode squeezed pair with squeeze parameter `tau >= 0`, in the
/// convention where the vacuum covariance matrix is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedPair {
    tau: f64,
}

impl SqueezedPair {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::OutOfDomain {
                name: "tau",
                value: tau,
                domain: "[0, inf)",
            });
        }
        Ok(Self { tau })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Covariance matrix in interleaved ordering `(x1, p1, x2, p2)`:
    /// `cosh tau` on the diagonal, `+sinh tau` between positions and
    /// `-sinh tau` between momenta. Both symplectic eigenvalues equal 1
    /// (a pure state; compare uncertainty with `hbar = 2` here).
    pub fn cm(&self) -> CovarianceMatrix {
        let ch = self.tau.cosh();
        let sh = self.tau.sinh();
        let mut m = nalgebra::DMatrix::<f64>::zeros(4, 4);
        for i in 0..4 {
            m[(i, i)] = ch;
        }
        m[(0, 2)] = sh;
        m[(2, 0)] = sh;
        m[(1, 3)] = -sh;
        m[(3, 1)] = -sh;
        CovarianceMatrix::from_symmetric_unchecked(m, BasisOrdering::XpInterleaved)
    }

    /// Largest `p` with `cm() >= p * identity`, namely `exp(-tau)`: the
    /// squeezed pair realizes the p-measure value `p` at `tau = -ln p`.
    pub fn bipartite_p(&self) -> f64 {
        (-self.tau).exp()
    }
}

/// Entropy of entanglement of a squeezed pair, in ebits:
/// `cosh^2(tau) log2 cosh^2(tau) - sinh^2(tau) log2 sinh^2(tau)`.
///
/// The difference of the two entropy terms is taken as
/// `s^2 ln(1 + 1/s^2)` via `ln_1p`, which stays accurate from the vacuum
/// up to large squeezing; beyond `tau = 19` the asymptote
/// `(2 tau + 1)/ln 2 - 2` is exact to machine precision and avoids the
/// eventual `sinh` overflow.
pub fn hyperbolic_entropy(tau: f64) -> Result<f64> {
    if tau.is_nan() || tau < 0.0 || tau.is_infinite() {
        return Err(Error::OutOfDomain {
            name: "tau",
            value: tau,
            domain: "[0, inf)",
        });
    }
    if tau == 0.0 {
        return Ok(0.0);
    }
    if tau >= 19.0 {
        return Ok((2.0 * tau + 1.0) / std::f64::consts::LN_2 - 2.0);
    }
    let s2 = tau.sinh().powi(2);
    Ok((s2 * (1.0 / s2).ln_1p() + s2.ln_1p()) / std::f64::consts::LN_2)
}

/// Correction term translating `-log2 p` into the entanglement bound:
/// `delta(p) = hyperbolic_entropy(-ln p) + 2 log2 p`.
///
/// Zero at `p = 1`, decreasing to `1/ln 2 - 2` (about -0.5573) as `p -> 0`.
pub fn delta_correction(p: f64) -> Result<f64> {
    check_fraction(p)?;
    let tau = -p.ln();
    if tau >= 19.0 {
        // the 2 log2 p term cancels the leading asymptote symbolically,
        // sidestepping a large-minus-large rounding step
        return Ok(1.0 / std::f64::consts::LN_2 - 2.0);
    }
    Ok(hyperbolic_entropy(tau)? + 2.0 * p.log2())
}

/// Entanglement of formation certified by a p-measure value, in ebits:
/// the entropy of a squeezed pair at `tau = -ln p`. Zero exactly at
/// `p = 1`.
pub fn eof_lower_bound(p: f64) -> Result<f64> {
    check_fraction(p)?;
    hyperbolic_entropy(-p.ln())
}

fn check_fraction(p: f64) -> Result<()> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::OutOfDomain {
            name: "p",
            value: p,
            domain: "(0, 1]",
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{psd_margin, symplectic_eigenvalues};
    use crate::separability::critical_beta;
    use crate::thermal::Constants;
    use approx::assert_relative_eq;

    fn spectrum(freqs: &[f64]) -> FrequencySpectrum {
        FrequencySpectrum::new(freqs.to_vec()).unwrap()
    }

    #[test]
    fn p_measure_two_mode_reference_point() {
        let t = ThermalPoint::new(4.0).unwrap();
        let r = p_measure(&spectrum(&[1.0, 2.0]), &t).unwrap();
        assert_relative_eq!(r.p, 0.7204203338742722, max_relative = 1e-12);
        assert_relative_eq!(r.neg_log_p, 0.32792044026763817, max_relative = 1e-12);
        assert_relative_eq!(r.omega0_star, 1.4398742955367225, max_relative = 1e-12);
        assert!(!r.underflow);
    }

    #[test]
    fn p_measure_saturates_below_threshold() {
        let c = Constants::default();
        let s = spectrum(&[1.0, 1.4, 2.0]);
        let crit = critical_beta(&s, false, &c).unwrap();
        for factor in [0.25, 0.5, 0.9, 0.99] {
            let t = ThermalPoint::new(factor * crit.beta_crit).unwrap();
            let r = p_measure(&s, &t).unwrap();
            assert_eq!(r.p, 1.0, "p must saturate at beta factor {factor}");
            assert_eq!(r.neg_log_p, 0.0);
        }
        let t = ThermalPoint::new(1.001 * crit.beta_crit).unwrap();
        let r = p_measure(&s, &t).unwrap();
        assert!(r.p < 1.0);
        assert!(r.neg_log_p > 0.0);
    }

    #[test]
    fn p_measure_optimum_stays_in_band() {
        // the optimizing frequency lies inside the spectral range and at
        // zero temperature reaches the geometric mean
        let s = spectrum(&[1.0, 3.0]);
        for beta in [0.05, 1.0, 50.0] {
            let t = ThermalPoint::new(beta).unwrap();
            let r = p_measure(&s, &t).unwrap();
            assert!(r.omega0_star >= 1.0 - 1e-12 && r.omega0_star <= 3.0 + 1e-12);
        }
        let cold = p_measure(&s, &ThermalPoint::ground()).unwrap();
        assert_relative_eq!(cold.omega0_star, 3f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(cold.p, (1.0f64 / 3.0).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn p_measure_monotone_in_beta() {
        let s = spectrum(&[1.0, 2.5, 4.0]);
        let mut prev = f64::INFINITY;
        for k in 0..40 {
            let beta = 0.4 * 1.25f64.powi(k);
            let t = ThermalPoint::new(beta).unwrap();
            let r = p_measure(&s, &t).unwrap();
            assert!(r.p <= prev + 1e-15, "p may not grow with beta");
            prev = r.p;
        }
    }

    #[test]
    fn p_measure_underflow_is_flagged() {
        // an extreme spread at zero temperature pushes p below the floor:
        // neg_log_p = ln(1e305 / 1e-305) / 2 = 305 ln 10
        let s = spectrum(&[1e-305, 1e305]);
        let r = p_measure(&s, &ThermalPoint::ground()).unwrap();
        assert!(r.underflow);
        assert_eq!(r.p, P_FLOOR);
        assert_relative_eq!(
            r.neg_log_p,
            305.0 * std::f64::consts::LN_10,
            max_relative = 1e-10
        );
    }

    #[test]
    fn p_measure_rejects_zero_modes() {
        let t = ThermalPoint::new(1.0).unwrap();
        assert!(matches!(
            p_measure(&spectrum(&[0.0, 1.0]), &t),
            Err(Error::OutOfDomain {
                name: "omega_min",
                ..
            })
        ));
    }

    #[test]
    fn squeezed_pair_is_pure_and_dominates_its_fraction() {
        for &tau in &[0.0, 0.3, 1.0, 4.0, 12.0] {
            let pair = SqueezedPair::new(tau).unwrap();
            let cm = pair.cm();
            // the eigenproblem behind the symplectic spectrum works on
            // entries of size cosh(tau); its roundoff grows with them
            let scale = tau.cosh().max(1.0);
            for nu in symplectic_eigenvalues(&cm) {
                assert_relative_eq!(nu, 1.0, epsilon = 3e-11 * scale);
            }
            assert!(cm.uncertainty_margin(2.0) >= -1e-10 * scale);

            let p = pair.bipartite_p();
            let shifted = |q: f64| {
                let mut m = cm.entries().clone();
                for i in 0..4 {
                    m[(i, i)] -= q;
                }
                psd_margin(&m).unwrap()
            };
            assert!(shifted(p) >= -1e-12, "tau = {tau}");
            if tau > 0.0 {
                assert!(shifted(p + 1e-6) < 0.0, "tau = {tau}");
            }
        }
        assert!(SqueezedPair::new(-0.1).is_err());
        assert!(SqueezedPair::new(f64::NAN).is_err());
    }

    #[test]
    fn squeezed_pair_at_zero_is_the_vacuum() {
        let cm = SqueezedPair::new(0.0).unwrap().cm();
        let id = nalgebra::DMatrix::<f64>::identity(4, 4);
        assert_eq!(cm.entries(), &id);
    }

    #[test]
    fn entropy_reference_values() {
        assert_eq!(hyperbolic_entropy(0.0).unwrap(), 0.0);
        let table = [
            (0.5, 0.9513895138912787),
            (1.0, 2.3369093005458974),
            (2.0, 5.21363653328036),
        ];
        for (tau, expected) in table {
            assert_relative_eq!(
                hyperbolic_entropy(tau).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
        assert!(hyperbolic_entropy(-1e-9).is_err());
        assert!(hyperbolic_entropy(f64::NAN).is_err());
        assert!(hyperbolic_entropy(f64::INFINITY).is_err());
    }

    #[test]
    fn entropy_branches_join_smoothly() {
        let below = hyperbolic_entropy(19.0 - 1e-9).unwrap();
        let above = hyperbolic_entropy(19.0).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-9);

        let mut prev = 0.0;
        for k in 1..200 {
            let v = hyperbolic_entropy(0.2 * k as f64).unwrap();
            assert!(v > prev, "entropy must increase with tau");
            prev = v;
        }
    }

    #[test]
    fn delta_correction_range_and_endpoints() {
        assert!(delta_correction(1.0).unwrap().abs() <= 1e-12);
        let floor = 1.0 / std::f64::consts::LN_2 - 2.0;
        assert_relative_eq!(delta_correction(1e-12).unwrap(), floor, epsilon = 1e-5);
        assert_eq!(delta_correction(1e-300).unwrap(), floor);
        assert_relative_eq!(
            delta_correction(0.5).unwrap(),
            -0.5270575167882934,
            max_relative = 1e-12
        );
        let mut prev = 1.0;
        for k in 1..60 {
            let p = 1.0 - 0.0166 * k as f64;
            let d = delta_correction(p).unwrap();
            assert!(d <= 1e-12 && d >= floor - 1e-12);
            assert!(d < prev + 1e-15, "delta must fall as p falls");
            prev = d;
        }
        assert!(delta_correction(0.0).is_err());
        assert!(delta_correction(1.0 + 1e-9).is_err());
        assert!(delta_correction(-0.5).is_err());
    }

    #[test]
    fn eof_bound_tracks_the_squeezed_entropy() {
        assert_eq!(eof_lower_bound(1.0).unwrap(), 0.0);
        for &p in &[0.9f64, 0.5, 0.1, 1e-3] {
            let tau = -p.ln();
            assert_relative_eq!(
                eof_lower_bound(p).unwrap(),
                hyperbolic_entropy(tau).unwrap(),
                max_relative = 1e-14
            );
            // consistent split: eof = -2 log2 p + delta
            assert_relative_eq!(
                eof_lower_bound(p).unwrap(),
                -2.0 * p.log2() + delta_correction(p).unwrap(),
                max_relative = 1e-10
            );
        }
        assert!(eof_lower_bound(0.0).is_err());
        assert!(eof_lower_bound(2.0).is_err());
    }
}
