//! Separability and entanglement of harmonic oscillator systems in thermal
//! equilibrium.
//!
//! The library works with Gaussian states of `n` coupled oscillators. A state
//! is described by its 2n x 2n covariance matrix; a Hamiltonian by a
//! positive semi-definite potential matrix (or just its normal-mode
//! frequency spectrum). On top of that sit:
//!
//! * [`gaussian`]: covariance matrices, symplectic forms and transforms,
//!   symplectic eigenvalues, matrix functions of symmetric matrices.
//! * [`hamiltonians`]: potential matrices, harmonic rings, dispersion
//!   relations and frequency spectra.
//! * [`thermal`]: Gibbs-state covariance matrices in the site and
//!   normal-mode bases.
//! * [`separability`]: the critical inverse temperature above which a
//!   thermal state can become entangled, and a certified witness search
//!   that decides full separability for concrete covariance matrices.
//! * [`measures`]: a quantitative separability measure, two-mode squeezed
//!   states, and a lower bound on the entanglement of formation.
//!
//! Internally everything is kept in natural units (`hbar = k_B = m = 1`)
//! unless the caller supplies other constants through
//! [`thermal::ThermalPoint`] or explicit mass parameters.

pub mod error;
pub mod gaussian;
pub mod hamiltonians;
pub mod measures;
pub mod separability;
pub mod thermal;

pub use error::{Error, Result};
