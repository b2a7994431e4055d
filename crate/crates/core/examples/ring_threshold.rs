//! Threshold and verdict for a three-site ring, as shown in the README.

use thermosep::hamiltonians::{ring_dispersion, ring_potential, RingParams};
use thermosep::separability::{check_full_separability, critical_beta, SeparabilityStatus};
use thermosep::thermal::{thermal_cm, Constants, ThermalPoint};

fn main() -> thermosep::Result<()> {
    let ring = RingParams::new(3, 1.0, 1.0)?; // n sites, pinning, coupling
    let spectrum = ring_dispersion(&ring); // frequencies {1, 2, 2}
    let consts = Constants::default(); // hbar = k_B = 1

    // exact threshold for a shift-invariant system
    let crit = critical_beta(&spectrum, true, &consts)?;
    assert!((crit.beta_crit - 1.3169578969248172).abs() < 1e-9);

    // certified verdict for the Gibbs state at beta = 2 (above threshold)
    let point = ThermalPoint::new(2.0)?;
    let gamma = thermal_cm(&ring_potential(&ring), &point)?;
    let verdict = check_full_separability(&gamma, &spectrum, &point, 1.0, true)?;
    assert_eq!(verdict.status, SeparabilityStatus::EntangledCertified);

    println!(
        "beta_crit = {} (state at beta = 2 is {:?})",
        crit.beta_crit, verdict.status
    );
    Ok(())
}
