//! Python bindings for the thermosep library.
//!
//! All matrices cross the boundary as lists of row lists, spectra as flat
//! frequency lists, and structured results as dicts, so the module needs
//! nothing beyond the standard library on the Python side. Domain errors
//! from the core surface as `ValueError` with the original message.

use nalgebra::DMatrix;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use thermosep::gaussian::{self, BasisOrdering, CovarianceMatrix};
use thermosep::hamiltonians::{ring_dispersion, FrequencySpectrum, PotentialMatrix, RingParams};
use thermosep::measures::{self, SqueezedPair};
use thermosep::separability::{self, CriticalMethod, SeparabilityStatus};
use thermosep::thermal::{self, Constants, ThermalPoint};

fn value_err(e: thermosep::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Builds a dense matrix from row lists, insisting on a square shape.
fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>, String> {
    let n = rows.len();
    if n == 0 {
        return Err("matrix must have at least one row".to_string());
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(format!(
                "row {i} has {} entries but the matrix has {n} rows",
                row.len()
            ));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn parse_ordering(name: &str) -> PyResult<BasisOrdering> {
    match name {
        "xxpp" => Ok(BasisOrdering::Xxpp),
        "xp" | "interleaved" => Ok(BasisOrdering::XpInterleaved),
        other => Err(PyValueError::new_err(format!(
            "unknown ordering {other:?}; use \"xxpp\" or \"xp\""
        ))),
    }
}

fn constants(hbar: f64, k_b: f64) -> PyResult<Constants> {
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(PyValueError::new_err(format!(
            "hbar must be positive and finite, got {hbar}"
        )));
    }
    if !(k_b.is_finite() && k_b > 0.0) {
        return Err(PyValueError::new_err(format!(
            "k_b must be positive and finite, got {k_b}"
        )));
    }
    Ok(Constants { hbar, k_b })
}

fn method_name(m: CriticalMethod) -> &'static str {
    match m {
        CriticalMethod::SymmetricExact => "SYMMETRIC_EXACT",
        CriticalMethod::SymmetricBound => "SYMMETRIC_BOUND",
        CriticalMethod::RoughBound => "ROUGH_BOUND",
    }
}

fn status_name(s: SeparabilityStatus) -> &'static str {
    match s {
        SeparabilityStatus::SeparableCertified => "SEPARABLE_CERTIFIED",
        SeparabilityStatus::EntangledCertified => "ENTANGLED_CERTIFIED",
        SeparabilityStatus::Unknown => "UNKNOWN",
    }
}

/// The dimensionless branch function `s(x)` governing two-mode comparator
/// admissibility. Raises `ValueError` off its domain (`x <= 0` or `x = 1`).
#[pyfunction]
fn scaling_function(x: f64) -> PyResult<f64> {
    separability::scaling_function(x).map_err(value_err)
}

/// Root of `s(t) = 2`: the balance point every spectrum spread approaches
/// as the spread grows without bound.
#[pyfunction]
fn t_infinity() -> f64 {
    separability::t_infinity()
}

/// Large-spread limit of `sigma(r)`, equal to `2 * t_infinity()`.
#[pyfunction]
fn sigma_infinity() -> f64 {
    separability::sigma_infinity()
}

/// Dimensionless critical inverse temperature for a spectrum of spread `r`.
///
/// Returns `{"value": sigma, "t_star": t}`; the value is `inf` for a
/// degenerate spectrum (`r = 1`).
#[pyfunction]
fn critical_sigma(py: Python<'_>, r: f64) -> PyResult<Py<PyDict>> {
    let point = separability::critical_sigma(r).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("value", point.value)?;
    d.set_item("t_star", point.t_star)?;
    Ok(d.unbind())
}

/// Critical inverse temperature of a Gibbs state with the given normal-mode
/// frequencies.
///
/// Returns a dict with `beta_crit`, `t_crit`, `sigma_r`, `t_star`,
/// `omega0_star`, `exact`, and `method`. Pass `exact=True` only when the
/// underlying Hamiltonian is site transitive; the value is then a sharp
/// threshold instead of a one-sided bound.
#[pyfunction]
#[pyo3(signature = (frequencies, exact=false, hbar=1.0, k_b=1.0))]
fn critical_beta(
    py: Python<'_>,
    frequencies: Vec<f64>,
    exact: bool,
    hbar: f64,
    k_b: f64,
) -> PyResult<Py<PyDict>> {
    let consts = constants(hbar, k_b)?;
    let spectrum = FrequencySpectrum::new(frequencies).map_err(value_err)?;
    let result = separability::critical_beta(&spectrum, exact, &consts).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("beta_crit", result.beta_crit)?;
    let t_crit = if result.beta_crit.is_finite() {
        1.0 / (consts.k_b * result.beta_crit)
    } else {
        0.0
    };
    d.set_item("t_crit", t_crit)?;
    d.set_item("sigma_r", result.sigma_r)?;
    d.set_item("t_star", result.t_star)?;
    d.set_item("omega0_star", result.omega0_star)?;
    d.set_item("exact", result.exact)?;
    d.set_item("method", method_name(result.method))?;
    Ok(d.unbind())
}

/// Coarse sufficient bound on the critical inverse temperature from a
/// single-mode symplectic eigenvalue `lambda0 > 1/2`.
#[pyfunction]
#[pyo3(signature = (lambda0, omega_max, hbar=1.0))]
fn rough_bound(lambda0: f64, omega_max: f64, hbar: f64) -> PyResult<f64> {
    separability::rough_bound(lambda0, omega_max, hbar).map_err(value_err)
}

/// Largest comparator fraction a Gibbs state dominates.
///
/// Returns `{"p", "neg_log_p", "omega0_star", "underflow"}`; `p` is 1
/// exactly on the separable side of the threshold and decays exponentially
/// beyond it, with `neg_log_p` exact even once `p` itself underflows.
#[pyfunction]
#[pyo3(signature = (frequencies, beta, hbar=1.0, k_b=1.0))]
fn p_measure(
    py: Python<'_>,
    frequencies: Vec<f64>,
    beta: f64,
    hbar: f64,
    k_b: f64,
) -> PyResult<Py<PyDict>> {
    let consts = constants(hbar, k_b)?;
    let spectrum = FrequencySpectrum::new(frequencies).map_err(value_err)?;
    let point = ThermalPoint::with_constants(beta, consts).map_err(value_err)?;
    let result = measures::p_measure(&spectrum, &point).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("p", result.p)?;
    d.set_item("neg_log_p", result.neg_log_p)?;
    d.set_item("omega0_star", result.omega0_star)?;
    d.set_item("underflow", result.underflow)?;
    Ok(d.unbind())
}

/// Entropy of a two-mode squeezed state as a function of its parameter
/// `tau >= 0`, in bits.
#[pyfunction]
fn hyperbolic_entropy(tau: f64) -> PyResult<f64> {
    measures::hyperbolic_entropy(tau).map_err(value_err)
}

/// Entanglement-of-formation lower bound for a bipartite fraction
/// `p` in `(0, 1]`, in bits.
#[pyfunction]
fn eof_lower_bound(p: f64) -> PyResult<f64> {
    measures::eof_lower_bound(p).map_err(value_err)
}

/// Gap between the entanglement bound and two raw qubits' worth of
/// `-log2 p`; bounded below by `1/ln 2 - 2`.
#[pyfunction]
fn delta_correction(p: f64) -> PyResult<f64> {
    measures::delta_correction(p).map_err(value_err)
}

/// Covariance matrix of a two-mode squeezed state (vacuum variance 1,
/// interleaved ordering) together with its bipartite fraction `exp(-tau)`.
#[pyfunction]
fn squeezed_pair(py: Python<'_>, tau: f64) -> PyResult<Py<PyDict>> {
    let pair = SqueezedPair::new(tau).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("cm", pair.cm().to_rows())?;
    d.set_item("ordering", "xp")?;
    d.set_item("p", pair.bipartite_p())?;
    Ok(d.unbind())
}

/// Normal-mode frequencies of a ring of `n` oscillators with pinning
/// `omega` and coupling `delta`, ascending.
#[pyfunction]
fn ring_frequencies(n: usize, omega: f64, delta: f64) -> PyResult<Vec<f64>> {
    let params = RingParams::new(n, omega, delta).map_err(value_err)?;
    Ok(ring_dispersion(&params).frequencies().to_vec())
}

/// Coupling matrix of the same ring, as row lists.
#[pyfunction]
#[pyo3(signature = (n, omega, delta, mass=1.0))]
fn ring_potential(n: usize, omega: f64, delta: f64, mass: f64) -> PyResult<Vec<Vec<f64>>> {
    let params = RingParams::with_mass(n, omega, delta, mass).map_err(value_err)?;
    let v = thermosep::hamiltonians::ring_potential(&params);
    let m = v.matrix();
    Ok((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect())
}

/// Normal-mode frequencies of an arbitrary coupling matrix `v` with site
/// mass `mass`.
#[pyfunction]
#[pyo3(signature = (v, mass=1.0))]
fn spectrum_of_potential(v: Vec<Vec<f64>>, mass: f64) -> PyResult<Vec<f64>> {
    let matrix = matrix_from_rows(&v).map_err(PyValueError::new_err)?;
    let potential = PotentialMatrix::new(matrix, mass).map_err(value_err)?;
    let spectrum =
        thermosep::hamiltonians::spectrum_from_potential(&potential).map_err(value_err)?;
    Ok(spectrum.frequencies().to_vec())
}

/// Site-basis covariance matrix of the Gibbs state of the Hamiltonian with
/// coupling matrix `v`, at inverse temperature `beta` (may be `inf`).
///
/// Rows come back in the requested ordering (`"xxpp"` or `"xp"`).
#[pyfunction]
#[pyo3(signature = (v, mass, beta, hbar=1.0, k_b=1.0, ordering="xxpp"))]
fn thermal_covariance(
    v: Vec<Vec<f64>>,
    mass: f64,
    beta: f64,
    hbar: f64,
    k_b: f64,
    ordering: &str,
) -> PyResult<Vec<Vec<f64>>> {
    let target = parse_ordering(ordering)?;
    let consts = constants(hbar, k_b)?;
    let matrix = matrix_from_rows(&v).map_err(PyValueError::new_err)?;
    let potential = PotentialMatrix::new(matrix, mass).map_err(value_err)?;
    let point = ThermalPoint::with_constants(beta, consts).map_err(value_err)?;
    let cm = thermal::thermal_cm(&potential, &point).map_err(value_err)?;
    Ok(gaussian::reorder(&cm, target).to_rows())
}

/// Symplectic eigenvalues of a covariance matrix given as row lists.
#[pyfunction]
#[pyo3(signature = (rows, ordering="xxpp"))]
fn symplectic_eigenvalues(rows: Vec<Vec<f64>>, ordering: &str) -> PyResult<Vec<f64>> {
    let basis = parse_ordering(ordering)?;
    let matrix = matrix_from_rows(&rows).map_err(PyValueError::new_err)?;
    let cm = CovarianceMatrix::new(matrix, basis).map_err(value_err)?;
    Ok(gaussian::symplectic_eigenvalues(&cm))
}

/// Decides full separability of the Gibbs state of the Hamiltonian with
/// coupling matrix `v` at inverse temperature `beta`.
///
/// Returns `{"status", "witness_omega0", "margin", "beta_crit"}` where
/// `status` is one of `"SEPARABLE_CERTIFIED"`, `"ENTANGLED_CERTIFIED"`,
/// `"UNKNOWN"`. Pass `exact=True` only for site-transitive couplings (for
/// example rings); entanglement is certified only under that flag.
#[pyfunction]
#[pyo3(signature = (v, mass, beta, exact=false, hbar=1.0, k_b=1.0))]
fn check_separability(
    py: Python<'_>,
    v: Vec<Vec<f64>>,
    mass: f64,
    beta: f64,
    exact: bool,
    hbar: f64,
    k_b: f64,
) -> PyResult<Py<PyDict>> {
    let consts = constants(hbar, k_b)?;
    let matrix = matrix_from_rows(&v).map_err(PyValueError::new_err)?;
    let potential = PotentialMatrix::new(matrix, mass).map_err(value_err)?;
    let spectrum =
        thermosep::hamiltonians::spectrum_from_potential(&potential).map_err(value_err)?;
    let point = ThermalPoint::with_constants(beta, consts).map_err(value_err)?;
    let gamma = thermal::thermal_cm(&potential, &point).map_err(value_err)?;
    let verdict = separability::check_full_separability(&gamma, &spectrum, &point, mass, exact)
        .map_err(value_err)?;
    let critical = separability::critical_beta(&spectrum, exact, &consts).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("status", status_name(verdict.status))?;
    d.set_item("witness_omega0", verdict.witness_omega0)?;
    d.set_item("margin", verdict.margin)?;
    d.set_item("beta_crit", critical.beta_crit)?;
    Ok(d.unbind())
}

/// Whether `v` commutes with the cyclic shift of sites.
#[pyfunction]
#[pyo3(signature = (v, mass=1.0))]
fn is_shift_invariant(v: Vec<Vec<f64>>, mass: f64) -> PyResult<bool> {
    let matrix = matrix_from_rows(&v).map_err(PyValueError::new_err)?;
    let potential = PotentialMatrix::new(matrix, mass).map_err(value_err)?;
    Ok(thermosep::hamiltonians::is_shift_invariant(&potential))
}

#[pymodule]
fn thermosep_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(scaling_function, m)?)?;
    m.add_function(wrap_pyfunction!(t_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_infinity, m)?)?;
    m.add_function(wrap_pyfunction!(critical_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(critical_beta, m)?)?;
    m.add_function(wrap_pyfunction!(rough_bound, m)?)?;
    m.add_function(wrap_pyfunction!(p_measure, m)?)?;
    m.add_function(wrap_pyfunction!(hyperbolic_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(eof_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(delta_correction, m)?)?;
    m.add_function(wrap_pyfunction!(squeezed_pair, m)?)?;
    m.add_function(wrap_pyfunction!(ring_frequencies, m)?)?;
    m.add_function(wrap_pyfunction!(ring_potential, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_of_potential, m)?)?;
    m.add_function(wrap_pyfunction!(thermal_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(symplectic_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(check_separability, m)?)?;
    m.add_function(wrap_pyfunction!(is_shift_invariant, m)?)?;
    Ok(())
}
