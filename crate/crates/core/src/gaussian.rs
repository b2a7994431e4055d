//! Covariance matrices of Gaussian states and the symplectic linear algebra
//! that goes with them.
//!
//! A system of `n` modes has canonical coordinates `(x_1, p_1, ..., x_n, p_n)`.
//! Two memory layouts are supported: [`BasisOrdering::XpInterleaved`] keeps
//! that order, [`BasisOrdering::Xxpp`] groups all positions before all
//! momenta. All routines accept either layout; the matching symplectic form
//! comes from [`standard_form`].
//!
//! The physicality criterion is the uncertainty relation
//! `gamma + i (hbar/2) sigma >= 0`, checked here through a real symmetric
//! embedding so no complex arithmetic is needed.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Relative tolerance for accepting a matrix as symmetric.
pub const SYMMETRY_RTOL: f64 = 1e-12;

/// Absolute tolerance on `S sigma S^T - sigma` when validating a transform.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Layout of the canonical coordinates along the rows/columns of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisOrdering {
    /// `(x_1, p_1, x_2, p_2, ...)` per-mode pairs.
    XpInterleaved,
    /// `(x_1, ..., x_n, p_1, ..., p_n)` positions first.
    Xxpp,
}

impl BasisOrdering {
    /// Maps a row/column index to a canonical coordinate id, where the
    /// canonical id is the interleaved position. Used to permute between
    /// layouts without any arithmetic on the entries.
    fn coordinate_ids(self, n_modes: usize) -> Vec<usize> {
        match self {
            BasisOrdering::XpInterleaved => (0..2 * n_modes).collect(),
            BasisOrdering::Xxpp => (0..2 * n_modes)
                .map(|k| {
                    if k < n_modes {
                        2 * k
                    } else {
                        2 * (k - n_modes) + 1
                    }
                })
                .collect(),
        }
    }
}

/// Covariance matrix of an `n`-mode Gaussian state.
///
/// Entries are symmetrized on construction; inputs asymmetric beyond
/// [`SYMMETRY_RTOL`] (relative to the largest entry) are rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    n_modes: usize,
    ordering: BasisOrdering,
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>, ordering: BasisOrdering) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::NotSquare {
                rows: entries.nrows(),
                cols: entries.ncols(),
            });
        }
        let dim = entries.nrows();
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::OddDimension { dim });
        }
        check_symmetric(&entries)?;
        let sym = symmetrize(&entries);
        Ok(Self {
            n_modes: dim / 2,
            ordering,
            entries: sym,
        })
    }

    /// Builds from raw storage without symmetrizing. The caller guarantees
    /// exact symmetry; used by permutation round trips to stay bit-exact.
    pub(crate) fn from_symmetric_unchecked(entries: DMatrix<f64>, ordering: BasisOrdering) -> Self {
        let n_modes = entries.nrows() / 2;
        Self {
            n_modes,
            ordering,
            entries,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn ordering(&self) -> BasisOrdering {
        self.ordering
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Entries as nested rows, for serialization.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.entries.nrows())
            .map(|i| {
                (0..self.entries.ncols())
                    .map(|j| self.entries[(i, j)])
                    .collect()
            })
            .collect()
    }

    /// Minimum eigenvalue of the Hermitian matrix `gamma + i (hbar/2) sigma`.
    ///
    /// Nonnegative (up to solver tolerance) exactly when the state is
    /// physical. Computed via the real embedding
    /// `[[gamma, -(hbar/2) sigma], [(hbar/2) sigma, gamma]]`, whose spectrum
    /// equals the Hermitian one doubled.
    pub fn uncertainty_margin(&self, hbar: f64) -> f64 {
        let d = 2 * self.n_modes;
        let sigma = standard_form(self.n_modes, self.ordering);
        let mut embed = DMatrix::<f64>::zeros(2 * d, 2 * d);
        for i in 0..d {
            for j in 0..d {
                embed[(i, j)] = self.entries[(i, j)];
                embed[(d + i, d + j)] = self.entries[(i, j)];
                embed[(i, d + j)] = -0.5 * hbar * sigma[(i, j)];
                embed[(d + i, j)] = 0.5 * hbar * sigma[(i, j)];
            }
        }
        embed.symmetric_eigen().eigenvalues.min()
    }

    /// Whether the uncertainty relation holds within `tol`.
    pub fn is_physical(&self, hbar: f64, tol: f64) -> bool {
        self.uncertainty_margin(hbar) >= -tol
    }
}

impl Serialize for CovarianceMatrix {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("CovarianceMatrix", 3)?;
        s.serialize_field("n_modes", &self.n_modes)?;
        s.serialize_field("ordering", &self.ordering)?;
        s.serialize_field("entries", &self.to_rows())?;
        s.end()
    }
}

/// A linear canonical transformation `S` with `S sigma S^T = sigma`.
#[derive(Debug, Clone)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    ordering: BasisOrdering,
}

impl SymplecticTransform {
    /// Validates the symplectic condition to [`SYMPLECTIC_TOL`] (max-norm).
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
        let sigma = standard_form(dim / 2, ordering);
        let defect = &matrix * &sigma * matrix.transpose() - &sigma;
        let max_defect = defect.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        if max_defect > SYMPLECTIC_TOL {
            return Err(Error::OutOfDomain {
                name: "max |S sigma S^T - sigma|",
                value: max_defect,
                domain: "[0, 1e-10]",
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

/// The standard symplectic form for `n` modes in the given layout.
///
/// Interleaved: a direct sum of `[[0, 1], [-1, 0]]` blocks. Xxpp:
/// `[[0, I], [-I, 0]]`. Antisymmetric, squares to minus identity.
pub fn standard_form(n_modes: usize, ordering: BasisOrdering) -> DMatrix<f64> {
    let d = 2 * n_modes;
    let mut sigma = DMatrix::<f64>::zeros(d, d);
    match ordering {
        BasisOrdering::XpInterleaved => {
            for j in 0..n_modes {
                sigma[(2 * j, 2 * j + 1)] = 1.0;
                sigma[(2 * j + 1, 2 * j)] = -1.0;
            }
        }
        BasisOrdering::Xxpp => {
            for j in 0..n_modes {
                sigma[(j, n_modes + j)] = 1.0;
                sigma[(n_modes + j, j)] = -1.0;
            }
        }
    }
    sigma
}

/// Permutes a covariance matrix into the target layout.
///
/// Pure index shuffling: a round trip restores the input bit for bit.
pub fn reorder(cm: &CovarianceMatrix, target: BasisOrdering) -> CovarianceMatrix {
    if cm.ordering == target {
        return cm.clone();
    }
    let n = cm.n_modes;
    let src_ids = cm.ordering.coordinate_ids(n);
    let dst_ids = target.coordinate_ids(n);
    // src position of each canonical coordinate id
    let mut src_pos = vec![0usize; 2 * n];
    for (pos, &id) in src_ids.iter().enumerate() {
        src_pos[id] = pos;
    }
    let d = 2 * n;
    let entries = DMatrix::from_fn(d, d, |i, j| {
        cm.entries[(src_pos[dst_ids[i]], src_pos[dst_ids[j]])]
    });
    CovarianceMatrix::from_symmetric_unchecked(entries, target)
}

/// Symplectic eigenvalues of a covariance matrix, ascending.
///
/// Computed as the moduli of the eigenvalues of `sigma gamma`, which come in
/// pairs `(+d_j, -d_j)` on the imaginary axis; each returned value is the
/// mean of one sorted pair. For a physical state all values are `>= hbar/2`.
pub fn symplectic_eigenvalues(cm: &CovarianceMatrix) -> Vec<f64> {
    symplectic_moduli(&cm.entries, cm.ordering)
}

/// Pairing core shared with the quadratic-Hamiltonian route: sorted moduli
/// of `eig(sigma m)`, collapsed pairwise.
pub(crate) fn symplectic_moduli(m: &DMatrix<f64>, ordering: BasisOrdering) -> Vec<f64> {
    let sigma = standard_form(m.nrows() / 2, ordering);
    let a = &sigma * m;
    let mut moduli: Vec<f64> = a.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    moduli
        .chunks_exact(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect()
}

/// Minimum eigenvalue of a symmetric matrix.
///
/// Negative values measure how far the matrix is from positive
/// semi-definite. Rejects inputs asymmetric beyond [`SYMMETRY_RTOL`].
pub fn psd_margin(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    check_symmetric(m)?;
    Ok(symmetrize(m).symmetric_eigen().eigenvalues.min())
}

/// Congruence transform `S gamma S^T` of a covariance matrix.
pub fn apply_symplectic(
    s: &SymplecticTransform,
    cm: &CovarianceMatrix,
) -> Result<CovarianceMatrix> {
    if s.ordering != cm.ordering {
        return Err(Error::OrderingMismatch {
            left: s.ordering,
            right: cm.ordering,
        });
    }
    if s.matrix.nrows() != 2 * cm.n_modes {
        return Err(Error::DimensionMismatch {
            context: "apply_symplectic",
            expected: 2 * cm.n_modes,
            got: s.matrix.nrows(),
        });
    }
    let out = &s.matrix * &cm.entries * s.matrix.transpose();
    Ok(CovarianceMatrix::from_symmetric_unchecked(
        symmetrize(&out),
        cm.ordering,
    ))
}

/// Applies a scalar function to a symmetric positive semi-definite matrix
/// through its eigendecomposition.
///
/// Eigenvalues slightly negative from roundoff (within `1e-12` relative to
/// the spectral radius) are clamped to zero before `f` is applied; anything
/// more negative is a genuine PSD violation and is rejected. `f` must be
/// finite on every (clamped) eigenvalue.
pub fn matrix_function<F: Fn(f64) -> f64>(v: &DMatrix<f64>, f: F) -> Result<DMatrix<f64>> {
    if v.nrows() != v.ncols() {
        return Err(Error::NotSquare {
            rows: v.nrows(),
            cols: v.ncols(),
        });
    }
    check_symmetric(v)?;
    let eigen = symmetrize(v).symmetric_eigen();
    let radius = eigen
        .eigenvalues
        .iter()
        .fold(0.0f64, |a, &x| a.max(x.abs()));
    let threshold = -1e-12 * radius.max(1.0);
    let mut mapped = eigen.eigenvalues.clone();
    for lambda in mapped.iter_mut() {
        if *lambda < threshold {
            return Err(Error::NotPositiveSemiDefinite {
                min_eigenvalue: *lambda,
            });
        }
        let clamped = lambda.max(0.0);
        let value = f(clamped);
        if !value.is_finite() {
            return Err(Error::SingularSpectrum {
                eigenvalue: clamped,
                value,
            });
        }
        *lambda = value;
    }
    let out =
        &eigen.eigenvectors * DMatrix::from_diagonal(&mapped) * eigen.eigenvectors.transpose();
    Ok(symmetrize(&out))
}

/// Largest entry magnitude; the scale used for relative symmetry checks.
fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let scale = max_abs(m).max(1e-300);
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    if worst > SYMMETRY_RTOL * scale {
        return Err(Error::NotSymmetric {
            max_asymmetry: worst,
            tolerance: SYMMETRY_RTOL * scale,
        });
    }
    Ok(())
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    0.5 * (m + m.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cm(entries: DMatrix<f64>, ordering: BasisOrdering) -> CovarianceMatrix {
        CovarianceMatrix::new(entries, ordering).expect("valid covariance matrix")
    }

    #[test]
    fn standard_form_single_mode() {
        let sigma = standard_form(1, BasisOrdering::XpInterleaved);
        assert_eq!(sigma, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]));
    }

    #[test]
    fn standard_form_xxpp_blocks() {
        let sigma = standard_form(2, BasisOrdering::Xxpp);
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            -1.0, 0.0, 0.0, 0.0,
            0.0, -1.0, 0.0, 0.0,
        ]);
        assert_eq!(sigma, expected);
    }

    #[test]
    fn standard_form_squares_to_minus_identity() {
        for ordering in [BasisOrdering::XpInterleaved, BasisOrdering::Xxpp] {
            let sigma = standard_form(3, ordering);
            let square = &sigma * &sigma;
            assert_eq!(square, -DMatrix::<f64>::identity(6, 6));
        }
    }

    #[test]
    fn reorder_diagonal_example() {
        // interleaved (x1,p1,x2,p2) = diag(a,b,c,d) becomes
        // xxpp (x1,x2,p1,p2) = diag(a,c,b,d)
        let g = cm(
            DMatrix::from_diagonal(&nalgebra::dvector![1.0, 2.0, 3.0, 4.0]),
            BasisOrdering::XpInterleaved,
        );
        let x = reorder(&g, BasisOrdering::Xxpp);
        assert_eq!(
            x.entries().diagonal(),
            nalgebra::dvector![1.0, 3.0, 2.0, 4.0]
        );
    }

    #[test]
    fn reorder_round_trip_is_bit_exact() {
        let raw = DMatrix::from_fn(6, 6, |i, j| ((i * 7 + j * 3) % 11) as f64 / 7.0);
        let g = cm(&raw + raw.transpose(), BasisOrdering::Xxpp);
        let back = reorder(
            &reorder(&g, BasisOrdering::XpInterleaved),
            BasisOrdering::Xxpp,
        );
        assert_eq!(g.entries(), back.entries());
    }

    #[test]
    fn reorder_single_mode_is_identity() {
        let g = cm(
            DMatrix::from_row_slice(2, 2, &[0.7, 0.1, 0.1, 0.9]),
            BasisOrdering::XpInterleaved,
        );
        let x = reorder(&g, BasisOrdering::Xxpp);
        assert_eq!(g.entries(), x.entries());
    }

    #[test]
    fn rejects_asymmetric_entries() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(matches!(
            CovarianceMatrix::new(m, BasisOrdering::Xxpp),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn rejects_odd_dimension() {
        let m = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(
            CovarianceMatrix::new(m, BasisOrdering::Xxpp),
            Err(Error::OddDimension { dim: 3 })
        ));
    }

    #[test]
    fn symplectic_eigenvalues_of_identity() {
        let g = cm(DMatrix::identity(6, 6), BasisOrdering::Xxpp);
        let nu = symplectic_eigenvalues(&g);
        assert_eq!(nu.len(), 3);
        for v in nu {
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn symplectic_eigenvalues_of_thermal_block() {
        // diag(c/(2w), c w/2) has symplectic eigenvalue c/2 for any w
        let w = 2.5f64;
        let c = 1.8f64;
        let g = cm(
            DMatrix::from_diagonal(&nalgebra::dvector![c / (2.0 * w), c * w / 2.0]),
            BasisOrdering::XpInterleaved,
        );
        let nu = symplectic_eigenvalues(&g);
        assert_relative_eq!(nu[0], c / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn symplectic_eigenvalues_invariant_under_local_squeeze() {
        // diag(e^r, e^-r) per mode is symplectic; eigenvalues must not move
        let g = cm(
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    1.3, 0.0, 0.2, 0.0, //
                    0.0, 1.3, 0.0, -0.2, //
                    0.2, 0.0, 1.3, 0.0, //
                    0.0, -0.2, 0.0, 1.3,
                ],
            ),
            BasisOrdering::XpInterleaved,
        );
        let r = 0.7f64;
        let s = SymplecticTransform::new(
            DMatrix::from_diagonal(&nalgebra::dvector![
                r.exp(),
                (-r).exp(),
                r.exp(),
                (-r).exp()
            ]),
            BasisOrdering::XpInterleaved,
        )
        .unwrap();
        let before = symplectic_eigenvalues(&g);
        let after = symplectic_eigenvalues(&apply_symplectic(&s, &g).unwrap());
        for (b, a) in before.iter().zip(after.iter()) {
            assert_relative_eq!(b, a, max_relative = 1e-10);
        }
    }

    #[test]
    fn psd_margin_reports_min_eigenvalue() {
        assert_eq!(psd_margin(&DMatrix::<f64>::zeros(2, 2)).unwrap(), 0.0);
        let m = DMatrix::from_diagonal(&nalgebra::dvector![2.0, -1.0]);
        assert_relative_eq!(psd_margin(&m).unwrap(), -1.0, max_relative = 1e-14);
    }

    #[test]
    fn psd_margin_rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
        assert!(matches!(psd_margin(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn symplectic_transform_rejects_non_symplectic() {
        let m = DMatrix::from_diagonal(&nalgebra::dvector![2.0, 2.0]);
        assert!(SymplecticTransform::new(m, BasisOrdering::XpInterleaved).is_err());
    }

    #[test]
    fn apply_identity_is_noop() {
        let g = cm(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 2.0]),
            BasisOrdering::XpInterleaved,
        );
        let s = SymplecticTransform::new(DMatrix::identity(2, 2), BasisOrdering::XpInterleaved)
            .unwrap();
        let out = apply_symplectic(&s, &g).unwrap();
        assert_eq!(out.entries(), g.entries());
    }

    #[test]
    fn apply_rejects_ordering_mismatch() {
        let g = cm(DMatrix::identity(4, 4), BasisOrdering::Xxpp);
        let s = SymplecticTransform::new(DMatrix::identity(4, 4), BasisOrdering::XpInterleaved)
            .unwrap();
        assert!(matches!(
            apply_symplectic(&s, &g),
            Err(Error::OrderingMismatch { .. })
        ));
    }

    #[test]
    fn matrix_function_square_root() {
        let v = DMatrix::from_diagonal(&nalgebra::dvector![4.0, 9.0]);
        let root = matrix_function(&v, f64::sqrt).unwrap();
        assert_relative_eq!(root[(0, 0)], 2.0, max_relative = 1e-14);
        assert_relative_eq!(root[(1, 1)], 3.0, max_relative = 1e-14);
    }

    #[test]
    fn matrix_function_root_squares_back() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 0.4, 0.1, 0.4, 1.5, 0.2, 0.1, 0.2, 3.0]);
        let root = matrix_function(&a, f64::sqrt).unwrap();
        let back = &root * &root;
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(back[(i, j)], a[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn matrix_function_rejects_indefinite() {
        let v = DMatrix::from_diagonal(&nalgebra::dvector![1.0, -0.5]);
        assert!(matches!(
            matrix_function(&v, f64::sqrt),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
    }

    #[test]
    fn matrix_function_rejects_singular_inverse() {
        let v = DMatrix::from_diagonal(&nalgebra::dvector![1.0, 0.0]);
        assert!(matches!(
            matrix_function(&v, |x| 1.0 / x.sqrt()),
            Err(Error::SingularSpectrum { .. })
        ));
    }

    #[test]
    fn uncertainty_margin_of_vacuum() {
        // gamma = (hbar/2) I saturates the uncertainty relation
        let g = cm(0.5 * DMatrix::<f64>::identity(4, 4), BasisOrdering::Xxpp);
        let margin = g.uncertainty_margin(1.0);
        assert_relative_eq!(margin, 0.0, epsilon = 1e-12);
        assert!(g.is_physical(1.0, 1e-10));
        assert!(!g.is_physical(2.0, 1e-10));
    }
}
