//! Dense Hermitian matrices and positive-semidefiniteness tests.
//!
//! Two independent routes decide `M ≥ 0`:
//!
//! * [`sylvester_psd`] enumerates every principal minor (the semidefinite
//!   form of Sylvester's criterion needs all `2^n - 1` of them, not only the
//!   leading ones);
//! * [`eigen_psd`] diagonalizes and inspects the smallest eigenvalue.
//!
//! Both compare against a scale-aware slack. With `s = max |M_ij|` a minor of
//! order `k` passes when `det ≥ -tol * s^k` and the spectrum passes when
//! `λ_min ≥ -tol * s`, so `tol` bounds the same dimensionless quantity on
//! either side.

use nalgebra::{linalg::SymmetricEigen, DMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-entry absolute tolerance of the Hermiticity check.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Largest dimension accepted by [`sylvester_psd`]; beyond this the `2^n - 1`
/// minor enumeration stops being a reasonable test.
pub const MAX_MINOR_DIM: usize = 8;

/// Iteration cap handed to the Hermitian eigensolver.
pub const EIGEN_MAX_ITERATIONS: usize = 1000;

/// A dense complex matrix known to be Hermitian.
///
/// Construction checks `M_ij = conj(M_ji)` to within [`HERMITICITY_TOL`] and
/// then stores the exactly Hermitian part `(M + M†) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITICITY_TOL)
    }

    /// Like [`HermitianMatrix::new`] with a caller-chosen Hermiticity tolerance.
    pub fn with_tolerance(matrix: DMatrix<Complex64>, tol: f64) -> Result<Self> {
        let n = matrix.nrows();
        if n != matrix.ncols() {
            return Err(Error::InvalidInput(format!(
                "matrix must be square, got {}x{}",
                n,
                matrix.ncols()
            )));
        }
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be positive".into()));
        }
        for i in 0..n {
            for j in 0..n {
                let z = matrix[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        for i in 0..n {
            let im = matrix[(i, i)].im.abs();
            if im > tol {
                return Err(Error::NotHermitian { row: i, col: i, deviation: im });
            }
            for j in (i + 1)..n {
                let deviation = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
                if deviation > tol {
                    return Err(Error::NotHermitian { row: i, col: j, deviation });
                }
            }
        }
        let adjoint = matrix.adjoint();
        Ok(Self { inner: (matrix + adjoint).scale(0.5) })
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Real symmetric matrix from row-major entries.
    pub fn from_real_row_major(dim: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_major(dim, &entries)
    }

    pub fn from_real_diagonal(diagonal: &[f64]) -> Result<Self> {
        let n = diagonal.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &x) in diagonal.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        Self::new(m)
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self { inner: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.inner[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    /// Largest absolute entry; the scale used by both PSD tests.
    pub fn max_abs_entry(&self) -> f64 {
        self.inner.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).sum()
    }

    /// Determinant of the principal submatrix selected by `indices`.
    pub fn principal_minor(&self, indices: &[usize]) -> f64 {
        let k = indices.len();
        let sub = DMatrix::from_fn(k, k, |r, c| self.inner[(indices[r], indices[c])]);
        determinant(sub)
    }

    /// Simultaneous permutation of rows and columns: entry `(i, j)` of the
    /// result is entry `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidInput("not a permutation of the matrix indices".into()));
        }
        Ok(Self { inner: DMatrix::from_fn(n, n, |i, j| self.inner[(perm[i], perm[j])]) })
    }

    /// Convex combination `(1 - s) * self + s * other`.
    pub fn lerp(&self, other: &Self, s: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::InvalidInput("dimension mismatch in interpolation".into()));
        }
        Ok(Self { inner: self.inner.scale(1.0 - s) + other.inner.scale(s) })
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let eig = SymmetricEigen::try_new(self.inner.clone(), f64::EPSILON, EIGEN_MAX_ITERATIONS)
            .ok_or(Error::NonConvergence { iterations: EIGEN_MAX_ITERATIONS })?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?[0])
    }
}

/// Determinant by Gaussian elimination with partial pivoting. The input is a
/// Hermitian principal submatrix, so only the real part is meaningful.
fn determinant(mut a: DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[(i, col)].norm().total_cmp(&a[(j, col)].norm()))
            .unwrap_or(col);
        if a[(pivot, col)].norm() == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap_rows(pivot, col);
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for row in (col + 1)..n {
            let factor = a[(row, col)] / p;
            if factor.norm() == 0.0 {
                continue;
            }
            for c in col..n {
                let v = a[(col, c)];
                a[(row, c)] -= factor * v;
            }
        }
    }
    det.re
}

/// A principal minor that fell below its slack.
#[derive(Debug, Clone, PartialEq)]
pub struct MinorWitness {
    /// Zero-based row/column indices of the submatrix, ascending.
    pub indices: Vec<usize>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterOutcome {
    pub is_psd: bool,
    pub witness: Option<MinorWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOutcome {
    pub is_psd: bool,
    pub min_eigenvalue: f64,
}

/// Index subsets in test order: by size, then lexicographically.
pub fn principal_index_sets(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            extend(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity((1usize << n).saturating_sub(1));
    for k in 1..=n {
        extend(n, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Semidefinite Sylvester test over all principal minors.
///
/// Minors are visited in the order of [`principal_index_sets`]; the first one
/// below `-tol * s^k` is reported as the witness.
pub fn sylvester_psd(m: &HermitianMatrix, tol: f64) -> Result<SylvesterOutcome> {
    check_tol(tol)?;
    let n = m.dim();
    if n > MAX_MINOR_DIM {
        return Err(Error::InvalidInput(format!(
            "principal-minor test supports dimension <= {MAX_MINOR_DIM}, got {n}"
        )));
    }
    let scale = m.max_abs_entry();
    for indices in principal_index_sets(n) {
        let value = m.principal_minor(&indices);
        let slack = tol * scale.powi(indices.len() as i32);
        if value < -slack {
            return Ok(SylvesterOutcome { is_psd: false, witness: Some(MinorWitness { indices, value }) });
        }
    }
    Ok(SylvesterOutcome { is_psd: true, witness: None })
}

/// Spectral PSD test; the independent oracle for [`sylvester_psd`].
pub fn eigen_psd(m: &HermitianMatrix, tol: f64) -> Result<EigenOutcome> {
    check_tol(tol)?;
    let min_eigenvalue = m.min_eigenvalue()?;
    let slack = tol * m.max_abs_entry();
    Ok(EigenOutcome { is_psd: min_eigenvalue >= -slack, min_eigenvalue })
}

/// The seven principal minors of a 3x3 matrix in the order
/// `(M11, M22, M33, M{12}, M{13}, M{23}, det M)`.
pub fn principal_minors_3x3(m: &HermitianMatrix) -> Result<[f64; 7]> {
    if m.dim() != 3 {
        return Err(Error::InvalidInput(format!("expected a 3x3 matrix, got dimension {}", m.dim())));
    }
    let mut out = [0.0; 7];
    for (slot, indices) in out.iter_mut().zip(principal_index_sets(3)) {
        *slot = m.principal_minor(&indices);
    }
    Ok(out)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::InvalidInput(format!("tolerance must be non-negative, got {tol}")));
    }
    Ok(())
}
