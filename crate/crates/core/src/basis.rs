//! Orthonormal operator bases `{F_i}` for the master-equation form.
//!
//! All bases satisfy `tr(F_i† F_j) = δ_ij`, `tr F_i = 0` for `i < d²`, and
//! `F_{d²} = 1/√d`. The dissipation matrix `D` is always expressed over the
//! first `d² - 1` elements.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const BASIS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<DMatrix<Complex64>>,
}

impl OperatorBasis {
    /// Qubit basis `F1 = σz/√2`, `F2 = |0⟩⟨1|`, `F3 = |1⟩⟨0|`, `F4 = 1/√2`.
    ///
    /// In this basis the Choi matrix of a generator restricted to the
    /// complement of the Bell state equals `D` entry by entry.
    pub fn qubit_standard() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let r = |x: f64| Complex64::new(x, 0.0);
        Self {
            dim: 2,
            elements: vec![
                DMatrix::from_row_slice(2, 2, &[r(s), z, z, r(-s)]),
                DMatrix::from_row_slice(2, 2, &[z, one, z, z]),
                DMatrix::from_row_slice(2, 2, &[z, z, one, z]),
                DMatrix::from_row_slice(2, 2, &[r(s), z, z, r(s)]),
            ],
        }
    }

    /// Normalized generalized Gell-Mann matrices: symmetric and antisymmetric
    /// off-diagonal pairs in lexicographic order, then the diagonal ones,
    /// then the normalized identity.
    pub fn gell_mann(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("operator basis needs dimension >= 2, got {dim}")));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut elements = Vec::with_capacity(dim * dim);
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut sym = DMatrix::zeros(dim, dim);
                sym[(j, k)] = Complex64::new(s, 0.0);
                sym[(k, j)] = Complex64::new(s, 0.0);
                elements.push(sym);
                let mut anti = DMatrix::zeros(dim, dim);
                anti[(j, k)] = Complex64::new(0.0, -s);
                anti[(k, j)] = Complex64::new(0.0, s);
                elements.push(anti);
            }
        }
        for l in 1..dim {
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let mut diag = DMatrix::zeros(dim, dim);
            for m in 0..l {
                diag[(m, m)] = Complex64::new(norm, 0.0);
            }
            diag[(l, l)] = Complex64::new(-(l as f64) * norm, 0.0);
            elements.push(diag);
        }
        elements.push(DMatrix::identity(dim, dim).scale(1.0 / (dim as f64).sqrt()));
        Ok(Self { dim, elements })
    }

    /// Default basis: [`OperatorBasis::qubit_standard`] for `d = 2`,
    /// generalized Gell-Mann otherwise.
    pub fn default_for(dim: usize) -> Result<Arc<Self>> {
        static QUBIT: OnceLock<Arc<OperatorBasis>> = OnceLock::new();
        if dim == 2 {
            return Ok(QUBIT.get_or_init(|| Arc::new(Self::qubit_standard())).clone());
        }
        Ok(Arc::new(Self::gell_mann(dim)?))
    }

    /// Accepts any orthonormal basis with traceless leading elements and
    /// `F_{d²} = 1/√d`.
    pub fn custom(dim: usize, elements: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if dim < 2 || elements.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "a basis for dimension {dim} needs {} elements, got {}",
                dim * dim,
                elements.len()
            )));
        }
        if elements.iter().any(|f| f.nrows() != dim || f.ncols() != dim) {
            return Err(Error::InvalidInput("basis element has wrong shape".into()));
        }
        for (i, fi) in elements.iter().enumerate() {
            for (j, fj) in elements.iter().enumerate() {
                let ip = hs_inner(fi, fj);
                let expected = if i == j { 1.0 } else { 0.0 };
                if (ip - Complex64::new(expected, 0.0)).norm() > BASIS_TOL {
                    return Err(Error::InvalidInput(format!("basis is not orthonormal at ({i}, {j})")));
                }
            }
        }
        let last = dim * dim - 1;
        for f in &elements[..last] {
            if f.trace().norm() > BASIS_TOL {
                return Err(Error::InvalidInput("leading basis elements must be traceless".into()));
            }
        }
        let unit = DMatrix::<Complex64>::identity(dim, dim).scale(1.0 / (dim as f64).sqrt());
        if (&elements[last] - unit).norm() > BASIS_TOL {
            return Err(Error::InvalidInput("last basis element must be 1/sqrt(d)".into()));
        }
        Ok(Self { dim, elements })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[DMatrix<Complex64>] {
        &self.elements
    }

    /// The traceless elements `F_1 … F_{d²-1}`.
    pub fn traceless(&self) -> &[DMatrix<Complex64>] {
        &self.elements[..self.elements.len() - 1]
    }
}

/// Hilbert-Schmidt inner product `tr(A† B)`.
pub fn hs_inner(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}
