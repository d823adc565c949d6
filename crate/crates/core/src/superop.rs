//! Matrix representations of linear maps on `d x d` operators.
//!
//! Conventions used throughout the crate:
//!
//! * operators are vectorized row-major, `vec(ρ)[i*d + j] = ρ_ij`;
//! * a superoperator `S` acts as `vec(Λ[ρ]) = S vec(ρ)`, so column `i*d + j`
//!   holds `vec(Λ[|i⟩⟨j|])`;
//! * the Choi matrix is `C = Σ_ij |i⟩⟨j| ⊗ Λ[|i⟩⟨j|]`, i.e.
//!   `C[i*d + k, j*d + l] = Λ[|i⟩⟨j|]_kl`.
//!
//! A map is trace preserving iff for every column `i*d + j` of `S` the
//! entries at rows `k*d + k` sum to `δ_ij`; equivalently every `d x d` block
//! of the Choi matrix of a generator is traceless.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub fn unit(d: usize, i: usize, j: usize) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(d, d);
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

pub fn vectorize(rho: &DMatrix<Complex64>) -> DVector<Complex64> {
    let d = rho.nrows();
    DVector::from_fn(d * d, |idx, _| rho[(idx / d, idx % d)])
}

pub fn unvectorize(v: &DVector<Complex64>, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d, d, |i, j| v[i * d + j])
}

/// Superoperator matrix of an arbitrary linear map.
pub fn superoperator_from_fn<F>(d: usize, map: F) -> DMatrix<Complex64>
where
    F: Fn(&DMatrix<Complex64>) -> DMatrix<Complex64>,
{
    let mut s = DMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            let image = map(&unit(d, i, j));
            for k in 0..d {
                for l in 0..d {
                    s[(k * d + l, i * d + j)] = image[(k, l)];
                }
            }
        }
    }
    s
}

pub fn apply_superoperator(s: &DMatrix<Complex64>, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    unvectorize(&(s * vectorize(rho)), rho.nrows())
}

pub fn choi_from_superoperator(s: &DMatrix<Complex64>, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d * d, d * d, |row, col| {
        let (i, k) = (row / d, row % d);
        let (j, l) = (col / d, col % d);
        s[(k * d + l, i * d + j)]
    })
}

pub fn superoperator_from_choi(c: &DMatrix<Complex64>, d: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(d * d, d * d, |row, col| {
        let (k, l) = (row / d, row % d);
        let (i, j) = (col / d, col % d);
        c[(i * d + k, j * d + l)]
    })
}

/// Largest `|tr Λ[|i⟩⟨j|] - δ_ij|` over the basis, i.e. how far a map is
/// from trace preserving.
pub fn map_trace_defect(s: &DMatrix<Complex64>, d: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let tr: Complex64 = (0..d).map(|k| s[(k * d + k, i * d + j)]).sum();
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((tr - Complex64::new(expected, 0.0)).norm());
        }
    }
    worst
}

/// Largest block trace `|tr L[|i⟩⟨j|]|` of a generator's Choi matrix.
pub fn choi_block_trace_defect(c: &DMatrix<Complex64>, d: usize) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let tr: Complex64 = (0..d).map(|k| c[(i * d + k, j * d + k)]).sum();
            worst = worst.max(tr.norm());
        }
    }
    worst
}

/// Maximally entangled state `|Φ_B⟩ = Σ_i |ii⟩ / √d`.
pub fn bell_state(d: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(d * d);
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}

/// `(1 ⊗ A)|v⟩` for a vector on the doubled space.
pub fn apply_right_factor(a: &DMatrix<Complex64>, v: &DVector<Complex64>) -> DVector<Complex64> {
    let d = a.nrows();
    let mut out = DVector::zeros(d * d);
    for i in 0..d {
        for k in 0..d {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..d {
                acc += a[(k, l)] * v[i * d + l];
            }
            out[i * d + k] = acc;
        }
    }
    out
}
