//! Fixtures shared by the benchmarks.

use nalgebra::DMatrix;
use qdiv_core::classes::XShapeParams;
use qdiv_core::{Complex64, HermitianMatrix, MasterEquationForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded random Hermitian matrix with entries in `[-1, 1]`.
pub fn hermitian(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    HermitianMatrix::new((&a + a.adjoint()).scale(0.5)).expect("hermitian by construction")
}

/// X-shaped generator that is P but not CP.
pub fn p_not_cp_generator() -> MasterEquationForm {
    XShapeParams::new(-0.5, 2.0, 2.0, Complex64::new(1.0, 0.0)).to_master().expect("valid generator")
}
