#![allow(dead_code)]

use nalgebra::{DMatrix, Matrix3, Vector3};
use qdiv_core::{BlochAffineGenerator, ChoiGeneratorQubit, Complex64, HermitianMatrix, MasterEquationForm};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex(rng: &mut impl Rng, scale: f64) -> Complex64 {
    Complex64::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> HermitianMatrix {
    let a = DMatrix::from_fn(n, n, |_, _| complex(rng, scale));
    HermitianMatrix::new((&a + a.adjoint()).scale(0.5)).unwrap()
}

pub fn unitary(rng: &mut impl Rng, n: usize) -> DMatrix<Complex64> {
    let a = DMatrix::from_fn(n, n, |_, _| complex(rng, 1.0));
    a.qr().q()
}

/// `Q diag(λ) Q†` for a random unitary `Q`.
pub fn with_spectrum(rng: &mut impl Rng, spectrum: &[f64]) -> HermitianMatrix {
    let n = spectrum.len();
    let q = unitary(rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(n, spectrum.iter().map(|&x| Complex64::new(x, 0.0))));
    HermitianMatrix::new(&q * d * q.adjoint()).unwrap()
}

pub fn qubit_master(rng: &mut impl Rng) -> MasterEquationForm {
    MasterEquationForm::new(hermitian(rng, 2, 1.0), hermitian(rng, 3, 1.0)).unwrap()
}

pub fn choi_params(rng: &mut impl Rng) -> ChoiGeneratorQubit {
    ChoiGeneratorQubit {
        q1: rng.random_range(-1.0..1.0),
        q2: rng.random_range(-1.0..1.0),
        y1: complex(rng, 1.0),
        y2: complex(rng, 1.0),
        x: complex(rng, 1.0),
        z1: complex(rng, 1.0),
        z2: complex(rng, 1.0),
    }
}

pub fn bloch(rng: &mut impl Rng) -> BlochAffineGenerator {
    let r = Matrix3::from_fn(|_, _| rng.random_range(-1.0..1.0));
    let t = Vector3::from_fn(|_, _| rng.random_range(-1.0..1.0));
    BlochAffineGenerator::new(r, t).unwrap()
}

pub fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn choi_diff(a: &ChoiGeneratorQubit, b: &ChoiGeneratorQubit) -> f64 {
    [
        Complex64::new(a.q1 - b.q1, 0.0),
        Complex64::new(a.q2 - b.q2, 0.0),
        a.y1 - b.y1,
        a.y2 - b.y2,
        a.x - b.x,
        a.z1 - b.z1,
        a.z2 - b.z2,
    ]
    .iter()
    .map(|z| z.norm())
    .fold(0.0, f64::max)
}

pub fn bloch_diff(a: &BlochAffineGenerator, b: &BlochAffineGenerator) -> f64 {
    (a.r() - b.r()).abs().max().max((a.t() - b.t()).abs().max())
}

pub fn master_diff(a: &MasterEquationForm, b: &MasterEquationForm) -> f64 {
    max_diff(a.hamiltonian().as_matrix(), b.hamiltonian().as_matrix())
        .max(max_diff(a.dissipation().as_matrix(), b.dissipation().as_matrix()))
}
