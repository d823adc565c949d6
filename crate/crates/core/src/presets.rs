//! Built-in processes with known generators, used to produce test traces.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classes::XShapeParams;
use crate::error::{Error, Result};
use crate::process::ProcessTrace;
use crate::repr::MasterEquationForm;
use crate::superop;

/// `steps + 1` equally spaced times on `[0, t_end]`.
pub fn uniform_times(t_end: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|k| t_end * k as f64 / steps as f64).collect()
}

fn pauli_matrices() -> [DMatrix<Complex64>; 3] {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    [
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]),
    ]
}

/// Superoperator of the qubit map `v ↦ R v + s` on Bloch vectors.
pub fn bloch_affine_map(r: &Matrix3<f64>, s: &Vector3<f64>) -> DMatrix<Complex64> {
    let sigma = pauli_matrices();
    superop::superoperator_from_fn(2, |rho| {
        let tr = rho.trace();
        let v: Vec<Complex64> = sigma.iter().map(|p| (p * rho).trace()).collect();
        let mut out = DMatrix::<Complex64>::identity(2, 2) * tr;
        for (j, pj) in sigma.iter().enumerate() {
            let mut coeff = tr * s[j];
            for k in 0..3 {
                coeff += v[k] * r[(j, k)];
            }
            out += pj * coeff;
        }
        out * Complex64::new(0.5, 0.0)
    })
}

/// `Λ_t = exp(t L0)` for a constant generator.
pub fn semigroup(generator: &MasterEquationForm, times: &[f64]) -> Result<ProcessTrace> {
    let l0 = generator.superoperator();
    let maps = times.iter().map(|&t| l0.scale(t).exp()).collect();
    ProcessTrace::new(generator.dim(), times.to_vec(), maps)
}

/// Pauli channel with `R(t) = diag(e^{-g_j t})` and no translation.
pub fn pauli_decay(rates: [f64; 3], times: &[f64]) -> Result<ProcessTrace> {
    let maps = times
        .iter()
        .map(|&t| {
            let r = Matrix3::from_diagonal(&Vector3::new((-rates[0] * t).exp(), (-rates[1] * t).exp(), (-rates[2] * t).exp()));
            bloch_affine_map(&r, &Vector3::zeros())
        })
        .collect();
    ProcessTrace::new(2, times.to_vec(), maps)
}

/// X-shaped generator with `D11(t) = a - b t` and constant `D22`, `D33`,
/// `D23`. The `D11` part commutes with the rest, so
/// `Λ_t = exp(t L_rest + (a t - b t²/2) L_11)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XRamp {
    pub a: f64,
    pub b: f64,
    pub d22: f64,
    pub d33: f64,
    pub d23: Complex64,
}

impl Default for XRamp {
    fn default() -> Self {
        Self { a: 0.5, b: 0.5, d22: 2.0, d33: 2.0, d23: Complex64::new(1.0, 0.0) }
    }
}

impl XRamp {
    pub fn params_at(&self, t: f64) -> XShapeParams {
        XShapeParams::new(self.a - self.b * t, self.d22, self.d33, self.d23)
    }

    /// Time at which `D11` changes sign, i.e. local CP is lost.
    pub fn cp_crossing(&self) -> Option<f64> {
        (self.b != 0.0).then(|| self.a / self.b)
    }

    /// Time after which `(|D23| - D11)² > D22 D33` with `D11 < |D23|`, i.e.
    /// local P is lost. Requires `b > 0`.
    pub fn p_crossing(&self) -> Option<f64> {
        if self.b <= 0.0 || self.d22 < 0.0 || self.d33 < 0.0 {
            return None;
        }
        // |D23| - a + b t = √(D22 D33)
        Some(((self.d22 * self.d33).sqrt() - self.d23.norm() + self.a) / self.b)
    }
}

pub fn x_ramp(ramp: &XRamp, times: &[f64]) -> Result<ProcessTrace> {
    if !(ramp.a.is_finite() && ramp.b.is_finite() && ramp.d22.is_finite() && ramp.d33.is_finite()) {
        return Err(Error::InvalidInput("ramp parameters must be finite".into()));
    }
    let rest = XShapeParams::new(0.0, ramp.d22, ramp.d33, ramp.d23).to_master()?.superoperator();
    let l11 = XShapeParams::new(1.0, 0.0, 0.0, Complex64::new(0.0, 0.0)).to_master()?.superoperator();
    let maps = times
        .iter()
        .map(|&t| (rest.scale(t) + l11.scale(ramp.a * t - 0.5 * ramp.b * t * t)).exp())
        .collect();
    ProcessTrace::new(2, times.to_vec(), maps)
}
