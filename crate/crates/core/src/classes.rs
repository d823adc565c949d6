//! Closed-form CP and P criteria for three families of qubit generators.
//!
//! * X-shaped: only `D11`, `D22`, `D33` and `D23` are nonzero.
//! * O-shaped: `D22 = D33`, `D21 = D13`, `D23 = 0`.
//! * Non-unital anisotropic Pauli: Bloch form `R = -diag(γ)`, `t = τ`.
//!
//! Every predicate is evaluated twice, once with each inequality relaxed by
//! [`CLASS_BAND`] and once tightened by it. The relaxed result is the
//! verdict; disagreement between the two marks the input as marginal.

use std::f64::consts::SQRT_2;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::repr::{bloch_to_master, master_to_bloch, BlochAffineGenerator, MasterEquationForm};
use crate::torus::{self, MinimizerOptions, TorusObjective};

/// Absolute slack applied to every class inequality.
pub const CLASS_BAND: f64 = 1e-9;

/// Largest off-diagonal Bloch entry tolerated when reading a generator as a
/// Pauli generator.
pub const PAULI_CLASS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Check {
    pub holds: bool,
    pub marginal: bool,
}

impl Check {
    fn eval(pred: impl Fn(f64) -> bool) -> Self {
        let relaxed = pred(CLASS_BAND);
        let tight = pred(-CLASS_BAND);
        Self { holds: relaxed, marginal: relaxed != tight }
    }
}

/// `a ≥ b` up to slack `eps` (negative `eps` tightens).
#[inline]
fn ge(a: f64, b: f64, eps: f64) -> bool {
    a - b >= -eps
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct XShapeParams {
    pub d11: f64,
    pub d22: f64,
    pub d33: f64,
    pub d23: Complex64,
}

impl XShapeParams {
    pub fn new(d11: f64, d22: f64, d33: f64, d23: Complex64) -> Self {
        Self { d11, d22, d33, d23 }
    }

    pub fn dissipation(&self) -> [[Complex64; 3]; 3] {
        let z = c(0.0);
        [[c(self.d11), z, z], [z, c(self.d22), self.d23], [z, self.d23.conj(), c(self.d33)]]
    }

    pub fn to_master(&self) -> Result<MasterEquationForm> {
        MasterEquationForm::qubit_dissipator(self.dissipation())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OShapeParams {
    pub d11: f64,
    pub d22: f64,
    pub d13: Complex64,
}

impl OShapeParams {
    pub fn new(d11: f64, d22: f64, d13: Complex64) -> Self {
        Self { d11, d22, d13 }
    }

    pub fn dissipation(&self) -> [[Complex64; 3]; 3] {
        let z = c(0.0);
        let w = self.d13;
        [[c(self.d11), w.conj(), w], [w, c(self.d22), z], [w.conj(), z, c(self.d22)]]
    }

    pub fn to_master(&self) -> Result<MasterEquationForm> {
        MasterEquationForm::qubit_dissipator(self.dissipation())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PauliParams {
    pub gamma: [f64; 3],
    pub tau: [f64; 3],
}

impl PauliParams {
    pub fn new(gamma: [f64; 3], tau: [f64; 3]) -> Self {
        Self { gamma, tau }
    }

    pub fn bloch(&self) -> Result<BlochAffineGenerator> {
        let [g1, g2, g3] = self.gamma;
        BlochAffineGenerator::new(Matrix3::from_diagonal(&Vector3::new(-g1, -g2, -g3)), Vector3::from(self.tau))
    }
}

pub fn x_cp(x: &XShapeParams) -> Check {
    let n = x.d23.norm_sqr();
    Check::eval(|e| ge(x.d11, 0.0, e) && ge(x.d22, 0.0, e) && ge(x.d33, 0.0, e) && ge(x.d22 * x.d33, n, e))
}

pub fn x_p(x: &XShapeParams) -> Check {
    let a = x.d23.norm();
    let check = Check::eval(|e| {
        ge(x.d22, 0.0, e)
            && ge(x.d33, 0.0, e)
            && (ge(x.d11, a, e) || ge(x.d22 * x.d33, (a - x.d11).powi(2), e))
    });
    debug_assert!(check.marginal || x_p_expanded(x) == check.holds, "X-class P criteria disagree for {x:?}");
    check
}

/// The unreduced form: `D22, D33 ≥ 0`, `D11 - |D23| + (D22 + D33)/2 ≥ 0`,
/// and `||D23| - D11| ≤ √(D22 D33)` when `D11 < |D23|`.
fn x_p_expanded(x: &XShapeParams) -> bool {
    let a = x.d23.norm();
    let e = CLASS_BAND;
    let base = ge(x.d22, 0.0, e) && ge(x.d33, 0.0, e) && ge(x.d11 - a + 0.5 * (x.d22 + x.d33), 0.0, e);
    if !base {
        return false;
    }
    if x.d11 < a {
        ge((x.d22 * x.d33).max(0.0).sqrt(), (a - x.d11).abs(), e)
    } else {
        true
    }
}

pub fn o_cp(o: &OShapeParams) -> Check {
    let n = o.d13.norm_sqr();
    Check::eval(|e| ge(o.d11, 0.0, e) && ge(o.d22, 0.0, e) && ge(o.d11 * o.d22, 2.0 * n, e))
}

pub fn o_p(o: &OShapeParams) -> Check {
    let n = o.d13.norm_sqr();
    Check::eval(|e| ge(3.0 * o.d22 + o.d11, 0.0, e) && ge(o.d22 * (o.d22 + o.d11), n, e))
}

/// Triangle conditions `|γi - γj| ≤ γk ≤ γi + γj`.
pub fn pauli_gamma_cp(gamma: [f64; 3]) -> Check {
    let [g1, g2, g3] = gamma;
    Check::eval(|e| {
        [(g1, g2, g3), (g2, g3, g1), (g3, g1, g2)]
            .iter()
            .all(|&(a, b, k)| ge(k, (a - b).abs(), e) && ge(a + b, k, e))
    })
}

/// `(γ1+γ2-γ3)(γ2+γ3-γ1)(γ3+γ1-γ2) - [(γ1+γ2-γ3)τ3² + (γ2+γ3-γ1)τ1² + (γ3+γ1-γ2)τ2²]`.
pub fn pauli_tau_slack(p: &PauliParams) -> f64 {
    let [g1, g2, g3] = p.gamma;
    let [t1, t2, t3] = p.tau;
    let (a, b, k) = (g1 + g2 - g3, g2 + g3 - g1, g3 + g1 - g2);
    a * b * k - (a * t3 * t3 + b * t1 * t1 + k * t2 * t2)
}

pub fn pauli_cp(p: &PauliParams) -> Check {
    let gamma = pauli_gamma_cp(p.gamma);
    let slack = pauli_tau_slack(p);
    let tau = Check::eval(|e| ge(slack, 0.0, e));
    Check { holds: gamma.holds && tau.holds, marginal: gamma.marginal || tau.marginal }
}

/// The two inequalities of the 2×2 minors containing `D11`:
/// `(γ1+γ2-γ3)(γ3 ∓ τ3) - |w|² ≥ 0` with `|w|² = (τ1² + τ2²)/2`.
pub fn pauli_tau12_slacks(p: &PauliParams) -> [f64; 2] {
    let [g1, g2, g3] = p.gamma;
    let [t1, t2, t3] = p.tau;
    let w2 = 0.5 * (t1 * t1 + t2 * t2);
    let a = g1 + g2 - g3;
    [a * (g3 - t3) - w2, a * (g3 + t3) - w2]
}

/// `γ3² - (γ2 - γ1)² - τ3²`, nonnegative iff `|τ3| ≤ √(γ3² - (γ2 - γ1)²)`.
pub fn pauli_tau3_slack(p: &PauliParams) -> f64 {
    let [g1, g2, g3] = p.gamma;
    g3 * g3 - (g2 - g1).powi(2) - p.tau[2].powi(2)
}

/// Unit vector `(sinθ cosβ, sinθ sinβ, cosθ)`.
pub fn sphere_point(theta: f64, beta: f64) -> Vector3<f64> {
    let (s, c) = theta.sin_cos();
    Vector3::new(s * beta.cos(), s * beta.sin(), c)
}

struct PauliForm {
    gamma: Vector3<f64>,
    tau: Vector3<f64>,
}

impl TorusObjective for PauliForm {
    fn value(&self, theta: f64, beta: f64) -> f64 {
        let e = sphere_point(theta, beta);
        e.dot(&(self.gamma.component_mul(&e) + self.tau))
    }
}

/// Minimum of `e·(γ e + τ)` over the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereMinimum {
    pub direction: Vector3<f64>,
    pub value: f64,
}

pub fn pauli_p_minimum(p: &PauliParams, opts: &MinimizerOptions) -> SphereMinimum {
    let form = PauliForm { gamma: Vector3::from(p.gamma), tau: Vector3::from(p.tau) };
    let m = torus::minimize(&form, opts);
    SphereMinimum { direction: sphere_point(m.theta, m.beta), value: m.value }
}

/// Positivity of a Pauli generator: `e·(γ e + τ) ≥ 0` on the unit sphere.
pub fn pauli_p(p: &PauliParams, opts: &MinimizerOptions) -> Check {
    let min = pauli_p_minimum(p, opts).value;
    Check { holds: min >= -opts.tol, marginal: min.abs() <= opts.tol }
}

/// Point of the boundary surface `τ = (e·γ e) e - 2 γ e` at direction
/// `e(θ, β)`.
pub fn pauli_p_boundary(gamma: [f64; 3], theta: f64, beta: f64) -> [f64; 3] {
    let e = sphere_point(theta, beta);
    let ge = Vector3::from(gamma).component_mul(&e);
    let tau = e * e.dot(&ge) - ge * 2.0;
    [tau[0], tau[1], tau[2]]
}

/// Whether `τ` lies in the closed ellipsoid `{γ e : |e| ≤ 1}`. Degenerate
/// axes (`γi = 0`) admit only `τi = 0`.
pub fn in_gamma_ellipsoid(gamma: [f64; 3], tau: [f64; 3], band: f64) -> bool {
    let mut sum = 0.0;
    for (g, t) in gamma.iter().zip(tau.iter()) {
        if g.abs() <= band {
            if t.abs() > band {
                return false;
            }
        } else {
            sum += (t / g).powi(2);
        }
    }
    sum <= 1.0 + band
}

pub fn pauli_to_master(p: &PauliParams) -> Result<MasterEquationForm> {
    Ok(bloch_to_master(&p.bloch()?))
}

/// Reads a qubit generator as a Pauli generator; fails when the Bloch matrix
/// has off-diagonal entries.
pub fn master_to_pauli(m: &MasterEquationForm) -> Result<PauliParams> {
    let b = master_to_bloch(m)?;
    let r = b.r();
    let mut deviation = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            if i != j {
                deviation = deviation.max(r[(i, j)].abs());
            }
        }
    }
    if deviation > PAULI_CLASS_TOL {
        return Err(Error::NotInPauliClass { deviation });
    }
    let t = b.t();
    Ok(PauliParams { gamma: [-r[(0, 0)], -r[(1, 1)], -r[(2, 2)]], tau: [t[0], t[1], t[2]] })
}

/// Entries of the Pauli dissipation matrix in closed form.
pub fn pauli_dissipation(p: &PauliParams) -> [[Complex64; 3]; 3] {
    let [g1, g2, g3] = p.gamma;
    let [t1, t2, t3] = p.tau;
    let d21 = Complex64::new(-t1, t2) / (2.0 * SQRT_2);
    let d23 = c(0.5 * (g2 - g1));
    [
        [c(0.5 * (g1 + g2 - g3)), d21.conj(), -d21],
        [d21, c(0.5 * (g3 + t3)), d23],
        [-d21.conj(), d23, c(0.5 * (g3 - t3))],
    ]
}
