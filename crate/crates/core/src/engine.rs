//! Local complete positivity and local positivity of a generator at a fixed
//! time.
//!
//! Local CP is `D ≥ 0`, decided by the principal-minor test (eigenvalues
//! supply the margin). Local P for a qubit is `p(θ, β) ≥ 0` on the whole
//! torus of orthogonal state pairs, where in terms of `D`
//!
//! ```text
//! 2p(θ,β) = R + S cosθ + (D11 - R/2) sin²θ
//!         + Re[ -D23 e^{-2iβ} sinθ + √2 (D21 - D13) e^{-iβ}
//!               - √2 (D21 + D13) e^{-iβ} cosθ ] sinθ
//! ```
//!
//! with `R = D22 + D33`, `S = D33 - D22`. `H` does not enter. The angles are
//! related to the states `|ψ⟩ = (cos θ'/2, e^{iβ'} sin θ'/2)`,
//! `|φ⟩ = (-sin θ'/2, e^{iβ'} cos θ'/2)` through `θ' = π - θ`, `β' = π - β`;
//! since that is a bijection of the torus the minimum is the same.

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitian::{eigen_psd, sylvester_psd, MinorWitness, MAX_MINOR_DIM};
use crate::repr::MasterEquationForm;
use crate::torus::{self, Derivatives, MinimizerOptions, TorusGrid, TorusObjective};

/// Default slack of the PSD test on `D`.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// A pair of orthogonal qubit states, `θ ∈ [0, π]`, `β ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    theta: f64,
    beta: f64,
}

impl TorusPoint {
    pub fn new(theta: f64, beta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) || !(0.0..TAU).contains(&beta) {
            return Err(Error::InvalidInput(format!(
                "torus point out of range: theta = {theta}, beta = {beta}"
            )));
        }
        Ok(Self { theta, beta })
    }

    /// Folds arbitrary angles onto the canonical ranges.
    pub fn wrapped(theta: f64, beta: f64) -> Self {
        let (theta, beta) = torus::fold(theta, beta);
        Self { theta, beta }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Coefficients of `2p(θ, β)` for one dissipation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityForm {
    r: f64,
    s: f64,
    k: f64,
    d23: Complex64,
    a: Complex64,
    b: Complex64,
}

impl PositivityForm {
    pub fn new(d: &[[Complex64; 3]; 3]) -> Self {
        let r = d[1][1].re + d[2][2].re;
        Self {
            r,
            s: d[2][2].re - d[1][1].re,
            k: d[0][0].re - 0.5 * r,
            d23: d[1][2],
            a: (d[1][0] - d[0][2]) * SQRT_2,
            b: (d[1][0] + d[0][2]) * SQRT_2,
        }
    }

    pub fn from_master(m: &MasterEquationForm) -> Result<Self> {
        Ok(Self::new(&m.qubit_dissipation()?))
    }

    #[inline]
    fn eval_trig(&self, c: f64, s: f64, cb: f64, sb: f64, c2b: f64, s2b: f64) -> f64 {
        let u = -(self.d23.re * c2b + self.d23.im * s2b);
        let v = self.a.re * cb + self.a.im * sb;
        let w = self.b.re * cb + self.b.im * sb;
        self.r + self.s * c + (self.k + u) * s * s + v * s - w * s * c
    }

    /// `2p(θ, β)`.
    pub fn two_p(&self, theta: f64, beta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let (s2b, c2b) = (2.0 * beta).sin_cos();
        self.eval_trig(c, s, cb, sb, c2b, s2b)
    }
}

impl TorusObjective for PositivityForm {
    fn value(&self, theta: f64, beta: f64) -> f64 {
        self.two_p(theta, beta)
    }

    fn grid_values(&self, g: &TorusGrid, out: &mut [f64]) {
        let nb = g.n_beta();
        let columns: Vec<[f64; 3]> = (0..nb)
            .map(|j| {
                let u = -(self.d23.re * g.cos_2beta[j] + self.d23.im * g.sin_2beta[j]);
                let v = self.a.re * g.cos_beta[j] + self.a.im * g.sin_beta[j];
                let w = self.b.re * g.cos_beta[j] + self.b.im * g.sin_beta[j];
                [self.k + u, v, w]
            })
            .collect();
        for (row, (&c, &s)) in out.chunks_mut(nb).zip(g.cos_theta.iter().zip(&g.sin_theta)) {
            let (base, ss, sc) = (self.r + self.s * c, s * s, s * c);
            for (v, [ku, vb, wb]) in row.iter_mut().zip(&columns) {
                *v = base + ku * ss + vb * s - wb * sc;
            }
        }
    }

    fn derivatives(&self, theta: f64, beta: f64) -> Derivatives {
        let (s, c) = theta.sin_cos();
        let (sb, cb) = beta.sin_cos();
        let (s2b, c2b) = (2.0 * beta).sin_cos();
        let (x, y) = (self.d23.re, self.d23.im);
        let u = -(x * c2b + y * s2b);
        let u_b = 2.0 * x * s2b - 2.0 * y * c2b;
        let v = self.a.re * cb + self.a.im * sb;
        let v_b = -self.a.re * sb + self.a.im * cb;
        let w = self.b.re * cb + self.b.im * sb;
        let w_b = -self.b.re * sb + self.b.im * cb;
        let ku = self.k + u;
        let (ss, cc, sc) = (s * s, c * c, s * c);
        Derivatives {
            value: self.r + self.s * c + ku * ss + v * s - w * sc,
            grad: [
                -self.s * s + 2.0 * ku * sc + v * c - w * (cc - ss),
                u_b * ss + v_b * s - w_b * sc,
            ],
            hess: {
                let tt = -self.s * c + 2.0 * ku * (cc - ss) - v * s + 4.0 * w * sc;
                let bb = -4.0 * u * ss - v * s + w * sc;
                let tb = 2.0 * u_b * sc + v_b * c - w_b * (cc - ss);
                [[tt, tb], [tb, bb]]
            },
        }
    }
}

/// Returns `2p(θ, β)` for a qubit generator.
pub fn p_value(m: &MasterEquationForm, pt: TorusPoint) -> Result<f64> {
    Ok(PositivityForm::from_master(m)?.two_p(pt.theta, pt.beta))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalCp {
    pub locally_cp: bool,
    pub cp_witness: Option<MinorWitness>,
    /// Smallest eigenvalue of `D`.
    pub min_eigenvalue: f64,
    /// `|λ_min|` lies inside the tolerance band.
    pub marginal: bool,
}

/// `D ≥ 0` via principal minors. Dissipation matrices larger than the minor
/// cap (`d > 2`) fall back to the eigenvalue route.
pub fn local_cp(m: &MasterEquationForm, tol: f64) -> Result<LocalCp> {
    let d = m.dissipation();
    let eig = eigen_psd(d, tol)?;
    let band = tol * d.max_abs_entry();
    let (locally_cp, cp_witness) = if d.dim() <= MAX_MINOR_DIM {
        let syl = sylvester_psd(d, tol)?;
        (syl.is_psd, syl.witness)
    } else {
        (eig.is_psd, None)
    };
    Ok(LocalCp {
        locally_cp,
        cp_witness,
        min_eigenvalue: eig.min_eigenvalue,
        marginal: eig.min_eigenvalue.abs() <= band,
    })
}

/// Best point of the torus search together with `2p` there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PWitness {
    pub point: TorusPoint,
    pub two_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalP {
    pub locally_p: bool,
    pub p_witness: PWitness,
    pub marginal: bool,
}

/// Slack on `min 2p`: `2 * tol * max(1, max|D_ij|)`, i.e. `tol` on `p`
/// itself, scaled up for large rates so that `D ≥ 0` within the PSD slack
/// always passes.
pub fn p_slack(m: &MasterEquationForm, tol: f64) -> f64 {
    2.0 * tol * m.dissipation().max_abs_entry().max(1.0)
}

/// Local positivity by global minimization of `2p` over the torus.
pub fn local_p(m: &MasterEquationForm, opts: &MinimizerOptions) -> Result<LocalP> {
    local_p_on(m, &TorusGrid::for_options(opts), opts)
}

/// [`local_p`] with a reusable grid.
pub fn local_p_on(m: &MasterEquationForm, grid: &TorusGrid, opts: &MinimizerOptions) -> Result<LocalP> {
    let form = PositivityForm::from_master(m)?;
    let min = torus::minimize_on(&form, grid, opts);
    let slack = p_slack(m, opts.tol);
    Ok(LocalP {
        locally_p: min.value >= -slack,
        p_witness: PWitness { point: TorusPoint { theta: min.theta, beta: min.beta }, two_p: min.value },
        marginal: min.value.abs() <= slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    pub psd_tol: f64,
    pub minimizer: MinimizerOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { psd_tol: DEFAULT_PSD_TOL, minimizer: MinimizerOptions::default() }
    }
}

/// Outcome of the local tests at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct DivisibilityVerdict {
    pub locally_cp: bool,
    pub locally_p: bool,
    pub cp_witness: Option<MinorWitness>,
    pub p_witness: Option<PWitness>,
    pub min_eigenvalue: f64,
    pub cp_marginal: bool,
    pub p_marginal: bool,
}

impl DivisibilityVerdict {
    pub fn class(&self) -> VerdictClass {
        match (self.locally_cp, self.locally_p) {
            (true, _) => VerdictClass::Cp,
            (false, true) => VerdictClass::PNotCp,
            (false, false) => VerdictClass::NotP,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictClass {
    Cp,
    PNotCp,
    NotP,
}

impl VerdictClass {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictClass::Cp => "cp",
            VerdictClass::PNotCp => "p-not-cp",
            VerdictClass::NotP => "not-p",
        }
    }
}

/// Runs both local tests on a qubit generator.
pub fn classify(m: &MasterEquationForm, opts: &ClassifyOptions) -> Result<DivisibilityVerdict> {
    classify_on(m, &TorusGrid::for_options(&opts.minimizer), opts)
}

pub fn classify_on(m: &MasterEquationForm, grid: &TorusGrid, opts: &ClassifyOptions) -> Result<DivisibilityVerdict> {
    m.require_qubit()?;
    let cp = local_cp(m, opts.psd_tol)?;
    let p = local_p_on(m, grid, &opts.minimizer)?;
    if cp.locally_cp && !p.locally_p {
        return Err(Error::InternalConsistency(format!(
            "generator passed the CP test but min 2p = {:e}",
            p.p_witness.two_p
        )));
    }
    Ok(DivisibilityVerdict {
        locally_cp: cp.locally_cp,
        locally_p: p.locally_p,
        cp_witness: cp.cp_witness,
        p_witness: Some(p.p_witness),
        min_eigenvalue: cp.min_eigenvalue,
        cp_marginal: cp.marginal,
        p_marginal: p.marginal,
    })
}
