//! Global minimization of smooth functions of two angles.
//!
//! The search is a uniform grid over `θ ∈ [0, π]`, `β ∈ [0, 2π)` followed by a
//! damped Newton refinement started from the best grid nodes. Objectives must
//! be 2π-periodic in both angles and satisfy
//! `f(θ, β) = f(2π - θ, β + π)`, which holds for any function of the pair of
//! orthogonal qubit states parametrized by `(θ, β)`; this lets iterates leave
//! `[0, π]` and be folded back at the end.

use std::f64::consts::{PI, TAU};

/// Value, gradient and Hessian at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

pub trait TorusObjective {
    fn value(&self, theta: f64, beta: f64) -> f64;

    /// Defaults to central differences; implementors with closed forms
    /// should override.
    fn derivatives(&self, theta: f64, beta: f64) -> Derivatives {
        let h = 1e-4;
        let f = |t, b| self.value(t, b);
        let f0 = f(theta, beta);
        let (ftp, ftm) = (f(theta + h, beta), f(theta - h, beta));
        let (fbp, fbm) = (f(theta, beta + h), f(theta, beta - h));
        let cross = (f(theta + h, beta + h) - f(theta + h, beta - h) - f(theta - h, beta + h)
            + f(theta - h, beta - h))
            / (4.0 * h * h);
        Derivatives {
            value: f0,
            grad: [(ftp - ftm) / (2.0 * h), (fbp - fbm) / (2.0 * h)],
            hess: [[(ftp - 2.0 * f0 + ftm) / (h * h), cross], [cross, (fbp - 2.0 * f0 + fbm) / (h * h)]],
        }
    }

    /// Fills `out[i * n_beta + j]` with the value at grid node `(i, j)`.
    /// The default calls [`TorusObjective::value`] per node.
    fn grid_values(&self, grid: &TorusGrid, out: &mut [f64]) {
        let nb = grid.n_beta();
        for (k, v) in out.iter_mut().enumerate() {
            *v = self.value(grid.theta(k / nb), grid.beta(k % nb));
        }
    }
}

/// Search configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerOptions {
    /// Grid nodes along θ (endpoints 0 and π included).
    pub grid_theta: usize,
    /// Grid nodes along β (2π excluded).
    pub grid_beta: usize,
    /// Number of best grid nodes refined locally.
    pub refine: usize,
    /// Stop refining once a step changes the value by less than this.
    pub ftol: f64,
    pub max_iterations: usize,
    /// Slack for the final `min ≥ -tol` decision.
    pub tol: f64,
}

impl Default for MinimizerOptions {
    fn default() -> Self {
        Self { grid_theta: 64, grid_beta: 64, refine: 8, ftol: 1e-12, max_iterations: 100, tol: 1e-9 }
    }
}

/// Precomputed angle tables for a grid.
#[derive(Debug, Clone)]
pub struct TorusGrid {
    thetas: Vec<f64>,
    betas: Vec<f64>,
    pub(crate) cos_theta: Vec<f64>,
    pub(crate) sin_theta: Vec<f64>,
    pub(crate) cos_beta: Vec<f64>,
    pub(crate) sin_beta: Vec<f64>,
    pub(crate) cos_2beta: Vec<f64>,
    pub(crate) sin_2beta: Vec<f64>,
}

impl TorusGrid {
    pub fn new(n_theta: usize, n_beta: usize) -> Self {
        let n_theta = n_theta.max(2);
        let n_beta = n_beta.max(1);
        let thetas: Vec<f64> = (0..n_theta).map(|i| PI * i as f64 / (n_theta - 1) as f64).collect();
        let betas: Vec<f64> = (0..n_beta).map(|j| TAU * j as f64 / n_beta as f64).collect();
        Self {
            cos_theta: thetas.iter().map(|t| t.cos()).collect(),
            sin_theta: thetas.iter().map(|t| t.sin()).collect(),
            cos_beta: betas.iter().map(|b| b.cos()).collect(),
            sin_beta: betas.iter().map(|b| b.sin()).collect(),
            cos_2beta: betas.iter().map(|b| (2.0 * b).cos()).collect(),
            sin_2beta: betas.iter().map(|b| (2.0 * b).sin()).collect(),
            thetas,
            betas,
        }
    }

    pub fn for_options(opts: &MinimizerOptions) -> Self {
        Self::new(opts.grid_theta, opts.grid_beta)
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_beta(&self) -> usize {
        self.betas.len()
    }

    pub fn theta(&self, i: usize) -> f64 {
        self.thetas[i]
    }

    pub fn beta(&self, j: usize) -> f64 {
        self.betas[j]
    }
}

/// Best point found by [`minimize`], folded into `θ ∈ [0, π]`, `β ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub theta: f64,
    pub beta: f64,
    pub value: f64,
}

/// Maps any angle pair onto the canonical ranges using 2π periodicity and
/// `(θ, β) ~ (2π - θ, β + π)`.
pub fn fold(theta: f64, beta: f64) -> (f64, f64) {
    let mut t = theta.rem_euclid(TAU);
    let mut b = beta;
    if t > PI {
        t = TAU - t;
        b += PI;
    }
    let mut b = b.rem_euclid(TAU);
    if b >= TAU {
        b = 0.0;
    }
    (t, b)
}

pub fn minimize<O: TorusObjective + ?Sized>(objective: &O, opts: &MinimizerOptions) -> Minimum {
    minimize_on(objective, &TorusGrid::for_options(opts), opts)
}

/// Like [`minimize`] with a caller-owned grid, for repeated searches.
pub fn minimize_on<O: TorusObjective + ?Sized>(objective: &O, grid: &TorusGrid, opts: &MinimizerOptions) -> Minimum {
    let (nt, nb) = (grid.n_theta(), grid.n_beta());
    let mut values = vec![0.0; nt * nb];
    objective.grid_values(grid, &mut values);
    // Keep the k best nodes, ordered by value then index so the result never
    // depends on evaluation order.
    let k = opts.refine.clamp(1, values.len());
    let mut nodes: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (idx, &value) in values.iter().enumerate() {
        if nodes.len() == k && !(value < nodes[k - 1].0) {
            continue;
        }
        let pos = nodes.partition_point(|&(v, i)| v.total_cmp(&value).then(i.cmp(&idx)).is_lt());
        nodes.insert(pos, (value, idx));
        nodes.truncate(k);
    }

    let (v0, idx0) = nodes[0];
    let mut best = Minimum { theta: grid.theta(idx0 / nb), beta: grid.beta(idx0 % nb), value: v0 };
    for &(value, idx) in nodes.iter().take(opts.refine) {
        let start = (grid.theta(idx / nb), grid.beta(idx % nb));
        let refined = refine(objective, start, value, opts);
        if refined.value < best.value {
            best = refined;
        }
    }
    let (theta, beta) = fold(best.theta, best.beta);
    Minimum { theta, beta, value: best.value }
}

/// Damped modified Newton descent. The Hessian eigenvalues are replaced by
/// their absolute values, floored relative to the largest, so flat and
/// negatively curved directions get bounded descent steps. Backtracking
/// guarantees monotone progress.
fn refine<O: TorusObjective + ?Sized>(objective: &O, start: (f64, f64), start_value: f64, opts: &MinimizerOptions) -> Minimum {
    let (mut t, mut b) = start;
    let mut f = start_value;
    for _ in 0..opts.max_iterations {
        let dv = objective.derivatives(t, b);
        let [gt, gb] = dv.grad;
        let gnorm = gt.hypot(gb);
        if gnorm < 1e-15 {
            break;
        }
        let (mut st, mut sb) = newton_step(dv.hess, dv.grad);
        // Cap the step so one iteration stays near the starting basin.
        let len = st.hypot(sb);
        if len > 0.5 {
            st *= 0.5 / len;
            sb *= 0.5 / len;
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        while alpha > 1e-10 {
            let (nt, nb) = (t + alpha * st, b + alpha * sb);
            let nf = objective.value(nt, nb);
            if nf < f {
                accepted = Some((nt, nb, nf));
                break;
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((nt, nb, nf)) => {
                let gain = f - nf;
                t = nt;
                b = nb;
                f = nf;
                if gain < opts.ftol {
                    break;
                }
            }
            None => break,
        }
    }
    Minimum { theta: t, beta: b, value: f }
}

fn newton_step(hess: [[f64; 2]; 2], grad: [f64; 2]) -> (f64, f64) {
    let [[a, c], [_, e]] = hess;
    let phi = 0.5 * (2.0 * c).atan2(a - e);
    let (sp, cp) = phi.sin_cos();
    let l1 = a * cp * cp + 2.0 * c * sp * cp + e * sp * sp;
    let l2 = a * sp * sp - 2.0 * c * sp * cp + e * cp * cp;
    let floor = 1e-8 * l1.abs().max(l2.abs()).max(f64::MIN_POSITIVE);
    let g1 = cp * grad[0] + sp * grad[1];
    let g2 = -sp * grad[0] + cp * grad[1];
    let (s1, s2) = (-g1 / l1.abs().max(floor), -g2 / l2.abs().max(floor));
    (cp * s1 - sp * s2, sp * s1 + cp * s2)
}
