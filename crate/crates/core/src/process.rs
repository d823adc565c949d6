//! Generator extraction from sampled processes and divisibility sweeps.
//!
//! A trace is a list of superoperators `Λ_{t_k}` (see [`crate::superop`] for
//! the layout). The generator at each sample is `L = Λ̇ Λ⁻¹`, with `Λ̇` from
//! second-order finite differences: three-point central differences in the
//! interior and three-point one-sided differences at the ends. The sweep only
//! classifies the sampled skeleton; nothing is certified between samples.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{classify_on, local_cp, ClassifyOptions, PWitness};
use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, MinorWitness};
use crate::repr::{canonical_form, GeneratorChoiMatrix, MasterEquationForm};
use crate::superop;
use crate::torus::TorusGrid;

/// Trace-preservation tolerance for sampled maps.
pub const MAP_TRACE_TOL: f64 = 1e-8;

/// Default condition-number limit for `Λ_t`.
pub const DEFAULT_KAPPA_MAX: f64 = 1e8;

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessTrace {
    dim: usize,
    times: Vec<f64>,
    maps: Vec<DMatrix<Complex64>>,
}

impl ProcessTrace {
    pub fn new(dim: usize, times: Vec<f64>, maps: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("process dimension must be at least 2, got {dim}")));
        }
        if times.len() != maps.len() {
            return Err(Error::InvalidInput(format!("{} times but {} maps", times.len(), maps.len())));
        }
        if times.len() < 3 {
            return Err(Error::InvalidInput("a trace needs at least 3 samples".into()));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidInput(format!("first time must be 0, got {}", times[0])));
        }
        if let Some(k) = times.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::InvalidInput(format!("times must be strictly increasing (index {})", k + 1)));
        }
        let n = dim * dim;
        for (k, m) in maps.iter().enumerate() {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidInput(format!("map {k} is {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
            }
            if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidInput(format!("map {k} has non-finite entries")));
            }
            let defect = superop::map_trace_defect(m, dim);
            if defect > MAP_TRACE_TOL {
                return Err(Error::InvalidInput(format!(
                    "map {k} is not trace preserving (defect {defect:e})"
                )));
            }
        }
        if maps[0] != DMatrix::identity(n, n) {
            return Err(Error::InvalidInput("first map must be the identity".into()));
        }
        Ok(Self { dim, times, maps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn maps(&self) -> &[DMatrix<Complex64>] {
        &self.maps
    }
}

/// Three-point weights for `f'(t_index)`.
fn derivative_weights(t: &[f64], index: usize) -> ([usize; 3], [f64; 3]) {
    let last = t.len() - 1;
    if index == 0 {
        let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
        let w = [-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))];
        ([0, 1, 2], w)
    } else if index == last {
        let (h1, h2) = (t[last - 1] - t[last - 2], t[last] - t[last - 1]);
        let w = [h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (h1 + 2.0 * h2) / (h2 * (h1 + h2))];
        ([last - 2, last - 1, last], w)
    } else {
        let (h1, h2) = (t[index] - t[index - 1], t[index + 1] - t[index]);
        let w = [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))];
        ([index - 1, index, index + 1], w)
    }
}

/// Superoperator of `L_t` at sample `index`.
pub fn generator_superoperator_at(trace: &ProcessTrace, index: usize, kappa_max: f64) -> Result<DMatrix<Complex64>> {
    Ok(difference_quotient(trace, index, kappa_max)?.0)
}

/// `L_t` together with an estimate of its round-off level.
fn difference_quotient(trace: &ProcessTrace, index: usize, kappa_max: f64) -> Result<(DMatrix<Complex64>, f64)> {
    if index >= trace.len() {
        return Err(Error::InvalidInput(format!("sample index {index} out of range (len {})", trace.len())));
    }
    let time = trace.times[index];
    let lambda = &trace.maps[index];
    let sv = lambda.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition < kappa_max) {
        return Err(Error::SingularProcess { time, condition });
    }
    let (idx, w) = derivative_weights(&trace.times, index);
    let n = lambda.nrows();
    let mut dot = DMatrix::<Complex64>::zeros(n, n);
    let mut magnitude = 0.0;
    for (k, wk) in idx.iter().zip(w) {
        dot += trace.maps[*k].scale(wk);
        magnitude += wk.abs() * trace.maps[*k].iter().map(|z| z.norm()).fold(0.0, f64::max);
    }
    let noise = 16.0 * f64::EPSILON * condition * magnitude;
    // L Λ = Λ̇  ⇔  Λᵀ Lᵀ = Λ̇ᵀ
    let lt = lambda
        .transpose()
        .lu()
        .solve(&dot.transpose())
        .ok_or(Error::SingularProcess { time, condition })?;
    Ok((lt.transpose(), noise))
}

/// Choi matrix of `L_t` at sample `index`, hermitized and with the small
/// block-trace residual of the difference quotient projected out. Entries
/// at the round-off level of the quotient are set to zero.
pub fn generator_at(trace: &ProcessTrace, index: usize, kappa_max: f64) -> Result<GeneratorChoiMatrix> {
    let d = trace.dim;
    let (s, noise) = difference_quotient(trace, index, kappa_max)?;
    let c = superop::choi_from_superoperator(&s, d);
    let mut c = (&c + c.adjoint()).scale(0.5);
    for z in c.iter_mut() {
        if z.re.abs() <= noise {
            z.re = 0.0;
        }
        if z.im.abs() <= noise {
            z.im = 0.0;
        }
    }
    for i in 0..d {
        for j in 0..d {
            let tr: Complex64 = (0..d).map(|k| c[(i * d + k, j * d + k)]).sum();
            let shift = tr / d as f64;
            for k in 0..d {
                c[(i * d + k, j * d + k)] -= shift;
            }
        }
    }
    GeneratorChoiMatrix::new(d, c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub classify: ClassifyOptions,
    pub kappa_max: f64,
    /// Bisection steps when locating a crossing.
    pub bisection_steps: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { classify: ClassifyOptions::default(), kappa_max: DEFAULT_KAPPA_MAX, bisection_steps: 60 }
    }
}

/// Local verdict at one sample. P fields are absent for `d > 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleVerdict {
    pub t: f64,
    pub locally_cp: bool,
    pub locally_p: Option<bool>,
    pub min_eig_d: f64,
    pub min_p: Option<f64>,
    pub cp_marginal: bool,
    pub p_marginal: bool,
    #[serde(skip)]
    pub cp_witness: Option<MinorWitness>,
    #[serde(skip)]
    pub p_witness: Option<PWitness>,
}

impl SampleVerdict {
    pub fn label(&self) -> &'static str {
        match (self.locally_cp, self.locally_p) {
            (true, _) => "cp",
            (false, Some(true)) => "p-not-cp",
            (false, Some(false)) => "not-p",
            (false, None) => "not-cp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessClass {
    CpDivisible,
    PDivisibleNotCp,
    Neither,
    /// Not CP-divisible, P-divisibility untested (`d > 2`).
    NotCpDivisible,
}

impl ProcessClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ProcessClass::CpDivisible => "cp-divisible",
            ProcessClass::PDivisibleNotCp => "p-divisible-not-cp",
            ProcessClass::Neither => "neither",
            ProcessClass::NotCpDivisible => "not-cp-divisible",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Property {
    Cp,
    P,
}

/// A change of a local property between two adjacent samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Crossing {
    pub property: Property,
    pub time: f64,
    /// `true` when the property holds after the crossing.
    pub gained: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub dim: usize,
    pub summary: ProcessClass,
    pub crossings: Vec<Crossing>,
    pub samples: Vec<SampleVerdict>,
}

fn sample_verdict(m: &MasterEquationForm, t: f64, grid: &TorusGrid, opts: &SweepOptions) -> Result<SampleVerdict> {
    if m.dim() == 2 {
        let v = classify_on(m, grid, &opts.classify)?;
        Ok(SampleVerdict {
            t,
            locally_cp: v.locally_cp,
            locally_p: Some(v.locally_p),
            min_eig_d: v.min_eigenvalue,
            min_p: v.p_witness.map(|w| w.two_p),
            cp_marginal: v.cp_marginal,
            p_marginal: v.p_marginal,
            cp_witness: v.cp_witness,
            p_witness: v.p_witness,
        })
    } else {
        let cp = local_cp(m, opts.classify.psd_tol)?;
        Ok(SampleVerdict {
            t,
            locally_cp: cp.locally_cp,
            locally_p: None,
            min_eig_d: cp.min_eigenvalue,
            min_p: None,
            cp_marginal: cp.marginal,
            p_marginal: false,
            cp_witness: cp.cp_witness,
            p_witness: None,
        })
    }
}

fn holds(v: &SampleVerdict, property: Property) -> Option<bool> {
    match property {
        Property::Cp => Some(v.locally_cp),
        Property::P => v.locally_p,
    }
}

/// Bisects on the local verdict of `D` interpolated linearly between two
/// samples.
fn locate_crossing(
    a: &MasterEquationForm,
    b: &MasterEquationForm,
    (ta, tb): (f64, f64),
    property: Property,
    grid: &TorusGrid,
    opts: &SweepOptions,
) -> Result<f64> {
    let at = |s: f64| -> Result<bool> {
        let d = a.dissipation().lerp(b.dissipation(), s)?;
        let m = MasterEquationForm::with_basis(HermitianMatrix::zeros(a.dim()), d, a.basis().clone())?;
        let v = sample_verdict(&m, 0.0, grid, opts)?;
        Ok(holds(&v, property).unwrap_or(false))
    };
    let start = at(0.0)?;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..opts.bisection_steps {
        let mid = 0.5 * (lo + hi);
        if at(mid)? == start {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ta + 0.5 * (lo + hi) * (tb - ta))
}

/// Extracts the generator at every sample and classifies it.
pub fn sweep(trace: &ProcessTrace, opts: &SweepOptions) -> Result<SweepReport> {
    let grid = TorusGrid::for_options(&opts.classify.minimizer);
    let forms: Vec<MasterEquationForm> = (0..trace.len())
        .into_par_iter()
        .map(|k| canonical_form(&generator_at(trace, k, opts.kappa_max)?))
        .collect::<Result<_>>()?;
    let samples: Vec<SampleVerdict> = forms
        .par_iter()
        .zip(trace.times.par_iter())
        .map(|(m, &t)| sample_verdict(m, t, &grid, opts))
        .collect::<Result<_>>()?;

    let mut crossings = Vec::new();
    for k in 0..samples.len() - 1 {
        for property in [Property::Cp, Property::P] {
            let (Some(x), Some(y)) = (holds(&samples[k], property), holds(&samples[k + 1], property)) else {
                continue;
            };
            if x != y {
                let span = (trace.times[k], trace.times[k + 1]);
                let time = locate_crossing(&forms[k], &forms[k + 1], span, property, &grid, opts)?;
                crossings.push(Crossing { property, time, gained: y });
            }
        }
    }

    let all_cp = samples.iter().all(|s| s.locally_cp);
    let summary = if all_cp {
        ProcessClass::CpDivisible
    } else if trace.dim != 2 {
        ProcessClass::NotCpDivisible
    } else if samples.iter().all(|s| s.locally_p == Some(true)) {
        ProcessClass::PDivisibleNotCp
    } else {
        ProcessClass::Neither
    };
    Ok(SweepReport { dim: trace.dim, summary, crossings, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn identity_process_has_zero_generator() {
        let n = 4;
        let maps = vec![DMatrix::<Complex64>::identity(n, n); 5];
        let trace = ProcessTrace::new(2, vec![0.0, 0.1, 0.2, 0.3, 0.4], maps).unwrap();
        for k in 0..trace.len() {
            let c = generator_at(&trace, k, DEFAULT_KAPPA_MAX).unwrap();
            assert!(c.matrix().max_abs_entry() < 1e-12);
        }
        let report = sweep(&trace, &SweepOptions::default()).unwrap();
        assert_eq!(report.summary, ProcessClass::CpDivisible);
        assert!(report.crossings.is_empty());
    }

    #[test]
    fn trace_validation() {
        let id = DMatrix::<Complex64>::identity(4, 4);
        assert!(ProcessTrace::new(2, vec![0.0, 0.1], vec![id.clone(); 2]).is_err());
        assert!(ProcessTrace::new(2, vec![0.0, 0.2, 0.1], vec![id.clone(); 3]).is_err());
        assert!(ProcessTrace::new(2, vec![0.1, 0.2, 0.3], vec![id.clone(); 3]).is_err());
        let mut bad = id.clone();
        bad[(0, 0)] = Complex64::new(0.9, 0.0);
        assert!(ProcessTrace::new(2, vec![0.0, 0.1, 0.2], vec![id.clone(), bad, id.clone()]).is_err());
        assert!(ProcessTrace::new(2, vec![0.0, 0.1, 0.2], vec![id.scale(2.0), id.clone(), id]).is_err());
    }

    #[test]
    fn singular_map_is_reported_with_time() {
        // Complete depolarization at t = 0.2 is not invertible.
        let mut trace = presets::pauli_decay([1.0, 1.0, 1.0], &presets::uniform_times(0.4, 4)).unwrap();
        let dep = presets::bloch_affine_map(&nalgebra::Matrix3::zeros(), &nalgebra::Vector3::zeros());
        trace.maps[2] = dep;
        match generator_at(&trace, 2, DEFAULT_KAPPA_MAX) {
            Err(Error::SingularProcess { time, .. }) => assert_eq!(time, 0.2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(sweep(&trace, &SweepOptions::default()), Err(Error::SingularProcess { .. })));
    }

    #[test]
    fn nonuniform_weights_are_exact_for_quadratics() {
        let t = [0.0, 0.1, 0.35, 0.5, 0.9];
        let f = |x: f64| 3.0 * x * x - 2.0 * x + 1.0;
        let df = |x: f64| 6.0 * x - 2.0;
        for index in 0..t.len() {
            let (idx, w) = derivative_weights(&t, index);
            let approx: f64 = idx.iter().zip(w).map(|(&k, wk)| wk * f(t[k])).sum();
            assert!((approx - df(t[index])).abs() < 1e-12, "index {index}");
        }
    }
}
