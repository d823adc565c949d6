//! Two-dimensional parameter scans of the class families.
//!
//! Each cell builds the class generator and runs the general local CP and
//! local P tests on it, so scans can be compared cell by cell against the
//! closed-form class criteria.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::{OShapeParams, PauliParams, XShapeParams};
use crate::engine::{classify_on, ClassifyOptions};
use crate::error::{Error, Result};
use crate::repr::MasterEquationForm;
use crate::torus::TorusGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanClass {
    X,
    O,
    PauliGamma,
    PauliTau,
}

const X_PARAMS: &[&str] = &["d11", "d22", "d33", "d23"];
const O_PARAMS: &[&str] = &["d11", "d22", "d13"];
const PAULI_PARAMS: &[&str] = &["g1", "g2", "g3", "t1", "t2", "t3"];

impl ScanClass {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "x" => Ok(ScanClass::X),
            "o" => Ok(ScanClass::O),
            "pauli-gamma" => Ok(ScanClass::PauliGamma),
            "pauli-tau" => Ok(ScanClass::PauliTau),
            other => Err(Error::InvalidInput(format!("unknown scan class `{other}`"))),
        }
    }

    /// All parameter names of the class. `d23` and `d13` are the (real)
    /// off-diagonal magnitudes; the criteria depend on nothing else.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            ScanClass::X => X_PARAMS,
            ScanClass::O => O_PARAMS,
            ScanClass::PauliGamma | ScanClass::PauliTau => PAULI_PARAMS,
        }
    }

    fn axis_allowed(self, name: &str) -> bool {
        match self {
            ScanClass::PauliGamma => name.starts_with('g'),
            ScanClass::PauliTau => name.starts_with('t'),
            _ => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, steps: usize) -> Self {
        Self { name: name.to_string(), min, max, steps }
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
    }

    /// Parses `name=min:max:steps`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("axis `{text}` must look like name=min:max:steps"));
        let (name, range) = text.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let min = parts[0].trim().parse().map_err(|_| bad())?;
        let max = parts[1].trim().parse().map_err(|_| bad())?;
        let steps = parts[2].trim().parse().map_err(|_| bad())?;
        Ok(Self::new(name.trim(), min, max, steps))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionScanSpec {
    pub class: ScanClass,
    pub fixed: BTreeMap<String, f64>,
    pub axes: [Axis; 2],
}

/// Concrete class instance at one cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassInstance {
    X(XShapeParams),
    O(OShapeParams),
    Pauli(PauliParams),
}

impl ClassInstance {
    pub fn to_master(&self) -> Result<MasterEquationForm> {
        match self {
            ClassInstance::X(x) => x.to_master(),
            ClassInstance::O(o) => o.to_master(),
            ClassInstance::Pauli(p) => crate::classes::pauli_to_master(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanRow {
    pub a1: f64,
    pub a2: f64,
    pub cp: bool,
    pub p: bool,
    /// Smallest eigenvalue of `D`.
    pub margin_cp: f64,
    /// Minimum of `2p` over the torus.
    pub margin_p: f64,
    pub cp_marginal: bool,
    pub p_marginal: bool,
}

impl RegionScanSpec {
    pub fn new(class: ScanClass, fixed: &[(&str, f64)], axes: [Axis; 2]) -> Result<Self> {
        let spec = Self { class, fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(), axes };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let names = self.class.parameters();
        for axis in &self.axes {
            if !names.contains(&axis.name.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "axis `{}` is not a parameter of this class (expected one of {names:?})",
                    axis.name
                )));
            }
            if !self.class.axis_allowed(&axis.name) {
                return Err(Error::InvalidInput(format!("axis `{}` cannot be scanned in this class", axis.name)));
            }
            if axis.steps < 2 {
                return Err(Error::InvalidInput(format!("axis `{}` needs at least 2 steps", axis.name)));
            }
            if !(axis.min.is_finite() && axis.max.is_finite() && axis.min < axis.max) {
                return Err(Error::InvalidInput(format!("axis `{}` needs finite min < max", axis.name)));
            }
        }
        if self.axes[0].name == self.axes[1].name {
            return Err(Error::InvalidInput("scan axes must be distinct".into()));
        }
        for (name, value) in &self.fixed {
            if !names.contains(&name.as_str()) {
                return Err(Error::InvalidInput(format!("fixed parameter `{name}` is not a parameter of this class")));
            }
            if self.axes.iter().any(|a| &a.name == name) {
                return Err(Error::InvalidInput(format!("parameter `{name}` is both fixed and scanned")));
            }
            if !value.is_finite() {
                return Err(Error::InvalidInput(format!("fixed parameter `{name}` is not finite")));
            }
        }
        for name in names {
            if !self.fixed.contains_key(*name) && self.axes.iter().all(|a| a.name != *name) {
                return Err(Error::InvalidInput(format!("parameter `{name}` is neither fixed nor scanned")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.axes[0].steps * self.axes[1].steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis values of cell `(i, j)`.
    pub fn coordinates(&self, i: usize, j: usize) -> (f64, f64) {
        (self.axes[0].value(i), self.axes[1].value(j))
    }

    pub fn instance(&self, i: usize, j: usize) -> ClassInstance {
        let (a1, a2) = self.coordinates(i, j);
        let get = |name: &str| {
            if self.axes[0].name == name {
                a1
            } else if self.axes[1].name == name {
                a2
            } else {
                self.fixed[name]
            }
        };
        let re = |v: f64| Complex64::new(v, 0.0);
        match self.class {
            ScanClass::X => ClassInstance::X(XShapeParams::new(get("d11"), get("d22"), get("d33"), re(get("d23")))),
            ScanClass::O => ClassInstance::O(OShapeParams::new(get("d11"), get("d22"), re(get("d13")))),
            ScanClass::PauliGamma | ScanClass::PauliTau => ClassInstance::Pauli(PauliParams::new(
                [get("g1"), get("g2"), get("g3")],
                [get("t1"), get("t2"), get("t3")],
            )),
        }
    }
}

/// Evaluates every cell; rows are ordered axis-1 major. The result does not
/// depend on the number of worker threads.
pub fn run_scan(spec: &RegionScanSpec, opts: &ClassifyOptions) -> Result<Vec<ScanRow>> {
    spec.validate()?;
    let grid = TorusGrid::for_options(&opts.minimizer);
    let n2 = spec.axes[1].steps;
    (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n2, k % n2);
            let (a1, a2) = spec.coordinates(i, j);
            let m = spec.instance(i, j).to_master()?;
            let v = classify_on(&m, &grid, opts)?;
            let w = v.p_witness.expect("qubit classification carries a P witness");
            Ok(ScanRow {
                a1,
                a2,
                cp: v.locally_cp,
                p: v.locally_p,
                margin_cp: v.min_eigenvalue,
                margin_p: w.two_p,
                cp_marginal: v.cp_marginal,
                p_marginal: v.p_marginal,
            })
        })
        .collect()
}
