//! JSON file formats.
//!
//! `generator-v1` holds one generator, tagged by `"form"`:
//!
//! ```json
//! {"form": "choi",   "q1": 0.0, "q2": 0.0, "y1": [0, 0], "y2": [0, 0],
//!                    "x": [0, 0], "z1": [0, 0], "z2": [0, 0]}
//! {"form": "master", "h": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]],
//!                    "d": [[[1, 0], [0, 0], [0, 0]], ...]}
//! {"form": "bloch",  "r": [[0, 0, 0], [0, 0, 0], [0, 0, 0]], "t": [0, 0, 0]}
//! {"form": "pauli",  "gamma": [1, 1, 1], "tau": [0, 0, 0]}
//! ```
//!
//! Complex numbers are `[re, im]`, matrices are row-major nested arrays.
//! `master` accepts any dimension `d` (`h` is `d x d`, `d` is
//! `(d²-1) x (d²-1)`); the other forms are qubit only.
//!
//! `trace-v1` holds a sampled process:
//!
//! ```json
//! {"format": "trace-v1", "dim": 2, "times": [0, 0.1, ...],
//!  "maps": [[[[1, 0], [0, 0], ...], ...], ...]}
//! ```
//!
//! Unknown fields are rejected in both formats.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classes::{master_to_pauli, pauli_to_master, PauliParams};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::process::ProcessTrace;
use crate::repr::{
    bloch_to_master, choi_to_master, master_to_bloch, master_to_choi, BlochAffineGenerator, ChoiGeneratorQubit,
    MasterEquationForm,
};

pub const TRACE_FORMAT: &str = "trace-v1";

type ComplexRows = Vec<Vec<Complex64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase", deny_unknown_fields)]
pub enum GeneratorFile {
    Choi {
        q1: f64,
        q2: f64,
        y1: Complex64,
        y2: Complex64,
        x: Complex64,
        z1: Complex64,
        z2: Complex64,
    },
    Master {
        h: ComplexRows,
        d: ComplexRows,
    },
    Bloch {
        r: [[f64; 3]; 3],
        t: [f64; 3],
    },
    Pauli {
        gamma: [f64; 3],
        tau: [f64; 3],
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Form {
    Choi,
    Master,
    Bloch,
    Pauli,
}

impl Form {
    pub fn as_str(self) -> &'static str {
        match self {
            Form::Choi => "choi",
            Form::Master => "master",
            Form::Bloch => "bloch",
            Form::Pauli => "pauli",
        }
    }
}

fn rows_to_matrix(field: &str, rows: &ComplexRows) -> Result<DMatrix<Complex64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidInput(format!("field `{field}` is empty")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::InvalidInput(format!(
            "field `{field}`: row {i} has {} entries, expected {n}",
            rows[i].len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn hermitian_field(field: &str, rows: &ComplexRows) -> Result<HermitianMatrix> {
    HermitianMatrix::new(rows_to_matrix(field, rows)?)
        .map_err(|e| Error::InvalidInput(format!("field `{field}`: {e}")))
}

pub fn matrix_to_rows(m: &DMatrix<Complex64>) -> ComplexRows {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect()
}

fn check_finite(field: &str, values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("field `{field}` has non-finite entries")))
    }
}

impl GeneratorFile {
    pub fn form(&self) -> Form {
        match self {
            GeneratorFile::Choi { .. } => Form::Choi,
            GeneratorFile::Master { .. } => Form::Master,
            GeneratorFile::Bloch { .. } => Form::Bloch,
            GeneratorFile::Pauli { .. } => Form::Pauli,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("generator file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("generator files always serialize")
    }

    pub fn to_master(&self) -> Result<MasterEquationForm> {
        match self {
            GeneratorFile::Choi { q1, q2, y1, y2, x, z1, z2 } => {
                check_finite("choi", &[*q1, *q2, y1.re, y1.im, y2.re, y2.im, x.re, x.im, z1.re, z1.im, z2.re, z2.im])?;
                Ok(choi_to_master(&ChoiGeneratorQubit { q1: *q1, q2: *q2, y1: *y1, y2: *y2, x: *x, z1: *z1, z2: *z2 }))
            }
            GeneratorFile::Master { h, d } => {
                let h = hermitian_field("h", h)?;
                let d = hermitian_field("d", d)?;
                MasterEquationForm::new(h, d)
            }
            GeneratorFile::Bloch { r, t } => {
                let b = BlochAffineGenerator::new(
                    Matrix3::from_fn(|i, j| r[i][j]),
                    Vector3::new(t[0], t[1], t[2]),
                )?;
                Ok(bloch_to_master(&b))
            }
            GeneratorFile::Pauli { gamma, tau } => {
                check_finite("gamma", gamma)?;
                check_finite("tau", tau)?;
                pauli_to_master(&PauliParams::new(*gamma, *tau))
            }
        }
    }

    /// Writes `m` in the requested form. Pauli output fails with
    /// [`Error::NotInPauliClass`] for generators outside that class.
    pub fn from_master(m: &MasterEquationForm, form: Form) -> Result<Self> {
        Ok(match form {
            Form::Choi => {
                let p = master_to_choi(m)?;
                GeneratorFile::Choi { q1: p.q1, q2: p.q2, y1: p.y1, y2: p.y2, x: p.x, z1: p.z1, z2: p.z2 }
            }
            Form::Master => GeneratorFile::Master {
                h: matrix_to_rows(m.hamiltonian().as_matrix()),
                d: matrix_to_rows(m.dissipation().as_matrix()),
            },
            Form::Bloch => {
                let b = master_to_bloch(m)?;
                let r = b.r();
                GeneratorFile::Bloch {
                    r: [0, 1, 2].map(|i| [0, 1, 2].map(|j| r[(i, j)])),
                    t: [b.t()[0], b.t()[1], b.t()[2]],
                }
            }
            Form::Pauli => {
                let p = master_to_pauli(m)?;
                GeneratorFile::Pauli { gamma: p.gamma, tau: p.tau }
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceFile {
    pub format: String,
    pub dim: usize,
    pub times: Vec<f64>,
    pub maps: Vec<ComplexRows>,
}

impl TraceFile {
    pub fn from_trace(trace: &ProcessTrace) -> Self {
        Self {
            format: TRACE_FORMAT.to_string(),
            dim: trace.dim(),
            times: trace.times().to_vec(),
            maps: trace.maps().iter().map(matrix_to_rows).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("trace file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace files always serialize")
    }

    pub fn into_trace(self) -> Result<ProcessTrace> {
        if self.format != TRACE_FORMAT {
            return Err(Error::InvalidInput(format!(
                "field `format`: expected \"{TRACE_FORMAT}\", got \"{}\"",
                self.format
            )));
        }
        let n = self.dim * self.dim;
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(k, rows)| {
                let m = rows_to_matrix(&format!("maps[{k}]"), rows)?;
                if m.nrows() != n {
                    return Err(Error::InvalidInput(format!("field `maps[{k}]`: expected {n}x{n} for dim {}", self.dim)));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        ProcessTrace::new(self.dim, self.times, maps)
    }
}
