//! Generator representations and the exact conversions between them.
//!
//! A qubit generator can be written three ways:
//!
//! * Choi parameters `(q1, q2, Y1, Y2, X, Z1, Z2)` of the traceless-block
//!   Choi matrix
//!
//!   ```text
//!   ⎡ -q1   Y1*   X*   -Z1* ⎤
//!   ⎢  Y1    q1   Z2   -X*  ⎥
//!   ⎢  X     Z2*  q2    Y2* ⎥
//!   ⎣ -Z1   -X    Y2   -q2  ⎦
//!   ```
//!
//! * master-equation form `(H, D)` over [`OperatorBasis::qubit_standard`],
//! * Bloch-affine form `v ↦ R v + t`.
//!
//! All conversions are closed-form and invertible. [`canonical_form`] extracts
//! `(H, D)` from a generator Choi matrix of any dimension.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;

use crate::basis::OperatorBasis;
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::superop;

/// Gauge tolerance on `tr H`.
pub const TRACE_GAUGE_TOL: f64 = 1e-12;

/// Block-trace tolerance of a well-formed generator Choi matrix.
pub const GENERATOR_TRACE_TOL: f64 = 1e-10;

/// Block-trace defect above which [`canonical_form`] refuses its input.
pub const CANONICAL_TRACE_TOL: f64 = 1e-8;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Choi-matrix parameters of a qubit generator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChoiGeneratorQubit {
    pub q1: f64,
    pub q2: f64,
    pub y1: Complex64,
    pub y2: Complex64,
    pub x: Complex64,
    pub z1: Complex64,
    pub z2: Complex64,
}

/// Master-equation form `L[ρ] = -i[H, ρ] + Σ D_ij (F_i ρ F_j† - ½{F_j† F_i, ρ})`.
///
/// `H` is kept traceless; `D` is indexed over the traceless basis elements.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterEquationForm {
    hamiltonian: HermitianMatrix,
    dissipation: HermitianMatrix,
    basis: Arc<OperatorBasis>,
}

/// Bloch-affine form `v ↦ R v + t` of a qubit generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAffineGenerator {
    r: Matrix3<f64>,
    t: Vector3<f64>,
}

/// Choi matrix of a generator; every `d x d` block is traceless.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorChoiMatrix {
    dim: usize,
    matrix: HermitianMatrix,
}

impl MasterEquationForm {
    /// Builds the form in the default basis for `dim = H.dim()`. The trace of
    /// `H` is removed, since it does not enter the generator.
    pub fn new(hamiltonian: HermitianMatrix, dissipation: HermitianMatrix) -> Result<Self> {
        let basis = OperatorBasis::default_for(hamiltonian.dim())?;
        Self::with_basis(hamiltonian, dissipation, basis)
    }

    pub fn with_basis(
        hamiltonian: HermitianMatrix,
        dissipation: HermitianMatrix,
        basis: Arc<OperatorBasis>,
    ) -> Result<Self> {
        let d = hamiltonian.dim();
        if d < 2 {
            return Err(Error::InvalidInput("Hilbert space dimension must be at least 2".into()));
        }
        if basis.dim() != d {
            return Err(Error::UnsupportedDimension { expected: d, found: basis.dim() });
        }
        if dissipation.dim() != d * d - 1 {
            return Err(Error::InvalidInput(format!(
                "dissipation matrix must be {n}x{n} for d = {d}, got {m}x{m}",
                n = d * d - 1,
                m = dissipation.dim()
            )));
        }
        let shift = hamiltonian.trace() / d as f64;
        let gauged = hamiltonian.as_matrix() - DMatrix::<Complex64>::identity(d, d).scale(shift);
        Ok(Self { hamiltonian: HermitianMatrix::new(gauged)?, dissipation, basis })
    }

    /// Qubit form from a 3x3 dissipation matrix and a Hamiltonian.
    pub fn qubit(hamiltonian: [[Complex64; 2]; 2], dissipation: [[Complex64; 3]; 3]) -> Result<Self> {
        let h = HermitianMatrix::from_row_major(2, hamiltonian.as_flattened())?;
        let d = HermitianMatrix::from_row_major(3, dissipation.as_flattened())?;
        Self::new(h, d)
    }

    /// Qubit form with `H = 0`.
    pub fn qubit_dissipator(dissipation: [[Complex64; 3]; 3]) -> Result<Self> {
        Self::qubit([[Complex64::default(); 2]; 2], dissipation)
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn hamiltonian(&self) -> &HermitianMatrix {
        &self.hamiltonian
    }

    pub fn dissipation(&self) -> &HermitianMatrix {
        &self.dissipation
    }

    pub fn basis(&self) -> &Arc<OperatorBasis> {
        &self.basis
    }

    /// `D` as a fixed-size array; only for qubits.
    pub fn qubit_dissipation(&self) -> Result<[[Complex64; 3]; 3]> {
        self.require_qubit()?;
        let mut out = [[Complex64::default(); 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.dissipation.get(i, j);
            }
        }
        Ok(out)
    }

    pub(crate) fn require_qubit(&self) -> Result<()> {
        if self.dim() != 2 {
            return Err(Error::UnsupportedDimension { expected: 2, found: self.dim() });
        }
        Ok(())
    }

    /// Evaluates the generator on an operator.
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let h = self.hamiltonian.as_matrix();
        let mut out = (h * rho - rho * h) * cx(0.0, -1.0);
        let f = self.basis.traceless();
        for (i, fi) in f.iter().enumerate() {
            for (j, fj) in f.iter().enumerate() {
                let dij = self.dissipation.get(i, j);
                if dij == Complex64::default() {
                    continue;
                }
                let fj_dag = fj.adjoint();
                let anti = &fj_dag * fi;
                let term = fi * rho * &fj_dag - (&anti * rho + rho * &anti).scale(0.5);
                out += term * dij;
            }
        }
        out
    }

    pub fn superoperator(&self) -> DMatrix<Complex64> {
        superop::superoperator_from_fn(self.dim(), |rho| self.apply(rho))
    }

    /// Choi matrix `Σ |i⟩⟨j| ⊗ L[|i⟩⟨j|]`.
    pub fn choi_matrix(&self) -> Result<GeneratorChoiMatrix> {
        let d = self.dim();
        let c = superop::choi_from_superoperator(&self.superoperator(), d);
        GeneratorChoiMatrix::with_tolerance(d, c, CANONICAL_TRACE_TOL)
    }
}

impl BlochAffineGenerator {
    pub fn new(r: Matrix3<f64>, t: Vector3<f64>) -> Result<Self> {
        if r.iter().chain(t.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("Bloch generator entries must be finite".into()));
        }
        Ok(Self { r, t })
    }

    pub fn r(&self) -> &Matrix3<f64> {
        &self.r
    }

    pub fn t(&self) -> &Vector3<f64> {
        &self.t
    }
}

impl GeneratorChoiMatrix {
    pub fn new(dim: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(dim, matrix, GENERATOR_TRACE_TOL)
    }

    /// Accepts block-trace defects up to `trace_tol`, for matrices that come
    /// out of numerical differentiation.
    pub fn with_tolerance(dim: usize, matrix: DMatrix<Complex64>, trace_tol: f64) -> Result<Self> {
        if dim < 2 || matrix.nrows() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "generator Choi matrix for d = {dim} must be {n}x{n}, got {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                n = dim * dim
            )));
        }
        let defect = superop::choi_block_trace_defect(&matrix, dim);
        if defect > trace_tol {
            return Err(Error::NotTracePreserving { defect });
        }
        Ok(Self { dim, matrix: HermitianMatrix::new(matrix)? })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.matrix
    }

    pub fn superoperator(&self) -> DMatrix<Complex64> {
        superop::superoperator_from_choi(self.matrix.as_matrix(), self.dim)
    }

    /// Reads the seven Choi parameters back out of a qubit generator.
    pub fn disassemble(&self) -> Result<ChoiGeneratorQubit> {
        if self.dim != 2 {
            return Err(Error::UnsupportedDimension { expected: 2, found: self.dim });
        }
        let c = |i, j| self.matrix.get(i, j);
        Ok(ChoiGeneratorQubit {
            q1: c(1, 1).re,
            q2: c(2, 2).re,
            y1: c(1, 0),
            y2: c(3, 2),
            x: c(2, 0),
            z1: -c(3, 0),
            z2: c(1, 2),
        })
    }
}

impl ChoiGeneratorQubit {
    pub fn assemble(&self) -> GeneratorChoiMatrix {
        assemble_choi(self)
    }
}

/// Lays the parameters out as the 4x4 generator Choi matrix.
pub fn assemble_choi(p: &ChoiGeneratorQubit) -> GeneratorChoiMatrix {
    let q1 = cx(p.q1, 0.0);
    let q2 = cx(p.q2, 0.0);
    #[rustfmt::skip]
    let entries = [
        -q1,   p.y1.conj(), p.x.conj(),  -p.z1.conj(),
        p.y1,  q1,          p.z2,        -p.x.conj(),
        p.x,   p.z2.conj(), q2,          p.y2.conj(),
        -p.z1, -p.x,        p.y2,        -q2,
    ];
    let m = DMatrix::from_row_slice(4, 4, &entries);
    // The layout is Hermitian with traceless blocks for every finite input.
    GeneratorChoiMatrix::new(2, m).expect("parametrized Choi matrix is a valid generator")
}

/// Solves the linear parameter map for `(H, D)`, with `H11 + H22 = 0`.
pub fn choi_to_master(p: &ChoiGeneratorQubit) -> MasterEquationForm {
    let d11 = p.z1.re - 0.5 * (p.q1 + p.q2);
    let d12 = (p.x.conj() - p.y2) / SQRT2;
    let d13 = (p.x + p.y1.conj()) / SQRT2;
    let d23 = p.z2.conj();
    let d = [
        [cx(d11, 0.0), d12, d13],
        [d12.conj(), cx(p.q2, 0.0), d23],
        [d13.conj(), d23.conj(), cx(p.q1, 0.0)],
    ];
    // Third row of the parameter map: X* = (√2/4)(D12 + D31) + i H21.
    let h21 = (p.x.conj() - (d12 + d13.conj()) * (SQRT2 / 4.0)) * cx(0.0, -1.0);
    let half = 0.5 * p.z1.im;
    let h = [[cx(-half, 0.0), h21.conj()], [h21, cx(half, 0.0)]];
    MasterEquationForm::qubit(h, d).expect("closed-form inverse yields Hermitian H and D")
}

/// Forward linear parameter map from `(H, D)` to the Choi parameters.
pub fn master_to_choi(m: &MasterEquationForm) -> Result<ChoiGeneratorQubit> {
    m.require_qubit()?;
    let dm = m.dissipation();
    let hm = m.hamiltonian();
    let d = |i, j| dm.get(i, j);
    let (d12, d31, h21) = (d(0, 1), d(2, 0), hm.get(1, 0));
    let a = SQRT2 / 4.0;
    let b = 18f64.sqrt() / 4.0;
    let i = cx(0.0, 1.0);
    let y1 = d12 * (-a) + d31 * b - i * h21;
    let y2 = d12 * (-b) + d31 * a + i * h21;
    let x_conj = d12 * a + d31 * a + i * h21;
    let (d11, d22, d33) = (d(0, 0).re, d(1, 1).re, d(2, 2).re);
    Ok(ChoiGeneratorQubit {
        q1: d33,
        q2: d22,
        y1,
        y2,
        x: x_conj.conj(),
        z1: cx(d11 + 0.5 * (d22 + d33), (hm.get(1, 1) - hm.get(0, 0)).re),
        z2: d(2, 1),
    })
}

pub fn choi_to_bloch(p: &ChoiGeneratorQubit) -> BlochAffineGenerator {
    let (y1, y2, x, z1, z2) = (p.y1, p.y2, p.x, p.z1, p.z2);
    #[rustfmt::skip]
    let r = Matrix3::new(
        (z2 - z1).re,  (z1 + z2).im,  (y1 - y2).re,
        (z2 - z1).im,  -(z1 + z2).re, (y1 - y2).im,
        2.0 * x.re,    -2.0 * x.im,   -p.q1 - p.q2,
    );
    let t = Vector3::new((y1 + y2).re, (y1 + y2).im, p.q2 - p.q1);
    BlochAffineGenerator { r, t }
}

pub fn bloch_to_choi(b: &BlochAffineGenerator) -> ChoiGeneratorQubit {
    let (r, t) = (&b.r, &b.t);
    let z_diff = cx(r[(0, 0)], r[(1, 0)]); // Z2 - Z1
    let z_sum = cx(-r[(1, 1)], r[(0, 1)]); // Z1 + Z2
    let y_diff = cx(r[(0, 2)], r[(1, 2)]); // Y1 - Y2
    let y_sum = cx(t[0], t[1]); // Y1 + Y2
    ChoiGeneratorQubit {
        q1: 0.5 * (-r[(2, 2)] - t[2]),
        q2: 0.5 * (-r[(2, 2)] + t[2]),
        y1: (y_sum + y_diff) * 0.5,
        y2: (y_sum - y_diff) * 0.5,
        x: cx(0.5 * r[(2, 0)], -0.5 * r[(2, 1)]),
        z1: (z_sum - z_diff) * 0.5,
        z2: (z_sum + z_diff) * 0.5,
    }
}

pub fn master_to_bloch(m: &MasterEquationForm) -> Result<BlochAffineGenerator> {
    Ok(choi_to_bloch(&master_to_choi(m)?))
}

pub fn bloch_to_master(b: &BlochAffineGenerator) -> MasterEquationForm {
    choi_to_master(&bloch_to_choi(b))
}

/// Extracts `(H, D)` from a generator Choi matrix of any dimension using the
/// default operator basis for that dimension.
pub fn canonical_form(c: &GeneratorChoiMatrix) -> Result<MasterEquationForm> {
    canonical_form_in(c, OperatorBasis::default_for(c.dim())?)
}

/// Canonical-form extraction in a caller-supplied basis.
///
/// With `ω⊥ = 1 - |Φ_B⟩⟨Φ_B|` the Choi matrix splits as
/// `C = C_φ - |Ψ⟩⟨Φ_B| - |Φ_B⟩⟨Ψ|`, where `C_φ = ω⊥ C ω⊥`,
/// `λ = ⟨Φ_B|C|Φ_B⟩` and `|Ψ⟩ = -ω⊥ C|Φ_B⟩ - (λ/2)|Φ_B⟩`. `D` is `C_φ` read
/// in the basis `|Φ^(i)⟩ = √d (1 ⊗ F_i)|Φ_B⟩`, `κ_nm = ⟨mn|Ψ⟩/√d`, and
/// `H` is the anti-Hermitian part of `κ` divided by `i`.
pub fn canonical_form_in(c: &GeneratorChoiMatrix, basis: Arc<OperatorBasis>) -> Result<MasterEquationForm> {
    let d = c.dim();
    if basis.dim() != d {
        return Err(Error::UnsupportedDimension { expected: d, found: basis.dim() });
    }
    let cm = c.matrix().as_matrix();
    let defect = superop::choi_block_trace_defect(cm, d);
    if defect > CANONICAL_TRACE_TOL {
        return Err(Error::NotTracePreserving { defect });
    }
    let phi = superop::bell_state(d);
    let c_phi = cm * &phi;
    let lambda = phi.dotc(&c_phi);
    let omega_perp_c_phi = &c_phi - &phi * phi.dotc(&c_phi);
    let psi = -omega_perp_c_phi - &phi * (lambda * 0.5);

    let projector = DMatrix::<Complex64>::identity(d * d, d * d) - &phi * phi.adjoint();
    let c_perp = &projector * cm * &projector;

    let scale = Complex64::new((d as f64).sqrt(), 0.0);
    let states: Vec<_> = basis
        .traceless()
        .iter()
        .map(|f| superop::apply_right_factor(f, &phi) * scale)
        .collect();
    let n = d * d - 1;
    let dissipation = DMatrix::from_fn(n, n, |i, j| states[i].dotc(&(&c_perp * &states[j])));

    let kappa = DMatrix::from_fn(d, d, |row, col| psi[col * d + row] / scale);
    let anti = (&kappa - kappa.adjoint()).scale(0.5);
    let hamiltonian = anti * cx(0.0, -1.0);

    MasterEquationForm::with_basis(
        HermitianMatrix::with_tolerance(hamiltonian, 1e-8)?,
        HermitianMatrix::with_tolerance(dissipation, 1e-8)?,
        basis,
    )
}
