//! Divisibility of differentiable qubit processes.
//!
//! A process `Λ_t` is CP-divisible when every intermediate map is completely
//! positive and P-divisible when every intermediate map is positive. Both
//! reduce to local tests on the generator `L_t = Λ̇_t Λ_t⁻¹`:
//!
//! * local CP: the dissipation matrix `D` of the master-equation form is
//!   positive semidefinite;
//! * local P (qubits): `⟨ψ|L_t[|φ⟩⟨φ|]|ψ⟩ ≥ 0` for every orthogonal pair,
//!   a function `p(θ, β)` on a torus.
//!
//! The crate provides the qubit generator representations and their
//! conversions, the general-dimension canonical form, both local tests,
//! closed-form criteria for several channel classes, and generator
//! extraction from sampled processes.

pub mod basis;
pub mod classes;
pub mod engine;
pub mod error;
pub mod hermitian;
pub mod io;
pub mod presets;
pub mod process;
pub mod repr;
pub mod scan;
pub mod superop;
pub mod torus;

pub use num_complex::Complex64;

/// Scalar used for every matrix entry.
pub type ComplexScalar = Complex64;

pub use basis::OperatorBasis;
pub use engine::{classify, local_cp, local_p, p_value, ClassifyOptions, DivisibilityVerdict, TorusPoint, VerdictClass};
pub use error::{Error, Result};
pub use hermitian::{eigen_psd, principal_minors_3x3, sylvester_psd, HermitianMatrix};
pub use repr::{
    assemble_choi, bloch_to_choi, bloch_to_master, canonical_form, choi_to_bloch, choi_to_master, master_to_bloch,
    master_to_choi, BlochAffineGenerator, ChoiGeneratorQubit, GeneratorChoiMatrix, MasterEquationForm,
};
pub use torus::MinimizerOptions;
