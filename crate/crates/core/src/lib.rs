//! Commutator decompositions inside a hyperplane of square matrices.
//!
//! Given a nonzero `B` and a trace-zero `A` over an exact field, the solver
//! produces `A1, A2` with `A1 A2 - A2 A1 = A` and `tr(B A1) = tr(B A2) = 0`.
//! Every returned pair is re-verified before it leaves the crate.

pub mod error;
pub mod field;
pub mod hyperplane;
mod linalg;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod solver;
pub mod textio;

pub use error::{Error, Result};
pub use field::{ArithOp, Elem, Field, FieldKind, Scalar};
pub use hyperplane::Hyperplane;
pub use matrix::{HessenbergProfile, Mat, Vector};
pub use oracle::{
    enumerate_bracket_set, oracle_decompose, random_instance, sweep, verify_decomposition, BracketSet, OracleMode,
    SweepConfig, SweepReport, VerifyFailure,
};
pub use poly::Poly;
pub use solver::{
    decompose, thompson_decompose, Decomposition, SolveOutcome, SolverConfig, Stages, Strategy, DEFAULT_BUDGET,
};
pub use textio::Instance;
