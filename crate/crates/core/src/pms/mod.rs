//! The generalized Peres-Mermin square built from a triple of
//! anti-commuting unitaries, its context checks, and `⟨Re X⟩` on arbitrary
//! bipartite states.
//!
//! `⟨Re X⟩ = ⟨R1⟩ + ⟨R2⟩ + ⟨R3⟩ + ⟨C1⟩ + ⟨C2⟩ - ⟨C3⟩`, evaluated either from
//! the ordered row and column products or from the Hermitian parts of the
//! nine entries. For any valid triple both give 6 on every state.

mod eval;
mod kron;
mod scan;
mod square;

use thiserror::Error;

pub use eval::{
    expectation_re_x, expectation_re_x_hermitian, expectation_re_x_product, phase_in_turns_of_pi, EvalPath,
    PreparedSquare, StateDescriptor, StateKind, Terms, ViolationReport, BOUND_NONCONTEXTUAL, BOUND_QUANTUM_MAX,
};
pub use kron::KronOp;
pub use scan::{scan_states, scan_states_with, PathStats, ScanRow, ScanSummary};
pub use square::{
    build_square, row_col_products, verify_compatibility, CompatibilityReport, Context, ContextProduct, PmsSquare,
    ProductReport,
};

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone)]
pub enum PmsError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state dimension {found} does not match the square ({expected})")]
    StateDimension { expected: usize, found: usize },
    #[error("operators must be square with one common dimension, got {0:?}")]
    OperatorShapes(Vec<(usize, usize)>),
}
