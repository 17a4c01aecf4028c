//! Dense complex linear algebra: products, Kronecker products, direct sums,
//! Hermitian and unitary eigendecompositions, and seeded random states.

mod eigen;
mod matrix;
mod random;
mod state;

use std::ops::Deref;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use eigen::{
    eig_unitary, eig_unitary_with, eigh, expm_i_hermitian, nearest_unitary, HermitianEigen, SpectralDecomposition,
    JACOBI_MAX_SWEEPS, JACOBI_TOL,
};
pub use matrix::{adjoint, direct_sum, pauli, tensor, ComplexMatrix, MatrixJson, C64, I, ONE, ZERO};
pub use random::{haar_state, haar_unitary, random_density, seeded_rng, stream_seed};
pub use state::{DensityMatrix, StateVector};

use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix dimensions must be positive")]
    EmptyDimension,
    #[error("dimension overflow")]
    DimensionOverflow,
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("{op}: incompatible shapes {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("direct sum of an empty block list")]
    EmptyBlockList,
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("eigensolver did not converge (off-diagonal residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("decomposition residual {residual:e} exceeds {tol:e}")]
    Reconstruction { residual: f64, tol: f64 },
    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl LinalgError {
    /// Numeric residual carried by the error, if any.
    pub fn residual(&self) -> Option<f64> {
        match *self {
            Self::NotHermitian { residual }
            | Self::NotUnitary { residual }
            | Self::NoConvergence { residual }
            | Self::Reconstruction { residual, .. } => Some(residual),
            _ => None,
        }
    }
}

/// A square matrix certified unitary within a tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
    unitarity_residual: f64,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let residual = matrix.unitarity_residual();
        if residual > tol {
            return Err(LinalgError::NotUnitary { residual });
        }
        Ok(Self {
            matrix,
            unitarity_residual: residual,
        })
    }

    /// Checks against the default unitarity tolerance.
    pub fn try_from_matrix(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        Self::new(matrix, tol::UNITARITY)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
            unitarity_residual: 0.0,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.unitarity_residual
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
            unitarity_residual: self.unitarity_residual,
        }
    }
}

impl Deref for UnitaryOperator {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

impl Serialize for UnitaryOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix.serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        Self::try_from_matrix(m).map_err(serde::de::Error::custom)
    }
}
