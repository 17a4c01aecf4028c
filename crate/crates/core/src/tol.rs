//! Numerical tolerance defaults.
//!
//! Construction routines aim an order of magnitude tighter than the checks
//! that accept their output, so that a freshly built object never sits on
//! the edge of its own acceptance test.

use serde::{Deserialize, Serialize};

/// `max |U†U - 1|` accepted for a matrix to count as unitary.
pub const UNITARITY: f64 = 1e-10;
/// Reconstruction residual for spectral and canonical decompositions.
pub const RECONSTRUCTION: f64 = 1e-8;
/// Commutator and anti-commutator residuals.
pub const COMMUTATOR: f64 = 1e-9;
/// Angular width used when grouping unit-circle eigenvalues.
pub const CLUSTER: f64 = 1e-8;
/// Angular distance allowed between `-λ` and the matched cluster.
pub const PAIRING: f64 = 1e-8;
/// Hermiticity residual accepted by `expm_i_hermitian` and density matrices.
pub const HERMITIAN: f64 = 1e-10;

/// Bundle of overridable tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub unitarity: f64,
    pub reconstruction: f64,
    pub commutator: f64,
    pub cluster: f64,
    pub pairing: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: UNITARITY,
            reconstruction: RECONSTRUCTION,
            commutator: COMMUTATOR,
            cluster: CLUSTER,
            pairing: PAIRING,
        }
    }
}
