//! Spectral characterization of anti-commuting unitaries.
//!
//! A unitary `U₁` admits a unitary `U₂` with `{U₁, U₂} = 0` exactly when
//! its eigenvalues come in pairs `λ, -λ` with equal multiplicities. This
//! module clusters the spectrum, checks the pairing, builds a partner from
//! the paired eigenbases, completes the triple with
//! `U₃ = ±i U₂†U₁†`, verifies the resulting algebra and extracts the block
//! form `⊕ λ σ_z`, `⊕ λ' σ_x`, `±⊕ (λλ')* σ_y`.

mod canonical;
mod clusters;
mod partner;
mod triple;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canonical::{canonical_form, canonical_form_with, CanonicalForm};
pub use clusters::{
    angular_distance, check_pairing, cluster_spectrum, is_pair_representative, phase_of, EigenCluster,
    EigenClusters, PairingDefect, PairingVerdict,
};
pub use partner::{
    construct_partner, construct_partner_with, pairing_verdict, require_pairing, LambdaPrimes, PartnerConstruction,
};
pub use triple::{
    complete_triple, complete_triple_with, infer_sign, verify_algebra, AlgebraReport, AnticommutatorResidual,
    CommutatorResidual, PmsTriple, Sign, TripleResiduals,
};

use crate::linalg::{ComplexMatrix, LinalgError, UnitaryOperator, C64};

#[derive(Debug, Error, Clone)]
pub enum SpectralError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("ambiguous eigenvalue clustering: neighbour gap {gap:e} within (tol, 2·tol] for tol {tol:e}")]
    ClusteringAmbiguity { gap: f64, tol: f64 },
    #[error("no anti-commuting partner exists: {defect}")]
    Pairing {
        defect: PairingDefect,
        verdict: Box<PairingVerdict>,
    },
    #[error("operators do not anti-commute (residual {residual:e} > {tol:e})")]
    AntiCommutation { residual: f64, tol: f64 },
    #[error("triple residual {residual:e} exceeds {tol:e}")]
    TripleResidual { residual: f64, tol: f64 },
    #[error("canonical reconstruction residual {residual:e} exceeds {tol:e}")]
    Reconstruction { residual: f64, tol: f64 },
    #[error("expected {expected} λ' values (one per pair), found {found}")]
    LambdaPrimeCount { expected: usize, found: usize },
    #[error("λ' value {value} is not of unit modulus")]
    LambdaPrimeModulus { value: C64 },
    #[error("operator dimensions differ: {0:?}")]
    DimensionMismatch(Vec<usize>),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl SpectralError {
    pub fn residual(&self) -> Option<f64> {
        match self {
            Self::Linalg(e) => e.residual(),
            Self::AntiCommutation { residual, .. }
            | Self::TripleResidual { residual, .. }
            | Self::Reconstruction { residual, .. } => Some(*residual),
            Self::ClusteringAmbiguity { gap, .. } => Some(*gap),
            _ => None,
        }
    }

    /// True for refusals that no tolerance change can fix (spectral defects).
    pub fn is_structural(&self) -> bool {
        matches!(self, Self::Pairing { .. })
    }
}

/// On-disk triple layout: `{"sign", "u1", "u2", "u3", "residuals"}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TripleJson {
    pub sign: Sign,
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub u3: ComplexMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<TripleResiduals>,
}

impl From<&PmsTriple> for TripleJson {
    fn from(t: &PmsTriple) -> Self {
        Self {
            sign: t.sign,
            u1: t.u1.matrix().clone(),
            u2: t.u2.matrix().clone(),
            u3: t.u3.matrix().clone(),
            residuals: Some(t.residuals),
        }
    }
}

impl TryFrom<TripleJson> for PmsTriple {
    type Error = SpectralError;

    /// Residuals are re-measured; the stored ones are informational.
    fn try_from(j: TripleJson) -> Result<Self, SpectralError> {
        PmsTriple::from_parts(
            UnitaryOperator::try_from_matrix(j.u1)?,
            UnitaryOperator::try_from_matrix(j.u2)?,
            UnitaryOperator::try_from_matrix(j.u3)?,
            j.sign,
        )
    }
}
