use serde::Serialize;

use super::{check_pairing, cluster_spectrum, PairingVerdict, SpectralError};
use crate::linalg::{eig_unitary_with, ComplexMatrix, UnitaryOperator, C64, ZERO};
use crate::tol::Tolerances;

/// Phases `λ_i'` attached to each `±λ_i` pair when building a partner.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum LambdaPrimes {
    /// Every `λ_i' = 1`.
    #[default]
    Default,
    /// One unit-modulus value per pair, in pair order.
    Explicit(Vec<C64>),
}

#[derive(Debug, Clone, Serialize)]
pub struct PartnerConstruction {
    pub partner: UnitaryOperator,
    pub verdict: PairingVerdict,
    /// `(λ_i, K_i, λ_i')` per pair.
    pub blocks: Vec<(C64, usize, C64)>,
    /// `max |{U₁, U₂}|`.
    pub anticommutator_residual: f64,
}

/// Eigendecomposition, clustering and pairing test of `u` in one call.
pub fn pairing_verdict(u: &ComplexMatrix, tol: &Tolerances) -> Result<PairingVerdict, SpectralError> {
    let decomp = eig_unitary_with(u, tol.reconstruction)?;
    let clusters = cluster_spectrum(&decomp, tol.cluster)?;
    Ok(check_pairing(&clusters, tol.pairing))
}

/// `Ok` when the spectrum of `u` pairs, the first defect as a
/// [`SpectralError::Pairing`] otherwise.
pub fn require_pairing(u: &ComplexMatrix, tol: &Tolerances) -> Result<PairingVerdict, SpectralError> {
    let verdict = pairing_verdict(u, tol)?;
    match verdict.defect() {
        Some(defect) => Err(SpectralError::Pairing {
            defect: defect.clone(),
            verdict: Box::new(verdict.clone()),
        }),
        None => Ok(verdict),
    }
}

/// Builds `U₂` with `U₂|e⁺_{i,j}⟩ = λ_i'|e⁻_{i,j}⟩` and
/// `U₂|e⁻_{i,j}⟩ = λ_i'|e⁺_{i,j}⟩` from the paired eigenbases of `u1`.
pub fn construct_partner(u1: &UnitaryOperator, lambda_primes: &LambdaPrimes) -> Result<UnitaryOperator, SpectralError> {
    construct_partner_with(u1, lambda_primes, &Tolerances::default()).map(|c| c.partner)
}

pub fn construct_partner_with(
    u1: &UnitaryOperator,
    lambda_primes: &LambdaPrimes,
    tol: &Tolerances,
) -> Result<PartnerConstruction, SpectralError> {
    let decomp = eig_unitary_with(u1.matrix(), tol.reconstruction)?;
    let clusters = cluster_spectrum(&decomp, tol.cluster)?;
    let verdict = check_pairing(&clusters, tol.pairing);
    if let Some(defect) = verdict.defect() {
        return Err(SpectralError::Pairing {
            defect: defect.clone(),
            verdict: Box::new(verdict.clone()),
        });
    }

    let primes: Vec<C64> = match lambda_primes {
        LambdaPrimes::Default => vec![C64::new(1.0, 0.0); verdict.pairs.len()],
        LambdaPrimes::Explicit(v) => {
            if v.len() != verdict.pairs.len() {
                return Err(SpectralError::LambdaPrimeCount {
                    expected: verdict.pairs.len(),
                    found: v.len(),
                });
            }
            if let Some(bad) = v.iter().find(|z| (z.norm() - 1.0).abs() > tol.unitarity) {
                return Err(SpectralError::LambdaPrimeModulus { value: *bad });
            }
            v.clone()
        }
    };

    let d = u1.dim();
    let mut m = ComplexMatrix::zeros(d, d);
    let mut blocks = Vec::with_capacity(verdict.pairs.len());
    for (&(plus, minus), &prime) in verdict.pairs.iter().zip(&primes) {
        let ep = &clusters.clusters[plus].vectors;
        let em = &clusters.clusters[minus].vectors;
        blocks.push((clusters.clusters[plus].representative, ep.cols(), prime));
        for j in 0..ep.cols() {
            // λ' (|e⁻⟩⟨e⁺| + |e⁺⟩⟨e⁻|)
            for r in 0..d {
                let (mr, pr) = (em[(r, j)], ep[(r, j)]);
                if mr == ZERO && pr == ZERO {
                    continue;
                }
                for c in 0..d {
                    m[(r, c)] += prime * (mr * ep[(c, j)].conj() + pr * em[(c, j)].conj());
                }
            }
        }
    }

    let partner = UnitaryOperator::new(m, tol.unitarity)?;
    let anticommutator_residual = u1.anticommutator(&partner)?.max_abs();
    if anticommutator_residual > tol.commutator {
        return Err(SpectralError::AntiCommutation {
            residual: anticommutator_residual,
            tol: tol.commutator,
        });
    }
    Ok(PartnerConstruction {
        partner,
        verdict,
        blocks,
        anticommutator_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli, I, ONE};
    use crate::spectral::PairingDefect;

    fn unitary(m: ComplexMatrix) -> UnitaryOperator {
        UnitaryOperator::try_from_matrix(m).unwrap()
    }

    #[test]
    fn partner_of_sigma_z_is_sigma_x() {
        let u2 = construct_partner(&unitary(pauli::z()), &LambdaPrimes::Default).unwrap();
        assert!(u2.max_diff(&pauli::x()) < 1e-14);
    }

    #[test]
    fn partner_of_i_sigma_z_is_sigma_x() {
        let u2 = construct_partner(&unitary(pauli::z().scale(I)), &LambdaPrimes::Default).unwrap();
        assert!(u2.max_diff(&pauli::x()) < 1e-14);
    }

    #[test]
    fn spin_one_rotation_is_refused() {
        let m = ComplexMatrix::from_diagonal(&[-ONE, ONE, -ONE]);
        let err = construct_partner(&unitary(m), &LambdaPrimes::Default).unwrap_err();
        match err {
            SpectralError::Pairing { defect, .. } => assert_eq!(
                defect,
                PairingDefect::MultiplicityMismatch {
                    lambda: C64::new(-1.0, 0.0),
                    multiplicity: 2,
                    partner_multiplicity: 1
                }
            ),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn explicit_primes_are_checked() {
        let u = unitary(pauli::z());
        assert!(matches!(
            construct_partner(&u, &LambdaPrimes::Explicit(vec![ONE, ONE])),
            Err(SpectralError::LambdaPrimeCount { expected: 1, found: 2 })
        ));
        assert!(matches!(
            construct_partner(&u, &LambdaPrimes::Explicit(vec![C64::new(2.0, 0.0)])),
            Err(SpectralError::LambdaPrimeModulus { .. })
        ));
        let u2 = construct_partner(&u, &LambdaPrimes::Explicit(vec![I])).unwrap();
        assert!(u2.max_diff(&pauli::x().scale(I)) < 1e-14);
    }
}
