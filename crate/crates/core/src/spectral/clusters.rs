use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::linalg::{ComplexMatrix, SpectralDecomposition, C64};

/// Phase in `[-π, π)`, with anything within `snap` of `+π` folded to `-π`.
pub fn phase_of(z: C64, snap: f64) -> f64 {
    let a = z.im.atan2(z.re);
    if a >= PI - snap {
        a - 2.0 * PI
    } else {
        a
    }
}

/// Distance between two unit-circle points measured along the circle.
pub fn angular_distance(a: C64, b: C64) -> f64 {
    (a * b.conj()).arg().abs()
}

/// Whether `λ` is the representative of the pair `{λ, -λ}`: its phase lies
/// in `(-π/2, π/2]`. Exactly one member of an exact pair qualifies.
pub fn is_pair_representative(lambda: C64) -> bool {
    let a = lambda.arg();
    a > -PI / 2.0 && a <= PI / 2.0
}

#[derive(Debug, Clone)]
pub struct EigenCluster {
    /// Multiplicity-weighted circular mean, renormalized to unit modulus.
    pub representative: C64,
    pub multiplicity: usize,
    /// Orthonormal eigenvectors (one column per multiplicity).
    pub vectors: ComplexMatrix,
}

#[derive(Debug, Clone)]
pub struct EigenClusters {
    pub clusters: Vec<EigenCluster>,
    pub clustering_tol: f64,
}

impl EigenClusters {
    pub fn dim(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// `(representative, multiplicity)` per cluster.
    pub fn summary(&self) -> Vec<(C64, usize)> {
        self.clusters.iter().map(|c| (c.representative, c.multiplicity)).collect()
    }
}

/// Greedy angular clustering of a unit-circle spectrum.
///
/// Neighbours (in phase order, including across the ±π seam) closer than
/// `tol` merge; a neighbour gap in `(tol, 2·tol]` is an ambiguity error.
pub fn cluster_spectrum(decomp: &SpectralDecomposition, tol: f64) -> Result<EigenClusters, SpectralError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(SpectralError::InvalidArgument(format!("clustering tolerance must be positive, got {tol}")));
    }
    let n = decomp.dim();
    let mut order: Vec<(f64, usize)> = decomp
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &z)| (phase_of(z, tol), i))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut prev_phase = f64::NAN;
    for &(phase, idx) in &order {
        match groups.last_mut() {
            Some(group) => {
                let gap = phase - prev_phase;
                if gap <= tol {
                    group.push(idx);
                } else if gap <= 2.0 * tol {
                    return Err(SpectralError::ClusteringAmbiguity { gap, tol });
                } else {
                    groups.push(vec![idx]);
                }
            }
            None => groups.push(vec![idx]),
        }
        prev_phase = phase;
    }
    if groups.len() > 1 {
        let seam = order[0].0 + 2.0 * PI - order[n - 1].0;
        if seam <= tol {
            let last = groups.pop().expect("at least two groups");
            let mut merged = last;
            merged.append(&mut groups[0]);
            groups[0] = merged;
        } else if seam <= 2.0 * tol {
            return Err(SpectralError::ClusteringAmbiguity { gap: seam, tol });
        }
    }

    let clusters = groups
        .into_iter()
        .map(|members| {
            let sum: C64 = members.iter().map(|&i| decomp.eigenvalues[i]).sum();
            let representative = sum / sum.norm();
            let cols: Vec<Vec<C64>> = members.iter().map(|&i| decomp.eigenvectors.column(i)).collect();
            EigenCluster {
                representative,
                multiplicity: members.len(),
                vectors: ComplexMatrix::from_columns(&cols),
            }
        })
        .collect();
    Ok(EigenClusters {
        clusters,
        clustering_tol: tol,
    })
}

/// Reason a spectrum admits no anti-commuting partner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PairingDefect {
    /// No cluster sits at `-λ`.
    NegationAbsent { lambda: C64, multiplicity: usize },
    /// `-λ` exists with a different eigenspace dimension.
    MultiplicityMismatch {
        lambda: C64,
        multiplicity: usize,
        partner_multiplicity: usize,
    },
}

impl fmt::Display for PairingDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegationAbsent { lambda, multiplicity } => write!(
                f,
                "-λ absent for λ = {:.6}{:+.6}i (multiplicity {multiplicity})",
                lambda.re, lambda.im
            ),
            Self::MultiplicityMismatch {
                multiplicity,
                partner_multiplicity,
                ..
            } => write!(f, "multiplicity mismatch ({multiplicity} vs {partner_multiplicity})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingVerdict {
    pub paired: bool,
    /// `(index of the +λ cluster, index of the -λ cluster)`.
    pub pairs: Vec<(usize, usize)>,
    /// Every violated condition, in cluster order.
    pub defects: Vec<PairingDefect>,
}

impl PairingVerdict {
    /// First violated condition.
    pub fn defect(&self) -> Option<&PairingDefect> {
        self.defects.first()
    }
}

/// Matches every cluster `λ` with a distinct cluster at `-λ` (nearest phase,
/// within `tol`) of equal multiplicity.
pub fn check_pairing(clusters: &EigenClusters, tol: f64) -> PairingVerdict {
    let n = clusters.len();
    let mut used = vec![false; n];
    let mut pairs = Vec::new();
    let mut defects = Vec::new();
    for i in 0..n {
        if used[i] {
            continue;
        }
        let ci = &clusters.clusters[i];
        let target = -ci.representative;
        let nearest = (0..n)
            .filter(|&j| j != i)
            .map(|j| (j, angular_distance(clusters.clusters[j].representative, target)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((j, dist)) if dist <= tol && !used[j] => {
                used[i] = true;
                used[j] = true;
                let cj = &clusters.clusters[j];
                if ci.multiplicity != cj.multiplicity {
                    defects.push(PairingDefect::MultiplicityMismatch {
                        lambda: ci.representative,
                        multiplicity: ci.multiplicity,
                        partner_multiplicity: cj.multiplicity,
                    });
                } else if is_pair_representative(ci.representative) {
                    pairs.push((i, j));
                } else {
                    pairs.push((j, i));
                }
            }
            _ => {
                used[i] = true;
                defects.push(PairingDefect::NegationAbsent {
                    lambda: ci.representative,
                    multiplicity: ci.multiplicity,
                });
            }
        }
    }
    PairingVerdict {
        paired: defects.is_empty(),
        pairs,
        defects,
    }
}
