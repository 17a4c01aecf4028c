use crate::linalg::{ComplexMatrix, DensityMatrix, C64, ONE, ZERO};

#[derive(Debug, Clone)]
struct KronTerm {
    coeff: C64,
    left: ComplexMatrix,
    right: ComplexMatrix,
}

/// Bipartite operator kept as `Σ_t c_t · L_t ⊗ R_t` over square local
/// factors of one common dimension.
///
/// Every entry of the square is a single product term, so context products
/// and Hermitian-part expansions stay short sums that never need the full
/// `d² × d²` matrix unless asked for.
#[derive(Debug, Clone)]
pub struct KronOp {
    local_dim: usize,
    terms: Vec<KronTerm>,
}

impl KronOp {
    pub fn product(left: ComplexMatrix, right: ComplexMatrix) -> Self {
        assert!(left.is_square() && right.is_square() && left.rows() == right.rows());
        Self {
            local_dim: left.rows(),
            terms: vec![KronTerm {
                coeff: ONE,
                left,
                right,
            }],
        }
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn dim(&self) -> usize {
        self.local_dim * self.local_dim
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn mul(&self, rhs: &KronOp) -> KronOp {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                terms.push(KronTerm {
                    coeff: a.coeff * b.coeff,
                    left: &a.left * &b.left,
                    right: &a.right * &b.right,
                });
            }
        }
        KronOp {
            local_dim: self.local_dim,
            terms,
        }
    }

    pub fn scale(&self, z: C64) -> KronOp {
        KronOp {
            local_dim: self.local_dim,
            terms: self
                .terms
                .iter()
                .map(|t| KronTerm {
                    coeff: t.coeff * z,
                    ..t.clone()
                })
                .collect(),
        }
    }

    pub fn add(&self, rhs: &KronOp) -> KronOp {
        let mut terms = self.terms.clone();
        terms.extend(rhs.terms.iter().cloned());
        KronOp {
            local_dim: self.local_dim,
            terms,
        }
    }

    pub fn sub(&self, rhs: &KronOp) -> KronOp {
        self.add(&rhs.scale(-ONE))
    }

    pub fn adjoint(&self) -> KronOp {
        KronOp {
            local_dim: self.local_dim,
            terms: self
                .terms
                .iter()
                .map(|t| KronTerm {
                    coeff: t.coeff.conj(),
                    left: t.left.adjoint(),
                    right: t.right.adjoint(),
                })
                .collect(),
        }
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> KronOp {
        self.add(&self.adjoint()).scale(C64::new(0.5, 0.0))
    }

    /// `(A - A†)/(2i)`.
    pub fn antihermitian_part(&self) -> KronOp {
        self.sub(&self.adjoint()).scale(C64::new(0.0, -0.5))
    }

    /// `[A, B]`.
    pub fn commutator(&self, rhs: &KronOp) -> KronOp {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    /// Dense `d² × d²` matrix, index `(i·d + k, j·d + l)` for `L[i,j] R[k,l]`.
    pub fn to_full(&self) -> ComplexMatrix {
        let d = self.local_dim;
        let n = d * d;
        let mut out = ComplexMatrix::zeros(n, n);
        for t in &self.terms {
            for i in 0..d {
                for j in 0..d {
                    let l = t.left[(i, j)] * t.coeff;
                    if l == ZERO {
                        continue;
                    }
                    for k in 0..d {
                        for m in 0..d {
                            out[(i * d + k, j * d + m)] += l * t.right[(k, m)];
                        }
                    }
                }
            }
        }
        out
    }

    /// Visits every entry of `self - z·1` without materializing it; returns
    /// the largest modulus.
    fn max_abs_shifted(&self, z: C64) -> f64 {
        let d = self.local_dim;
        let mut worst: f64 = 0.0;
        let mut row = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                row.iter_mut().for_each(|x| *x = ZERO);
                for t in &self.terms {
                    for j in 0..d {
                        let l = t.left[(i, j)] * t.coeff;
                        if l == ZERO {
                            continue;
                        }
                        for m in 0..d {
                            row[j * d + m] += l * t.right[(k, m)];
                        }
                    }
                }
                row[i * d + k] -= z;
                worst = row.iter().fold(worst, |w, x| w.max(x.norm()));
            }
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_shifted(ZERO)
    }

    /// `max |A - z·1|`.
    pub fn distance_to_scalar(&self, z: C64) -> f64 {
        self.max_abs_shifted(z)
    }

    /// `tr(ρ A)` for a joint state on the `d²`-dimensional space.
    pub fn expectation(&self, rho: &DensityMatrix) -> C64 {
        let d = self.local_dim;
        let r = rho.matrix();
        debug_assert_eq!(rho.dim(), d * d);
        let mut acc = ZERO;
        for t in &self.terms {
            let mut term = ZERO;
            // tr(ρ (L⊗R)) = Σ ρ[(i,k),(j,l)] L[j,i] R[l,k]
            for i in 0..d {
                for j in 0..d {
                    let l = t.left[(j, i)];
                    if l == ZERO {
                        continue;
                    }
                    let mut inner = ZERO;
                    for k in 0..d {
                        for m in 0..d {
                            inner += r[(i * d + k, j * d + m)] * t.right[(m, k)];
                        }
                    }
                    term += l * inner;
                }
            }
            acc += t.coeff * term;
        }
        acc
    }

    /// `tr((ρ_a ⊗ ρ_b) A) = Σ_t c_t tr(ρ_a L_t) tr(ρ_b R_t)`.
    pub fn expectation_product(&self, rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> C64 {
        self.terms
            .iter()
            .map(|t| {
                let a = rho_a.expectation(&t.left).expect("local dimension");
                let b = rho_b.expectation(&t.right).expect("local dimension");
                t.coeff * a * b
            })
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, pauli, random_density, tensor};

    #[test]
    fn full_matches_tensor() {
        let a = KronOp::product(pauli::x(), pauli::y());
        assert_eq!(a.to_full(), tensor(&pauli::x(), &pauli::y()).unwrap());
    }

    #[test]
    fn products_and_parts_match_dense_algebra() {
        let (u, v, w) = (haar_unitary(3, 1), haar_unitary(3, 2), haar_unitary(3, 3));
        let a = KronOp::product(u.matrix().clone(), v.matrix().clone());
        let b = KronOp::product(w.matrix().clone(), u.matrix().clone());
        let dense_a = a.to_full();
        let dense_b = b.to_full();
        assert!(a.mul(&b).to_full().max_diff(&(&dense_a * &dense_b)) < 1e-13);
        assert!(a.hermitian_part().to_full().max_diff(&dense_a.hermitian_part()) < 1e-14);
        assert!(a.antihermitian_part().to_full().max_diff(&dense_a.antihermitian_part()) < 1e-14);
        let comm = a.commutator(&b);
        assert!((comm.max_abs() - comm.to_full().max_abs()).abs() < 1e-14);
        let rho = random_density(9, 9, 4).unwrap();
        let direct = rho.expectation(&dense_a).unwrap();
        assert!((a.expectation(&rho) - direct).norm() < 1e-14);
    }

    #[test]
    fn product_state_factorizes() {
        let a = KronOp::product(haar_unitary(2, 5).into_matrix(), haar_unitary(2, 6).into_matrix());
        let ra = random_density(2, 2, 1).unwrap();
        let rb = random_density(2, 1, 2).unwrap();
        let joint = DensityMatrix::product(&ra, &rb).unwrap();
        assert!((a.expectation(&joint) - a.expectation_product(&ra, &rb)).norm() < 1e-14);
    }

    #[test]
    fn distance_to_scalar_of_identity() {
        let id = KronOp::product(ComplexMatrix::identity(3), ComplexMatrix::identity(3));
        assert_eq!(id.distance_to_scalar(ONE), 0.0);
        assert_eq!(id.distance_to_scalar(-ONE), 2.0);
    }
}
