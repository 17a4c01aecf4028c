use std::f64::consts::PI;

use serde::Serialize;

use super::{check_pairing, cluster_spectrum, PmsTriple, Sign, SpectralError};
use crate::linalg::{
    direct_sum, eig_unitary_with, pauli, ComplexMatrix, UnitaryOperator, C64,
};
use crate::tol::Tolerances;

/// Basis in which a valid triple reads `⊕ λ_i σ_z`, `⊕ λ_i' σ_x`,
/// `sign·⊕ (λ_i λ_i')* σ_y`, each block repeated `K_i` times.
#[derive(Debug, Clone, Serialize)]
pub struct CanonicalForm {
    /// Change of basis `V`; columns come in `(e⁺, e⁻)` pairs.
    pub basis: UnitaryOperator,
    pub lambdas: Vec<C64>,
    pub lambda_primes: Vec<C64>,
    pub block_multiplicities: Vec<usize>,
    /// Number of distinct `(λ_i, λ_i')` blocks.
    pub n_blocks: usize,
    pub sign: Sign,
    /// `max |V D_k V† - u_k|` for `k = 1, 2, 3`.
    pub residuals: [f64; 3],
}

impl CanonicalForm {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// The three block-diagonal operators in the canonical basis.
    pub fn diagonal_forms(&self) -> [ComplexMatrix; 3] {
        let mut z_blocks = Vec::new();
        let mut x_blocks = Vec::new();
        let mut y_blocks = Vec::new();
        for ((&lambda, &prime), &k) in self.lambdas.iter().zip(&self.lambda_primes).zip(&self.block_multiplicities) {
            let y_coeff = (lambda * prime).conj() * self.sign.value();
            for _ in 0..k {
                z_blocks.push(pauli::z().scale(lambda));
                x_blocks.push(pauli::x().scale(prime));
                y_blocks.push(pauli::y().scale(y_coeff));
            }
        }
        [
            direct_sum(&z_blocks).expect("non-empty"),
            direct_sum(&x_blocks).expect("non-empty"),
            direct_sum(&y_blocks).expect("non-empty"),
        ]
    }

    /// `V D_k V†` for each of the three canonical operators.
    pub fn reconstruct(&self) -> [ComplexMatrix; 3] {
        let v = self.basis.matrix();
        let vh = v.adjoint();
        self.diagonal_forms().map(|d| &(v * &d) * &vh)
    }
}

/// `exp(i·arg(μ)/2)` with `arg ∈ (-π, π]`; values within `snap` of `-π`
/// count as `+π`.
fn principal_sqrt_phase(mu: C64, snap: f64) -> C64 {
    let mut a = mu.arg();
    if a <= -PI + snap {
        a += 2.0 * PI;
    }
    C64::from_polar(1.0, a / 2.0)
}

pub fn canonical_form(triple: &PmsTriple) -> Result<CanonicalForm, SpectralError> {
    canonical_form_with(triple, &Tolerances::default())
}

/// Extracts the canonical block form of a triple.
///
/// `V` is assembled from the eigenvectors `e⁺` of `u1` at each `+λ` cluster,
/// rotated so that they diagonalize `u2²` there, with the partner column
/// `e⁻ = u2 e⁺ / λ'` and `λ'² ` the corresponding eigenvalue of `u2²`.
pub fn canonical_form_with(triple: &PmsTriple, tol: &Tolerances) -> Result<CanonicalForm, SpectralError> {
    let u1 = triple.u1.matrix();
    let u2 = triple.u2.matrix();
    let d = triple.dim();
    let decomp = eig_unitary_with(u1, tol.reconstruction)?;
    let clusters = cluster_spectrum(&decomp, tol.cluster)?;
    let verdict = check_pairing(&clusters, tol.pairing);
    if let Some(defect) = verdict.defect() {
        return Err(SpectralError::Pairing {
            defect: defect.clone(),
            verdict: Box::new(verdict.clone()),
        });
    }

    let u2_squared = u2 * u2;
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(d);
    let mut lambdas = Vec::new();
    let mut lambda_primes = Vec::new();
    let mut multiplicities = Vec::new();

    for &(plus, _) in &verdict.pairs {
        let cluster = &clusters.clusters[plus];
        let lambda = cluster.representative;
        let e_plus = &cluster.vectors;
        // u2² maps the λ eigenspace to itself
        let restricted = &(&e_plus.adjoint() * &u2_squared) * e_plus;
        let inner = eig_unitary_with(&restricted, tol.reconstruction)?;
        let rotated = e_plus * &inner.eigenvectors;

        let mut members: Vec<(C64, Vec<C64>, Vec<C64>)> = (0..rotated.cols())
            .map(|j| {
                let prime = principal_sqrt_phase(inner.eigenvalues[j], tol.cluster);
                let ep = rotated.column(j);
                let em: Vec<C64> = u2.apply(&ep).expect("matching dimension").into_iter().map(|z| z / prime).collect();
                (prime, ep, em)
            })
            .collect();
        members.sort_by(|a, b| a.0.arg().total_cmp(&b.0.arg()));

        let mut start = 0;
        while start < members.len() {
            let prime = members[start].0;
            let mut end = start + 1;
            while end < members.len() && (members[end].0 - prime).norm() <= tol.cluster {
                end += 1;
            }
            lambdas.push(lambda);
            lambda_primes.push(prime);
            multiplicities.push(end - start);
            for (_, ep, em) in &members[start..end] {
                columns.push(ep.clone());
                columns.push(em.clone());
            }
            start = end;
        }
    }

    let basis = UnitaryOperator::new(ComplexMatrix::from_columns(&columns), tol.reconstruction)?;
    let mut form = CanonicalForm {
        basis,
        n_blocks: lambdas.len(),
        lambdas,
        lambda_primes,
        block_multiplicities: multiplicities,
        sign: triple.sign,
        residuals: [0.0; 3],
    };
    let rebuilt = form.reconstruct();
    for (k, (r, u)) in rebuilt.iter().zip(triple.operators()).enumerate() {
        form.residuals[k] = r.max_diff(u.matrix());
    }
    let worst = form.residuals.iter().fold(0.0_f64, |a, &r| a.max(r));
    if worst > tol.reconstruction {
        return Err(SpectralError::Reconstruction {
            residual: worst,
            tol: tol.reconstruction,
        });
    }
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, ONE};
    use crate::spectral::complete_triple;

    fn pauli_triple() -> PmsTriple {
        let x = UnitaryOperator::try_from_matrix(pauli::x()).unwrap();
        let z = UnitaryOperator::try_from_matrix(pauli::z()).unwrap();
        complete_triple(&x, &z, Sign::Minus).unwrap()
    }

    #[test]
    fn pauli_is_a_single_block() {
        let f = canonical_form(&pauli_triple()).unwrap();
        assert_eq!(f.n_blocks, 1);
        assert_eq!(f.block_multiplicities, vec![1]);
        assert!((f.lambdas[0] - ONE).norm() < 1e-12);
        assert!((f.lambda_primes[0] - ONE).norm() < 1e-12);
        assert!(f.residuals.iter().all(|&r| r < 1e-12));
    }

    #[test]
    fn scrambled_blocks_round_trip() {
        // Same λ on two blocks with distinct λ' must split into two blocks.
        let lam = C64::from_polar(1.0, 0.4);
        let p1 = C64::from_polar(1.0, 1.1);
        let p2 = C64::from_polar(1.0, -2.0);
        let d1 = direct_sum(&[pauli::z().scale(lam), pauli::z().scale(lam)]).unwrap();
        let d2 = direct_sum(&[pauli::x().scale(p1), pauli::x().scale(p2)]).unwrap();
        let v = haar_unitary(4, 99);
        let conj = |m: &ComplexMatrix| UnitaryOperator::try_from_matrix(&(v.matrix() * m) * &v.adjoint()).unwrap();
        let t = complete_triple(&conj(&d1), &conj(&d2), Sign::Plus).unwrap();
        let f = canonical_form(&t).unwrap();
        assert_eq!(f.n_blocks, 2);
        assert!(f.residuals.iter().all(|&r| r < 1e-10), "{:?}", f.residuals);
        assert_eq!(f.block_multiplicities.iter().map(|k| 2 * k).sum::<usize>(), 4);
    }
}
