use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{ComplexMatrix, DensityMatrix, LinalgError, StateVector, UnitaryOperator, C64};

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent seed for item `index` of stream `stream`.
///
/// Lets parallel loops draw per-item generators so results do not depend on
/// scheduling.
pub fn stream_seed(seed: u64, stream: u64, index: u64) -> u64 {
    let mut x = seed
        ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ index.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    // splitmix64 finalizer
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Unitarily invariant random pure state: normalized complex Gaussian vector.
pub fn haar_state(dim: usize, seed: u64) -> Result<StateVector, LinalgError> {
    if dim == 0 {
        return Err(LinalgError::InvalidArgument("state dimension must be at least 1".into()));
    }
    let mut rng = seeded_rng(seed);
    loop {
        let amps: Vec<C64> = (0..dim).map(|_| complex_gaussian(&mut rng)).collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            let amps = amps.into_iter().map(|z| z / norm).collect();
            return StateVector::new(amps);
        }
    }
}

/// `ρ = G G† / tr(G G†)` for a seeded `dim × rank` complex Gaussian `G`.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix, LinalgError> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(LinalgError::InvalidArgument(format!(
            "rank must satisfy 1 <= rank <= dim (dim = {dim}, rank = {rank})"
        )));
    }
    let mut rng = seeded_rng(seed);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| complex_gaussian(&mut rng));
    let w = &g * &g.adjoint();
    let tr = w.trace().re;
    let rho = w.scale(C64::new(1.0 / tr, 0.0)).hermitian_part();
    DensityMatrix::new(rho)
}

/// Haar-random unitary: Gram-Schmidt (applied twice) on a Ginibre matrix,
/// which is the QR factor with positive diagonal `R`.
pub fn haar_unitary(dim: usize, seed: u64) -> UnitaryOperator {
    assert!(dim > 0, "haar_unitary needs a positive dimension");
    let mut rng = seeded_rng(seed);
    let mut cols: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    for j in 0..dim {
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let proj: C64 = qk.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, q) in rest[0].iter_mut().zip(qk) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    let m = ComplexMatrix::from_columns(&cols);
    UnitaryOperator::try_from_matrix(m).expect("Gram-Schmidt output is unitary")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_state_dim_one_has_unit_norm() {
        let s = haar_state(1, 42).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn haar_state_is_deterministic() {
        assert_eq!(haar_state(6, 9).unwrap(), haar_state(6, 9).unwrap());
        assert_ne!(haar_state(6, 9).unwrap(), haar_state(6, 10).unwrap());
        assert!(haar_state(0, 1).is_err());
    }

    #[test]
    fn haar_marginal_mean_is_uniform() {
        // |ψ_0|² ~ Beta(1, d-1): mean 1/d, variance (d-1)/(d²(d+1)).
        let d: f64 = 4.0;
        let n = 10_000;
        let samples: Vec<f64> = (0..n)
            .map(|i| haar_state(4, stream_seed(7, 0, i)).unwrap().amplitudes()[0].norm_sqr())
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let sd = ((d - 1.0) / (d * d * (d + 1.0))).sqrt();
        let se = sd / (n as f64).sqrt();
        assert!((mean - 0.25).abs() < 3.0 * se, "mean {mean}, se {se}");
    }

    #[test]
    fn random_density_properties() {
        let full = random_density(4, 4, 5).unwrap();
        assert!((full.matrix().trace().re - 1.0).abs() < 1e-12);
        assert!(full.purity() < 1.0 - 1e-6);
        let pure = random_density(4, 1, 5).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        assert!(random_density(3, 4, 1).is_err());
        assert!(random_density(3, 0, 1).is_err());
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u = haar_unitary(12, 1);
        assert!(u.unitarity_residual() < 1e-13);
    }
}
