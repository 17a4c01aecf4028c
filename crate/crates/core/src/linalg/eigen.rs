use super::{ComplexMatrix, LinalgError, UnitaryOperator, C64, ONE, ZERO};
use crate::tol;

/// Off-diagonal Frobenius norm, relative to `max(1, ‖A‖_F)`, at which a
/// Jacobi sweep sequence stops.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Width used to group nearly equal eigenvalues of `(U + U†)/2` before the
/// second diagonalization pass. Eigenvalues `e^{±iθ}` share a real part, so
/// such groups are where the imaginary part has to split the spectrum.
const REAL_PART_GROUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
    pub sweeps: usize,
}

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix.
pub fn eigh(h: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let residual = h.hermiticity_residual();
    let scale = h.max_abs().max(1.0);
    if residual > tol::HERMITIAN * scale {
        return Err(LinalgError::NotHermitian { residual });
    }
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = JACOBI_TOL * h.frobenius().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NoConvergence { residual: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with `A ← G†AG`, `V ← VG`, where
/// `G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]` on the `(p, q)` plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal in floating point.
    if g < f64::EPSILON * 1e-3 * (alpha.abs() + beta.abs()) {
        a[(p, q)] = ZERO;
        a[(q, p)] = ZERO;
        return;
    }
    let phase = apq / g; // e^{iφ}
    let e = phase.conj(); // e^{-iφ}
    let theta = (beta - alpha) / (2.0 * g);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = a.rows();

    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)];
        a[(k, p)] = x * c - y * e * s;
        a[(k, q)] = x * s + y * e * c;
    }
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)];
        a[(p, k)] = x * c - y * phase * s;
        a[(q, k)] = x * s + y * phase * c;
    }
    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)];
        v[(k, p)] = x * c - y * e * s;
        v[(k, q)] = x * s + y * e * c;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

/// `U = V diag(λ) V†` with orthonormal columns in `V`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: ComplexMatrix,
    /// `max |U - V diag(λ) V†|`.
    pub reconstruction_residual: f64,
    /// `max |V†V - 1|`.
    pub orthonormality_residual: f64,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        reconstruct(&self.eigenvectors, &self.eigenvalues)
    }
}

fn reconstruct(vectors: &ComplexMatrix, values: &[C64]) -> ComplexMatrix {
    let scaled = ComplexMatrix::from_fn(vectors.rows(), vectors.cols(), |i, j| vectors[(i, j)] * values[j]);
    &scaled * &vectors.adjoint()
}

/// Eigendecomposition of a unitary through its commuting Hermitian pair
/// `B = (U+U†)/2`, `C = (U-U†)/2i`: diagonalize `B`, then diagonalize `C`
/// inside each (near-)degenerate eigenspace of `B`.
pub fn eig_unitary(u: &UnitaryOperator) -> Result<SpectralDecomposition, LinalgError> {
    eig_unitary_with(u.matrix(), tol::RECONSTRUCTION)
}

/// As [`eig_unitary`] for a raw matrix, failing when the reconstruction
/// residual exceeds `tol`.
pub fn eig_unitary_with(u: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition, LinalgError> {
    if !u.is_square() {
        return Err(LinalgError::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let n = u.rows();
    let b = u.hermitian_part();
    let c = u.antihermitian_part();
    let HermitianEigen {
        values,
        vectors: mut w,
        ..
    } = eigh(&b)?;

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= REAL_PART_GROUP_TOL {
            end += 1;
        }
        if end - start > 1 {
            split_group(&mut w, &c, start, end)?;
        }
        start = end;
    }

    let uw = u * &w;
    let eigenvalues: Vec<C64> = (0..n)
        .map(|k| {
            let lambda: C64 = (0..n).map(|i| w[(i, k)].conj() * uw[(i, k)]).sum();
            let r = lambda.norm();
            if r > 0.0 {
                lambda / r
            } else {
                lambda
            }
        })
        .collect();

    let reconstruction_residual = reconstruct(&w, &eigenvalues).max_diff(u);
    let orthonormality_residual = (&w.adjoint() * &w).distance_to_scalar(ONE);
    if reconstruction_residual > tol {
        return Err(LinalgError::Reconstruction {
            residual: reconstruction_residual,
            tol,
        });
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors: w,
        reconstruction_residual,
        orthonormality_residual,
    })
}

/// Rotates columns `start..end` of `w` into eigenvectors of `W_g† C W_g`.
fn split_group(w: &mut ComplexMatrix, c: &ComplexMatrix, start: usize, end: usize) -> Result<(), LinalgError> {
    let n = w.rows();
    let k = end - start;
    let wg = ComplexMatrix::from_fn(n, k, |i, j| w[(i, start + j)]);
    let restricted = &(&wg.adjoint() * c) * &wg;
    let inner = eigh(&restricted.hermitian_part())?;
    let rotated = &wg * &inner.vectors;
    for j in 0..k {
        for i in 0..n {
            w[(i, start + j)] = rotated[(i, j)];
        }
    }
    Ok(())
}

/// `exp(i t h)` for Hermitian `h`, through `h = W diag(ω) W†`.
pub fn expm_i_hermitian(h: &ComplexMatrix, t: f64) -> Result<UnitaryOperator, LinalgError> {
    let eig = eigh(h)?;
    let phases: Vec<C64> = eig.values.iter().map(|&w| C64::from_polar(1.0, t * w)).collect();
    let m = reconstruct(&eig.vectors, &phases);
    UnitaryOperator::new(m, 1e-9)
}

/// Unitary polar factor `M (M†M)^{-1/2}`, the unitary closest to `M` in
/// Frobenius norm.
pub fn nearest_unitary(m: &ComplexMatrix) -> Result<UnitaryOperator, LinalgError> {
    let gram = (&m.adjoint() * m).hermitian_part();
    let eig = eigh(&gram)?;
    if eig.values[0] <= f64::EPSILON * eig.values[eig.values.len() - 1].max(1.0) {
        return Err(LinalgError::InvalidArgument("matrix is singular".into()));
    }
    let inv_sqrt: Vec<C64> = eig.values.iter().map(|&w| C64::new(1.0 / w.sqrt(), 0.0)).collect();
    UnitaryOperator::new(m * &reconstruct(&eig.vectors, &inv_sqrt), 1e-9)
}
