use super::{tensor, ComplexMatrix, LinalgError, C64, ZERO};

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const NEGATIVITY_TOL: f64 = 1e-10;

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, LinalgError> {
        if amplitudes.is_empty() {
            return Err(LinalgError::EmptyDimension);
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(LinalgError::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm first.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self, LinalgError> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LinalgError::NotNormalized { norm_sqr: norm * norm });
        }
        Self::new(amplitudes.into_iter().map(|z| z / norm).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = C64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> DensityMatrix {
        let n = self.dim();
        let m = ComplexMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix { matrix: m }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self, LinalgError> {
        if !matrix.is_square() {
            return Err(LinalgError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let herm = matrix.hermiticity_residual();
        if herm > HERMITIAN_TOL {
            return Err(LinalgError::InvalidDensity(format!("hermiticity residual {herm:e}")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(LinalgError::InvalidDensity(format!("trace {tr}")));
        }
        if !is_positive_semidefinite(&matrix, NEGATIVITY_TOL) {
            return Err(LinalgError::InvalidDensity("negative eigenvalue below -1e-10".into()));
        }
        Ok(Self { matrix })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = ComplexMatrix::identity(dim).scale(C64::new(1.0 / dim as f64, 0.0));
        Self { matrix: m }
    }

    /// `ρ_a ⊗ ρ_b`.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self, LinalgError> {
        Ok(Self {
            matrix: tensor(&a.matrix, &b.matrix)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64, LinalgError> {
        if op.rows() != self.dim() || op.cols() != self.dim() {
            return Err(LinalgError::ShapeMismatch {
                op: "expectation",
                left: (self.dim(), self.dim()),
                right: (op.rows(), op.cols()),
            });
        }
        let n = self.dim();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        Ok(acc)
    }
}

impl From<&StateVector> for DensityMatrix {
    fn from(s: &StateVector) -> Self {
        s.projector()
    }
}

/// Cholesky of `A + shift·1`; succeeds iff every eigenvalue exceeds `-shift`
/// (up to rounding).
fn is_positive_semidefinite(a: &ComplexMatrix, shift: f64) -> bool {
    let n = a.rows();
    let mut l = vec![ZERO; n * n];
    for j in 0..n {
        let mut diag = a[(j, j)].re + shift;
        for k in 0..j {
            diag -= l[j * n + k].norm_sqr();
        }
        if diag <= 0.0 {
            return false;
        }
        let ljj = diag.sqrt();
        l[j * n + j] = C64::new(ljj, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / ljj;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_state() {
        let err = StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, LinalgError::NotNormalized { .. }));
        assert!(StateVector::normalized(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)]).is_ok());
    }

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        let neg = ComplexMatrix::from_diagonal(&[C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]);
        assert!(DensityMatrix::new(neg).is_err());
        let ok = DensityMatrix::new(ComplexMatrix::from_diagonal(&[C64::new(1.0, 0.0), ZERO])).unwrap();
        assert!((ok.purity() - 1.0).abs() < 1e-15);
        assert!((DensityMatrix::maximally_mixed(4).purity() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn projector_expectation() {
        let s = StateVector::basis(2, 0);
        let rho = s.projector();
        let z = crate::linalg::pauli::z();
        assert!((rho.expectation(&z).unwrap() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
