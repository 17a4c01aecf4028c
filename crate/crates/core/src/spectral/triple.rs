use std::fmt;

use serde::{Deserialize, Serialize};

use super::SpectralError;
use crate::linalg::{ComplexMatrix, UnitaryOperator, C64, I};
use crate::tol;

/// Branch of `U₁U₂U₃ = ±i·1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// `±i`.
    pub fn times_i(self) -> C64 {
        I * self.value()
    }

    pub fn from_i32(v: i32) -> Option<Self> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(Sign::Plus),
            "-1" | "-" => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other:?}")),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i32(self.value() as i32)
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = i32::deserialize(d)?;
        Sign::from_i32(v).ok_or_else(|| serde::de::Error::custom(format!("sign must be +1 or -1, got {v}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleResiduals {
    pub anticommutator_12: f64,
    pub anticommutator_13: f64,
    pub anticommutator_23: f64,
    /// `max |U₁U₂U₃ - sign·i·1|`.
    pub product: f64,
}

impl TripleResiduals {
    pub fn max(&self) -> f64 {
        self.anticommutator_12
            .max(self.anticommutator_13)
            .max(self.anticommutator_23)
            .max(self.product)
    }
}

/// Three unitaries of a common dimension together with the sign branch they
/// are meant to satisfy and their measured residuals.
///
/// A `PmsTriple` may hold operators that violate the algebra (for instance
/// one read from disk); [`PmsTriple::is_valid`] and
/// [`verify_algebra`](super::verify_algebra) decide.
#[derive(Debug, Clone, Serialize)]
pub struct PmsTriple {
    pub sign: Sign,
    pub u1: UnitaryOperator,
    pub u2: UnitaryOperator,
    pub u3: UnitaryOperator,
    pub residuals: TripleResiduals,
}

impl PmsTriple {
    pub fn from_parts(u1: UnitaryOperator, u2: UnitaryOperator, u3: UnitaryOperator, sign: Sign) -> Result<Self, SpectralError> {
        if u1.dim() != u2.dim() || u1.dim() != u3.dim() {
            return Err(SpectralError::DimensionMismatch(vec![u1.dim(), u2.dim(), u3.dim()]));
        }
        let residuals = measure(&u1, &u2, &u3, sign)?;
        Ok(Self {
            sign,
            u1,
            u2,
            u3,
            residuals,
        })
    }

    pub fn dim(&self) -> usize {
        self.u1.dim()
    }

    pub fn operators(&self) -> [&UnitaryOperator; 3] {
        [&self.u1, &self.u2, &self.u3]
    }

    /// All residuals within `tol` and even dimension.
    pub fn is_valid(&self, tol: f64) -> bool {
        self.dim().is_multiple_of(2) && self.residuals.max() <= tol
    }

    /// Copy with `u3` negated and the recorded sign unchanged.
    pub fn with_negated_u3(&self) -> Self {
        let u3 = UnitaryOperator::try_from_matrix(-self.u3.matrix()).expect("negation preserves unitarity");
        Self::from_parts(self.u1.clone(), self.u2.clone(), u3, self.sign).expect("dimensions unchanged")
    }
}

fn measure(u1: &ComplexMatrix, u2: &ComplexMatrix, u3: &ComplexMatrix, sign: Sign) -> Result<TripleResiduals, SpectralError> {
    let product = (&(u1 * u2) * u3).distance_to_scalar(sign.times_i());
    Ok(TripleResiduals {
        anticommutator_12: u1.anticommutator(u2)?.max_abs(),
        anticommutator_13: u1.anticommutator(u3)?.max_abs(),
        anticommutator_23: u2.anticommutator(u3)?.max_abs(),
        product,
    })
}

/// Completes an anti-commuting pair with `u3 = sign·i·u2†u1†`.
pub fn complete_triple(u1: &UnitaryOperator, u2: &UnitaryOperator, sign: Sign) -> Result<PmsTriple, SpectralError> {
    complete_triple_with(u1, u2, sign, tol::COMMUTATOR)
}

pub fn complete_triple_with(u1: &UnitaryOperator, u2: &UnitaryOperator, sign: Sign, tol: f64) -> Result<PmsTriple, SpectralError> {
    if u1.dim() != u2.dim() {
        return Err(SpectralError::DimensionMismatch(vec![u1.dim(), u2.dim()]));
    }
    let residual = u1.anticommutator(u2)?.max_abs();
    if residual > tol {
        return Err(SpectralError::AntiCommutation { residual, tol });
    }
    let u3 = (&u2.adjoint().into_matrix() * &u1.adjoint().into_matrix()).scale(sign.times_i());
    let u3 = UnitaryOperator::new(u3, tol)?;
    let triple = PmsTriple::from_parts(u1.clone(), u2.clone(), u3, sign)?;
    let worst = triple.residuals.max();
    if worst > tol {
        return Err(SpectralError::TripleResidual { residual: worst, tol });
    }
    Ok(triple)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorResidual {
    pub i: usize,
    pub j: usize,
    /// `max |[U_i, U_j] - branch·2i·ε_ijk·U_k†|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnticommutatorResidual {
    pub i: usize,
    pub j: usize,
    /// `max |{U_i, U_j} - 2δ_ij U_i²|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgebraReport {
    /// Branch of the commutator relation with the smaller worst residual.
    pub commutator_branch: Sign,
    pub commutators: Vec<CommutatorResidual>,
    pub max_commutator_residual: f64,
    /// Worst residual under the other branch.
    pub other_branch_residual: f64,
    pub anticommutators: Vec<AnticommutatorResidual>,
    pub max_anticommutator_residual: f64,
    /// `max |U₁U₂U₃ - sign·i·1|` for the triple's recorded sign.
    pub product_residual: f64,
    /// Whether the matched commutator branch equals the recorded sign.
    pub branch_consistent: bool,
    pub tol: f64,
    pub pass: bool,
}

/// Checks the commutation and anti-commutation relations of a triple.
///
/// Passing requires every commutator residual (for the better of the two
/// branches) and every anti-commutator residual to be within `tol`. The
/// product identity is reported against the recorded sign but does not
/// affect `pass`, so a triple whose `u3` was negated still passes while
/// `branch_consistent` turns false.
pub fn verify_algebra(triple: &PmsTriple, tol: f64) -> AlgebraReport {
    let ops = [triple.u1.matrix(), triple.u2.matrix(), triple.u3.matrix()];
    let adjoints: Vec<ComplexMatrix> = ops.iter().map(|u| u.adjoint()).collect();

    let branch_residuals = |branch: Sign| -> Vec<CommutatorResidual> {
        let mut out = Vec::with_capacity(6);
        for i in 0..3 {
            for j in 0..3 {
                if i == j {
                    continue;
                }
                let k = 3 - i - j;
                let eps = levi_civita(i, j, k);
                let comm = ops[i].commutator(ops[j]).expect("equal dimensions");
                let target = adjoints[k].scale(C64::new(0.0, 2.0 * branch.value() * eps));
                out.push(CommutatorResidual {
                    i: i + 1,
                    j: j + 1,
                    residual: comm.max_diff(&target),
                });
            }
        }
        out
    };
    let worst = |v: &[CommutatorResidual]| v.iter().fold(0.0_f64, |a, r| a.max(r.residual));

    let plus = branch_residuals(Sign::Plus);
    let minus = branch_residuals(Sign::Minus);
    let (branch, commutators, other) = if worst(&plus) <= worst(&minus) {
        (Sign::Plus, plus, worst(&minus))
    } else {
        (Sign::Minus, minus, worst(&plus))
    };
    let max_commutator_residual = worst(&commutators);

    let mut anticommutators = Vec::with_capacity(6);
    for i in 0..3 {
        for j in i..3 {
            let ac = ops[i].anticommutator(ops[j]).expect("equal dimensions");
            let residual = if i == j {
                let sq = ops[i] * ops[i];
                ac.max_diff(&sq.scale(C64::new(2.0, 0.0)))
            } else {
                ac.max_diff(&ComplexMatrix::zeros(ac.rows(), ac.cols()))
            };
            anticommutators.push(AnticommutatorResidual {
                i: i + 1,
                j: j + 1,
                residual,
            });
        }
    }
    let max_anticommutator_residual = anticommutators.iter().fold(0.0_f64, |a, r| a.max(r.residual));

    AlgebraReport {
        commutator_branch: branch,
        commutators,
        max_commutator_residual,
        other_branch_residual: other,
        anticommutators,
        max_anticommutator_residual,
        product_residual: triple.residuals.product,
        branch_consistent: branch == triple.sign,
        tol,
        pass: max_commutator_residual <= tol && max_anticommutator_residual <= tol,
    }
}

fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Sign branch suggested by `U₁U₂U₃`: whichever of `±i` is closer.
pub fn infer_sign(u1: &ComplexMatrix, u2: &ComplexMatrix, u3: &ComplexMatrix) -> Sign {
    let p = &(u1 * u2) * u3;
    if p.distance_to_scalar(I) <= p.distance_to_scalar(-I) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}
