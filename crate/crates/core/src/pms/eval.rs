use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::kron::KronOp;
use super::square::{Context, PmsSquare};
use super::PmsError;
use crate::linalg::{ComplexMatrix, DensityMatrix, C64, ZERO};

/// Classical bound on `⟨Re X⟩` for unit-modulus assignments.
pub const BOUND_NONCONTEXTUAL: f64 = 5.196_152_422_706_632; // 3√3
/// Algebraic maximum of `⟨Re X⟩`.
pub const BOUND_QUANTUM_MAX: f64 = 6.0;

/// Largest bipartite dimension for which context operators are stored as
/// dense matrices; above it expectations stream over Kronecker terms.
const DENSE_LIMIT: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPath {
    Direct,
    Hermitian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
    /// `ρ_a ⊗ ρ_b`, evaluated factor by factor.
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDescriptor {
    pub kind: StateKind,
    pub seed: Option<u64>,
}

impl StateDescriptor {
    /// Unseeded descriptor; the kind is read off the purity.
    pub fn of(state: &DensityMatrix) -> Self {
        let kind = if (state.purity() - 1.0).abs() < 1e-10 {
            StateKind::Pure
        } else {
            StateKind::Mixed
        };
        Self { kind, seed: None }
    }
}

/// Per-context values in `R1, R2, R3, C1, C2, C3` order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terms {
    #[serde(rename = "R1")]
    pub r1: f64,
    #[serde(rename = "R2")]
    pub r2: f64,
    #[serde(rename = "R3")]
    pub r3: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C3")]
    pub c3: f64,
}

impl Terms {
    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            r1: v[0],
            r2: v[1],
            r3: v[2],
            c1: v[3],
            c2: v[4],
            c3: v[5],
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.r1, self.r2, self.r3, self.c1, self.c2, self.c3]
    }

    /// `R1 + R2 + R3 + C1 + C2 - C3`.
    pub fn combined(&self) -> f64 {
        self.r1 + self.r2 + self.r3 + self.c1 + self.c2 - self.c3
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationReport {
    pub terms: Terms,
    /// `⟨Re X⟩`.
    pub total: f64,
    pub path: EvalPath,
    pub state: StateDescriptor,
    /// Imaginary parts of the same six expectations, and `⟨Im X⟩`.
    pub im_terms: Terms,
    pub im_total: f64,
    pub context_order: Vec<String>,
    pub bound_noncontextual: f64,
    pub bound_quantum_max: f64,
}

impl ViolationReport {
    fn new(values: [C64; 6], path: EvalPath, state: StateDescriptor) -> Self {
        let terms = Terms::from_array(values.map(|z| z.re));
        let im_terms = Terms::from_array(values.map(|z| z.im));
        Self {
            total: terms.combined(),
            im_total: im_terms.combined(),
            terms,
            im_terms,
            path,
            state,
            context_order: Context::ALL.iter().map(|c| c.order()).collect(),
            bound_noncontextual: BOUND_NONCONTEXTUAL,
            bound_quantum_max: BOUND_QUANTUM_MAX,
        }
    }

    pub fn exceeds_noncontextual(&self) -> bool {
        self.total > self.bound_noncontextual
    }
}

/// Context operators of a square, precomputed for repeated evaluation.
///
/// The direct route uses the ordered products `A_a A_b A_c`. The Hermitian
/// route splits every entry as `A = A^R + i A^I` and evaluates
///
/// ```text
/// (A^R_a A^R_b - A^I_a A^I_b) A^R_c - (A^I_a A^R_b + A^R_a A^I_b) A^I_c
/// ```
///
/// and the matching imaginary combination, without forming the products.
#[derive(Debug, Clone)]
pub struct PreparedSquare {
    local_dim: usize,
    direct: Vec<KronOp>,
    hermitian: Vec<HermitianPair>,
    dense: Option<Dense>,
}

/// Operators whose expectations give the real and imaginary parts along the
/// Hermitian route.
#[derive(Debug, Clone)]
struct HermitianPair {
    re: KronOp,
    im: KronOp,
}

#[derive(Debug, Clone)]
struct Dense {
    direct: Vec<ComplexMatrix>,
    hermitian: Vec<(ComplexMatrix, ComplexMatrix)>,
}

impl PreparedSquare {
    pub fn new(square: &PmsSquare) -> Self {
        let direct: Vec<KronOp> = Context::ALL.iter().map(|&c| square.context_kron(c)).collect();
        let hermitian: Vec<HermitianPair> = Context::ALL
            .iter()
            .map(|&ctx| {
                let [a, b, c] = ctx.cells().map(|(j, k)| {
                    let op = square.kron(j, k);
                    (op.hermitian_part(), op.antihermitian_part())
                });
                let (ar, ai) = a;
                let (br, bi) = b;
                let (cr, ci) = c;
                let p = ar.mul(&br).sub(&ai.mul(&bi));
                let q = ai.mul(&br).add(&ar.mul(&bi));
                HermitianPair {
                    re: p.mul(&cr).sub(&q.mul(&ci)),
                    im: p.mul(&ci).add(&q.mul(&cr)),
                }
            })
            .collect();
        let dense = (square.dim() <= DENSE_LIMIT).then(|| Dense {
            direct: direct.iter().map(KronOp::to_full).collect(),
            hermitian: hermitian.iter().map(|h| (h.re.to_full(), h.im.to_full())).collect(),
        });
        Self {
            local_dim: square.local_dim(),
            direct,
            hermitian,
            dense,
        }
    }

    pub fn dim(&self) -> usize {
        self.local_dim * self.local_dim
    }

    fn check_dim(&self, state: &DensityMatrix) -> Result<(), PmsError> {
        if state.dim() != self.dim() {
            return Err(PmsError::StateDimension {
                expected: self.dim(),
                found: state.dim(),
            });
        }
        Ok(())
    }

    /// Six complex context expectations along one route.
    pub fn context_values(&self, state: &DensityMatrix, path: EvalPath) -> Result<[C64; 6], PmsError> {
        self.check_dim(state)?;
        let mut out = [ZERO; 6];
        for (i, v) in out.iter_mut().enumerate() {
            *v = match (path, &self.dense) {
                (EvalPath::Direct, Some(d)) => trace_product(state.matrix(), &d.direct[i]),
                (EvalPath::Direct, None) => self.direct[i].expectation(state),
                (EvalPath::Hermitian, Some(d)) => {
                    let (re, im) = &d.hermitian[i];
                    combine(trace_product(state.matrix(), re), trace_product(state.matrix(), im))
                }
                (EvalPath::Hermitian, None) => {
                    let h = &self.hermitian[i];
                    combine(h.re.expectation(state), h.im.expectation(state))
                }
            };
        }
        Ok(out)
    }

    pub fn evaluate(&self, state: &DensityMatrix, path: EvalPath, descriptor: StateDescriptor) -> Result<ViolationReport, PmsError> {
        Ok(ViolationReport::new(self.context_values(state, path)?, path, descriptor))
    }

    /// Evaluation on `ρ_a ⊗ ρ_b` without forming the joint state.
    pub fn evaluate_product(
        &self,
        rho_a: &DensityMatrix,
        rho_b: &DensityMatrix,
        path: EvalPath,
        seed: Option<u64>,
    ) -> Result<ViolationReport, PmsError> {
        for rho in [rho_a, rho_b] {
            if rho.dim() != self.local_dim {
                return Err(PmsError::StateDimension {
                    expected: self.local_dim,
                    found: rho.dim(),
                });
            }
        }
        let mut out = [ZERO; 6];
        for (i, v) in out.iter_mut().enumerate() {
            *v = match path {
                EvalPath::Direct => self.direct[i].expectation_product(rho_a, rho_b),
                EvalPath::Hermitian => {
                    let h = &self.hermitian[i];
                    combine(h.re.expectation_product(rho_a, rho_b), h.im.expectation_product(rho_a, rho_b))
                }
            };
        }
        let descriptor = StateDescriptor {
            kind: StateKind::Product,
            seed,
        };
        Ok(ViolationReport::new(out, path, descriptor))
    }
}

/// `Re tr(ρ R) + i Re tr(ρ I)`: the two Hermitian-route operators are only
/// Hermitian when the context commutes, so only their real parts are used.
fn combine(re: C64, im: C64) -> C64 {
    C64::new(re.re, im.re)
}

/// `tr(ρ F) = Σ_ab ρ_ab F_ba`.
fn trace_product(rho: &ComplexMatrix, f: &ComplexMatrix) -> C64 {
    let n = rho.rows();
    let (r, m) = (rho.as_slice(), f.as_slice());
    let mut acc = ZERO;
    for a in 0..n {
        for b in 0..n {
            acc += r[a * n + b] * m[b * n + a];
        }
    }
    acc
}

/// `⟨Re X⟩` from the ordered context products `tr(ρ A_a A_b A_c)`.
pub fn expectation_re_x(square: &PmsSquare, state: &DensityMatrix) -> Result<ViolationReport, PmsError> {
    PreparedSquare::new(square).evaluate(state, EvalPath::Direct, StateDescriptor::of(state))
}

/// `⟨Re X⟩` through the Hermitian parts of the nine entries.
pub fn expectation_re_x_hermitian(square: &PmsSquare, state: &DensityMatrix) -> Result<ViolationReport, PmsError> {
    PreparedSquare::new(square).evaluate(state, EvalPath::Hermitian, StateDescriptor::of(state))
}

/// `⟨Re X⟩` on a product state `ρ_a ⊗ ρ_b` of two local systems.
pub fn expectation_re_x_product(
    square: &PmsSquare,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
    path: EvalPath,
) -> Result<ViolationReport, PmsError> {
    PreparedSquare::new(square).evaluate_product(rho_a, rho_b, path, None)
}

/// Phase of a unit complex number in turns of `π`, in `(-1, 1]`.
pub fn phase_in_turns_of_pi(z: C64) -> f64 {
    let t = z.arg() / PI;
    if t <= -1.0 {
        t + 2.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_state, pauli, random_density, stream_seed, StateVector, UnitaryOperator};
    use crate::pms::build_square;
    use crate::spectral::{complete_triple, PmsTriple, Sign};

    fn pauli_triple() -> PmsTriple {
        let x = UnitaryOperator::try_from_matrix(pauli::x()).unwrap();
        let z = UnitaryOperator::try_from_matrix(pauli::z()).unwrap();
        complete_triple(&x, &z, Sign::Minus).unwrap()
    }

    #[test]
    fn noncontextual_constant_is_three_root_three() {
        assert_eq!(BOUND_NONCONTEXTUAL, 3.0 * 3.0_f64.sqrt());
    }

    #[test]
    fn pauli_maximally_mixed_gives_six() {
        let sq = build_square(&pauli_triple());
        let r = expectation_re_x(&sq, &DensityMatrix::maximally_mixed(4)).unwrap();
        assert!((r.total - 6.0).abs() < 1e-12);
        assert_eq!(r.terms.to_array(), [1.0, 1.0, 1.0, 1.0, 1.0, -1.0]);
        assert_eq!(r.path, EvalPath::Direct);
        assert_eq!(r.state.kind, StateKind::Mixed);
        assert!(r.exceeds_noncontextual());
    }

    #[test]
    fn pauli_ground_state_gives_six() {
        let sq = build_square(&pauli_triple());
        let r = expectation_re_x(&sq, &StateVector::basis(4, 0).projector()).unwrap();
        assert!((r.total - 6.0).abs() < 1e-12);
        assert_eq!(r.state.kind, StateKind::Pure);
        assert!(r.im_total.abs() < 1e-12);
    }

    #[test]
    fn negating_u3_leaves_the_square_unchanged() {
        // A33 = U3⊗U3 is even in U3 and no other entry involves it.
        let t = pauli_triple();
        let flipped = build_square(&t.with_negated_u3());
        let rho = random_density(4, 4, 3).unwrap();
        let r = expectation_re_x(&flipped, &rho).unwrap();
        assert!((r.total - 6.0).abs() < 1e-12);
        assert_eq!(flipped.entry(2, 2), build_square(&t).entry(2, 2));
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let sq = build_square(&pauli_triple());
        let err = expectation_re_x(&sq, &DensityMatrix::maximally_mixed(2)).unwrap_err();
        assert!(matches!(err, PmsError::StateDimension { expected: 4, found: 2 }));
    }

    #[test]
    fn routes_agree_on_random_states() {
        let sq = build_square(&pauli_triple());
        let prep = PreparedSquare::new(&sq);
        for i in 0..100 {
            let rho = haar_state(4, stream_seed(11, 0, i)).unwrap().projector();
            let d = prep.evaluate(&rho, EvalPath::Direct, StateDescriptor::of(&rho)).unwrap();
            let h = prep.evaluate(&rho, EvalPath::Hermitian, StateDescriptor::of(&rho)).unwrap();
            assert!((d.total - h.total).abs() < 1e-12);
            assert!((d.total - 6.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pauli_row_one_has_no_antihermitian_part() {
        let sq = build_square(&pauli_triple());
        for k in 0..3 {
            assert_eq!(sq.entry(0, k).antihermitian_part().max_abs(), 0.0);
        }
    }

    #[test]
    fn streaming_matches_dense() {
        let sq = build_square(&pauli_triple());
        let prep = PreparedSquare::new(&sq);
        let mut stream = prep.clone();
        stream.dense = None;
        let rho = random_density(4, 4, 8).unwrap();
        for path in [EvalPath::Direct, EvalPath::Hermitian] {
            let a = prep.context_values(&rho, path).unwrap();
            let b = stream.context_values(&rho, path).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn product_state_matches_joint() {
        let sq = build_square(&pauli_triple());
        let (ra, rb) = (random_density(2, 2, 1).unwrap(), random_density(2, 1, 2).unwrap());
        let joint = DensityMatrix::product(&ra, &rb).unwrap();
        for path in [EvalPath::Direct, EvalPath::Hermitian] {
            let p = expectation_re_x_product(&sq, &ra, &rb, path).unwrap();
            let j = PreparedSquare::new(&sq).evaluate(&joint, path, StateDescriptor::of(&joint)).unwrap();
            assert!((p.total - j.total).abs() < 1e-13);
            assert_eq!(p.state.kind, StateKind::Product);
        }
    }

    #[test]
    fn report_json_layout() {
        let sq = build_square(&pauli_triple());
        let r = expectation_re_x_hermitian(&sq, &DensityMatrix::maximally_mixed(4)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&crate::json::to_string(&r).unwrap()).unwrap();
        assert_eq!(v["path"], "hermitian");
        assert_eq!(v["state"]["kind"], "mixed");
        assert!(v["state"]["seed"].is_null());
        assert!(v["terms"]["C3"].as_f64().unwrap() < 0.0);
        assert_eq!(v["context_order"][5], "C3 = A13·A23·A33");
    }

    #[test]
    fn phase_turns() {
        assert_eq!(phase_in_turns_of_pi(C64::new(-1.0, 0.0)), 1.0);
        assert!((phase_in_turns_of_pi(C64::from_polar(1.0, PI / 6.0)) - 1.0 / 6.0).abs() < 1e-15);
    }
}
