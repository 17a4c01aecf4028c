use std::fmt;

use serde::{Deserialize, Serialize};

use super::kron::KronOp;
use super::PmsError;
use crate::linalg::{tensor, ComplexMatrix, UnitaryOperator, C64, ONE};
use crate::spectral::PmsTriple;

/// One of the six contexts (three rows, three columns) of the square.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Context {
    R1,
    R2,
    R3,
    C1,
    C2,
    C3,
}

impl Context {
    pub const ALL: [Context; 6] = [Context::R1, Context::R2, Context::R3, Context::C1, Context::C2, Context::C3];

    /// Grid cells `(j, k)`, zero-based, in multiplication order.
    pub fn cells(self) -> [(usize, usize); 3] {
        match self {
            Context::R1 => [(0, 0), (0, 1), (0, 2)],
            Context::R2 => [(1, 0), (1, 1), (1, 2)],
            Context::R3 => [(2, 0), (2, 1), (2, 2)],
            Context::C1 => [(0, 0), (1, 0), (2, 0)],
            Context::C2 => [(0, 1), (1, 1), (2, 1)],
            Context::C3 => [(0, 2), (1, 2), (2, 2)],
        }
    }

    /// Coefficient in `Re X`: `-1` for `C3`, `+1` otherwise. Also the value
    /// the context product takes on a valid square.
    pub fn weight(self) -> f64 {
        if self == Context::C3 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Context::R1 => "R1",
            Context::R2 => "R2",
            Context::R3 => "R3",
            Context::C1 => "C1",
            Context::C2 => "C2",
            Context::C3 => "C3",
        }
    }

    /// Product written out, e.g. `"R1 = A11·A12·A13"`.
    pub fn order(self) -> String {
        let [a, b, c] = self.cells();
        format!(
            "{} = A{}{}·A{}{}·A{}{}",
            self.name(),
            a.0 + 1,
            a.1 + 1,
            b.0 + 1,
            b.1 + 1,
            c.0 + 1,
            c.1 + 1
        )
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The nine bipartite operators
///
/// ```text
/// U1†⊗1    1⊗U1†    U1⊗U1
/// 1⊗U2†    U2†⊗1    U2⊗U2
/// U1⊗U2    U2⊗U1    U3⊗U3
/// ```
///
/// stored as local factor pairs; the `d² × d²` matrices are formed on demand.
#[derive(Debug, Clone)]
pub struct PmsSquare {
    d: usize,
    factors: [[(ComplexMatrix, ComplexMatrix); 3]; 3],
    source: Option<PmsTriple>,
}

pub fn build_square(triple: &PmsTriple) -> PmsSquare {
    let mut sq = PmsSquare::assemble(triple.u1.matrix(), triple.u2.matrix(), triple.u3.matrix());
    sq.source = Some(triple.clone());
    sq
}

impl PmsSquare {
    /// Square from three operators that need not be unitary or satisfy the
    /// algebra, e.g. truncated infinite-dimensional operators.
    pub fn from_operators(u1: &ComplexMatrix, u2: &ComplexMatrix, u3: &ComplexMatrix) -> Result<Self, PmsError> {
        let dims = [u1, u2, u3].map(|u| (u.rows(), u.cols()));
        let d = u1.rows();
        if dims.iter().any(|&(r, c)| r != d || c != d) {
            return Err(PmsError::OperatorShapes(dims.to_vec()));
        }
        Ok(Self::assemble(u1, u2, u3))
    }

    /// Square from nine arbitrary product entries `A_jk = L_jk ⊗ R_jk`, all
    /// factors of one common dimension.
    pub fn from_factors(factors: [[(ComplexMatrix, ComplexMatrix); 3]; 3]) -> Result<Self, PmsError> {
        let d = factors[0][0].0.rows();
        let shapes: Vec<(usize, usize)> = factors
            .iter()
            .flatten()
            .flat_map(|(l, r)| [(l.rows(), l.cols()), (r.rows(), r.cols())])
            .collect();
        if shapes.iter().any(|&(r, c)| r != d || c != d) {
            return Err(PmsError::OperatorShapes(shapes));
        }
        Ok(Self { d, factors, source: None })
    }

    fn assemble(u1: &ComplexMatrix, u2: &ComplexMatrix, u3: &ComplexMatrix) -> Self {
        let d = u1.rows();
        let id = ComplexMatrix::identity(d);
        let (u1h, u2h) = (u1.adjoint(), u2.adjoint());
        let factors = [
            [(u1h.clone(), id.clone()), (id.clone(), u1h), (u1.clone(), u1.clone())],
            [(id.clone(), u2h.clone()), (u2h, id), (u2.clone(), u2.clone())],
            [(u1.clone(), u2.clone()), (u2.clone(), u1.clone()), (u3.clone(), u3.clone())],
        ];
        Self { d, factors, source: None }
    }

    /// Local dimension `d`; the entries act on dimension `d²`.
    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.d * self.d
    }

    pub fn source(&self) -> Option<&PmsTriple> {
        self.source.as_ref()
    }

    /// Local factors `(L, R)` of `A_jk = L ⊗ R`, zero-based indices.
    pub fn factors(&self, j: usize, k: usize) -> (&ComplexMatrix, &ComplexMatrix) {
        let (l, r) = &self.factors[j][k];
        (l, r)
    }

    /// `A_jk` as a dense `d² × d²` matrix, zero-based indices.
    pub fn entry(&self, j: usize, k: usize) -> ComplexMatrix {
        let (l, r) = self.factors(j, k);
        tensor(l, r).expect("square local factors")
    }

    pub fn entry_unitary(&self, j: usize, k: usize, tol: f64) -> Result<UnitaryOperator, PmsError> {
        Ok(UnitaryOperator::new(self.entry(j, k), tol)?)
    }

    pub(crate) fn kron(&self, j: usize, k: usize) -> KronOp {
        let (l, r) = &self.factors[j][k];
        KronOp::product(l.clone(), r.clone())
    }

    /// Ordered product of the three entries of a context.
    pub(crate) fn context_kron(&self, ctx: Context) -> KronOp {
        let [a, b, c] = ctx.cells();
        self.kron(a.0, a.1).mul(&self.kron(b.0, b.1)).mul(&self.kron(c.0, c.1))
    }

    /// Ordered product of a context as a dense matrix.
    pub fn context_product(&self, ctx: Context) -> ComplexMatrix {
        self.context_kron(ctx).to_full()
    }

    /// Largest `max |A†A - 1|` over the nine entries.
    pub fn max_unitarity_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                let a = self.kron(j, k);
                worst = worst.max(a.adjoint().mul(&a).distance_to_scalar(ONE));
            }
        }
        worst
    }

    /// Largest `max |(A^R)² + (A^I)² - 1|` over the nine entries.
    pub fn max_hermitian_normalization_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                let a = self.kron(j, k);
                let (re, im) = (a.hermitian_part(), a.antihermitian_part());
                worst = worst.max(re.mul(&re).add(&im.mul(&im)).distance_to_scalar(ONE));
            }
        }
        worst
    }
}

/// Largest pairwise commutator inside each row and column.
#[derive(Debug, Clone, Serialize)]
pub struct CompatibilityReport {
    pub rows: [f64; 3],
    pub columns: [f64; 3],
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn verify_compatibility(square: &PmsSquare, tol: f64) -> CompatibilityReport {
    let context_residual = |ctx: Context| {
        let ops = ctx.cells().map(|(j, k)| square.kron(j, k));
        [(0, 1), (0, 2), (1, 2)]
            .iter()
            .map(|&(a, b)| ops[a].commutator(&ops[b]).max_abs())
            .fold(0.0_f64, f64::max)
    };
    let rows = [Context::R1, Context::R2, Context::R3].map(context_residual);
    let columns = [Context::C1, Context::C2, Context::C3].map(context_residual);
    let max_residual = rows.iter().chain(&columns).fold(0.0_f64, |a, &b| a.max(b));
    CompatibilityReport {
        rows,
        columns,
        max_residual,
        tol,
        pass: max_residual <= tol,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContextProduct {
    pub context: Context,
    pub order: String,
    /// `+1` for rows and the first two columns, `-1` for the third column.
    pub target: f64,
    /// `max |A_a A_b A_c - target·1|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    pub contexts: Vec<ContextProduct>,
    pub max_residual: f64,
}

pub fn row_col_products(square: &PmsSquare) -> ProductReport {
    let contexts: Vec<ContextProduct> = Context::ALL
        .iter()
        .map(|&ctx| {
            let target = ctx.weight();
            ContextProduct {
                context: ctx,
                order: ctx.order(),
                target,
                residual: square.context_kron(ctx).distance_to_scalar(C64::new(target, 0.0)),
            }
        })
        .collect();
    let max_residual = contexts.iter().fold(0.0_f64, |a, c| a.max(c.residual));
    ProductReport { contexts, max_residual }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{nearest_unitary, pauli};
    use crate::spectral::{complete_triple, Sign};

    fn pauli_triple() -> PmsTriple {
        let x = UnitaryOperator::try_from_matrix(pauli::x()).unwrap();
        let z = UnitaryOperator::try_from_matrix(pauli::z()).unwrap();
        complete_triple(&x, &z, Sign::Minus).unwrap()
    }

    #[test]
    fn pauli_square_is_the_standard_table() {
        let sq = build_square(&pauli_triple());
        let (x, y, z, id) = (pauli::x(), pauli::y(), pauli::z(), pauli::identity());
        let t = |a: &ComplexMatrix, b: &ComplexMatrix| tensor(a, b).unwrap();
        let expected = [
            [t(&x, &id), t(&id, &x), t(&x, &x)],
            [t(&id, &z), t(&z, &id), t(&z, &z)],
            [t(&x, &z), t(&z, &x), t(&y, &y)],
        ];
        for j in 0..3 {
            for k in 0..3 {
                let e = sq.entry(j, k);
                assert_eq!((e.rows(), e.cols()), (4, 4));
                assert!(e.max_diff(&expected[j][k]) < 1e-15, "A{}{}", j + 1, k + 1);
            }
        }
        assert!(sq.max_unitarity_residual() < 1e-15);
    }

    #[test]
    fn third_column_multiplies_to_minus_one() {
        let sq = build_square(&pauli_triple());
        let p = &(&sq.entry(0, 2) * &sq.entry(1, 2)) * &sq.entry(2, 2);
        assert!(p.distance_to_scalar(-ONE) < 1e-15);
        let report = row_col_products(&sq);
        assert!(report.max_residual < 1e-12);
        assert_eq!(report.contexts[5].target, -1.0);
        assert_eq!(report.contexts[0].order, "R1 = A11·A12·A13");
    }

    #[test]
    fn pauli_contexts_commute() {
        let report = verify_compatibility(&build_square(&pauli_triple()), 1e-12);
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn corrupted_triple_breaks_contexts() {
        let t = pauli_triple();
        let bumped = t.u2.matrix() + &ComplexMatrix::from_fn(2, 2, |i, j| C64::new(1e-3 * (1 + i + 2 * j) as f64, 0.0));
        let u2 = nearest_unitary(&bumped).unwrap();
        let bad = PmsTriple::from_parts(t.u1.clone(), u2, t.u3.clone(), t.sign).unwrap();
        let sq = build_square(&bad);
        assert!(!verify_compatibility(&sq, 1e-9).pass);
        assert!(row_col_products(&sq).max_residual > 1e-4);
    }

    #[test]
    fn from_operators_checks_shapes() {
        assert!(PmsSquare::from_operators(&pauli::x(), &pauli::z(), &ComplexMatrix::identity(3)).is_err());
        let sq = PmsSquare::from_operators(&pauli::x(), &pauli::z(), &pauli::y()).unwrap();
        assert!(sq.source().is_none());
    }

    #[test]
    fn hermitian_parts_square_to_one() {
        assert!(build_square(&pauli_triple()).max_hermitian_normalization_residual() < 1e-15);
    }
}
