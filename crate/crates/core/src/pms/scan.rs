use std::fmt::Write as _;

use serde::Serialize;

use super::eval::{EvalPath, PreparedSquare, StateDescriptor, StateKind};
use super::square::PmsSquare;
use crate::linalg::{haar_state, random_density, stream_seed};
use crate::par::{self, Execution};

const PURE_STREAM: u64 = 0;
const MIXED_STREAM: u64 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    /// Index within its kind; the state seed is derived from it.
    pub seed_index: usize,
    pub kind: StateKind,
    pub seed: u64,
    pub total_direct: f64,
    pub total_hermitian: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PathStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub spread: f64,
}

impl PathStats {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Option<Self> {
        let n = values.clone().count();
        if n == 0 {
            return None;
        }
        let min = values.clone().fold(f64::INFINITY, f64::min);
        let max = values.clone().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.sum::<f64>() / n as f64;
        Some(Self {
            min,
            max,
            mean,
            spread: max - min,
        })
    }
}

/// Summary of `⟨Re X⟩` over seeded random states; `None` stats for an empty
/// scan.
#[derive(Debug, Clone, Serialize)]
pub struct ScanSummary {
    pub n_pure: usize,
    pub n_mixed: usize,
    pub seed: u64,
    pub direct: Option<PathStats>,
    pub hermitian: Option<PathStats>,
    /// `max |direct - hermitian|` over the sampled states.
    pub max_path_difference: f64,
    pub rows: Vec<ScanRow>,
}

impl ScanSummary {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest spread over both routes.
    pub fn spread(&self) -> f64 {
        [self.direct, self.hermitian]
            .iter()
            .flatten()
            .fold(0.0, |a, s| a.max(s.spread))
    }

    /// `seed_index,kind,total_direct,total_hermitian`, one row per state.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("seed_index,kind,total_direct,total_hermitian\n");
        for r in &self.rows {
            let kind = match r.kind {
                StateKind::Pure => "pure",
                StateKind::Mixed => "mixed",
                StateKind::Product => "product",
            };
            let _ = writeln!(out, "{},{},{:.16e},{:.16e}", r.seed_index, kind, r.total_direct, r.total_hermitian);
        }
        out
    }
}

pub fn scan_states(square: &PmsSquare, n_pure: usize, n_mixed: usize, seed: u64) -> ScanSummary {
    scan_states_with(square, n_pure, n_mixed, seed, Execution::default())
}

/// Haar-random pure states followed by full-rank random mixed states; each
/// state's seed depends only on `(seed, kind, index)`, so the summary is the
/// same under either execution mode.
pub fn scan_states_with(square: &PmsSquare, n_pure: usize, n_mixed: usize, seed: u64, exec: Execution) -> ScanSummary {
    let prepared = PreparedSquare::new(square);
    let dim = square.dim();
    let rows = par::map_indices(n_pure + n_mixed, exec, |i| {
        let (kind, index, state_seed) = if i < n_pure {
            (StateKind::Pure, i, stream_seed(seed, PURE_STREAM, i as u64))
        } else {
            let j = i - n_pure;
            (StateKind::Mixed, j, stream_seed(seed, MIXED_STREAM, j as u64))
        };
        let rho = match kind {
            StateKind::Pure => haar_state(dim, state_seed).expect("positive dimension").projector(),
            _ => random_density(dim, dim, state_seed).expect("valid rank"),
        };
        let descriptor = StateDescriptor {
            kind,
            seed: Some(state_seed),
        };
        let direct = prepared.evaluate(&rho, EvalPath::Direct, descriptor).expect("matching dimension");
        let hermitian = prepared.evaluate(&rho, EvalPath::Hermitian, descriptor).expect("matching dimension");
        ScanRow {
            seed_index: index,
            kind,
            seed: state_seed,
            total_direct: direct.total,
            total_hermitian: hermitian.total,
        }
    });
    let direct = PathStats::of(rows.iter().map(|r| r.total_direct));
    let hermitian = PathStats::of(rows.iter().map(|r| r.total_hermitian));
    let max_path_difference = rows
        .iter()
        .fold(0.0_f64, |a, r| a.max((r.total_direct - r.total_hermitian).abs()));
    ScanSummary {
        n_pure,
        n_mixed,
        seed,
        direct,
        hermitian,
        max_path_difference,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{nearest_unitary, pauli, ComplexMatrix, UnitaryOperator, C64};
    use crate::pms::build_square;
    use crate::spectral::{complete_triple, PmsTriple, Sign};

    fn pauli_triple() -> PmsTriple {
        let x = UnitaryOperator::try_from_matrix(pauli::x()).unwrap();
        let z = UnitaryOperator::try_from_matrix(pauli::z()).unwrap();
        complete_triple(&x, &z, Sign::Minus).unwrap()
    }

    #[test]
    fn pauli_scan_is_flat_at_six() {
        let s = scan_states(&build_square(&pauli_triple()), 50, 20, 1);
        assert_eq!(s.len(), 70);
        let d = s.direct.unwrap();
        assert!((d.min - 6.0).abs() < 1e-9 && (d.max - 6.0).abs() < 1e-9);
        assert!((d.mean - 6.0).abs() < 1e-9);
        assert!(s.spread() < 1e-9);
        assert!(s.max_path_difference < 1e-9);
    }

    #[test]
    fn corrupted_square_depends_on_state() {
        // A valid square maximizes Re X, so the spread is second order in
        // the corruption; 0.2 gives a spread of order 1e-2.
        let t = pauli_triple();
        let bumped = t.u2.matrix() + &ComplexMatrix::from_fn(2, 2, |i, j| C64::from_polar(0.2, (3 * i + 5 * j) as f64));
        let bad = PmsTriple::from_parts(t.u1.clone(), nearest_unitary(&bumped).unwrap(), t.u3.clone(), t.sign).unwrap();
        let s = scan_states(&build_square(&bad), 50, 20, 1);
        assert!(s.spread() > 1e-3, "spread {}", s.spread());
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let sq = build_square(&pauli_triple());
        let a = scan_states_with(&sq, 10, 5, 9, Execution::Sequential);
        let b = scan_states_with(&sq, 10, 5, 9, Execution::Parallel);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn empty_scan_has_no_stats() {
        let s = scan_states(&build_square(&pauli_triple()), 0, 0, 1);
        assert!(s.is_empty() && s.direct.is_none());
        assert_eq!(s.to_csv(), "seed_index,kind,total_direct,total_hermitian\n");
    }

    #[test]
    fn csv_rows() {
        let s = scan_states(&build_square(&pauli_triple()), 2, 1, 3);
        let csv = s.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,pure,"));
        assert!(lines[3].starts_with("0,mixed,"));
    }
}
