//! Classical bounds on the Peres-Mermin expression.
//!
//! With pre-assigned outcomes `±1` the expression never exceeds 4, which
//! [`dichotomic_bound`] confirms over all 512 assignments. With complex
//! assignments `u_jk` in the closed unit disc and the real-part expansion of
//! each context, the bound is `3√3`; [`phase_bound`] finds it by multi-start
//! projected gradient ascent and [`sample_noncontextual`] checks it by random
//! sampling.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::linalg::{seeded_rng, stream_seed, C64};
use crate::par::{self, Execution};
use crate::pms::{Context, Terms, BOUND_NONCONTEXTUAL};

/// One value per cell, row-major: index `3j + k` holds `u_jk`.
pub type PhaseAssignment = [C64; 9];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("at least one start is required")]
    NoStarts,
    #[error("at least one sample is required")]
    NoSamples,
    #[error("invalid ascent setting: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMethod {
    Exhaustive,
    MultistartAscent,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Argmax {
    Signs([i8; 9]),
    Phases(PhaseAssignment),
}

impl Argmax {
    /// Complex form of the assignment.
    pub fn values(&self) -> PhaseAssignment {
        match self {
            Argmax::Signs(s) => s.map(|v| C64::new(v as f64, 0.0)),
            Argmax::Phases(u) => *u,
        }
    }

    /// `arg u_jk / π`, each in `(-1, 1]`.
    pub fn phases_over_pi(&self) -> [f64; 9] {
        self.values().map(crate::pms::phase_in_turns_of_pi)
    }
}

impl Serialize for Argmax {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Argmax::Signs(v) => v.serialize(s),
            Argmax::Phases(u) => u.map(|z| [z.re, z.im]).serialize(s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartStatus {
    /// Projected gradient norm fell below `tol`.
    Gradient,
    /// Step size fell below the minimum without further improvement.
    Step,
    /// Iteration cap reached.
    IterationCap,
}

#[derive(Debug, Clone, Serialize)]
pub struct StartOutcome {
    pub index: usize,
    pub value: f64,
    pub iterations: usize,
    pub gradient_norm: f64,
    pub min_modulus: f64,
    pub status: StartStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundCertificate {
    pub bound_value: f64,
    pub argmax: Argmax,
    pub method: BoundMethod,
    /// Starting points for the ascent; assignments examined for enumeration.
    pub n_starts: usize,
    /// Projected gradient norm at the returned optimum (0 for enumeration).
    pub max_gradient_norm: f64,
    /// Every start ended with all `|u_jk| = 1` within `1e-6`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_unit_modulus: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub starts: Vec<StartOutcome>,
}

impl BoundCertificate {
    /// Objective re-evaluated at the stored argmax.
    pub fn reevaluate(&self) -> f64 {
        match &self.argmax {
            Argmax::Signs(s) => dichotomic_objective(s) as f64,
            Argmax::Phases(u) => phase_objective(u),
        }
    }

    /// Distance from the quantum value 6.
    pub fn gap_to_quantum(&self) -> f64 {
        crate::pms::BOUND_QUANTUM_MAX - self.bound_value
    }

    pub fn non_converged(&self) -> impl Iterator<Item = &StartOutcome> {
        self.starts.iter().filter(|s| s.status == StartStatus::IterationCap)
    }
}

fn cell(j: usize, k: usize) -> usize {
    3 * j + k
}

/// Sum of row and first two column products minus the third column product.
pub fn dichotomic_objective(signs: &[i8; 9]) -> i32 {
    Context::ALL
        .iter()
        .map(|&ctx| {
            let p: i32 = ctx.cells().iter().map(|&(j, k)| signs[cell(j, k)] as i32).product();
            if ctx == Context::C3 {
                -p
            } else {
                p
            }
        })
        .sum()
}

/// Enumerates all `2⁹` sign assignments; bit `i` of the mask set means
/// cell `i` is `-1`, so the first maximizer in mask order is reported.
pub fn dichotomic_bound() -> BoundCertificate {
    let mut best = i32::MIN;
    let mut best_signs = [1i8; 9];
    for mask in 0u32..512 {
        let signs: [i8; 9] = std::array::from_fn(|i| if mask >> i & 1 == 1 { -1 } else { 1 });
        let v = dichotomic_objective(&signs);
        if v > best {
            best = v;
            best_signs = signs;
        }
    }
    BoundCertificate {
        bound_value: best as f64,
        argmax: Argmax::Signs(best_signs),
        method: BoundMethod::Exhaustive,
        n_starts: 512,
        max_gradient_norm: 0.0,
        all_unit_modulus: None,
        starts: Vec::new(),
    }
}

/// Real part of `a·b·c` spelled out through real and imaginary parts:
/// `(aᴿbᴿ - aᴵbᴵ)cᴿ - (aᴵbᴿ + aᴿbᴵ)cᴵ`.
pub fn context_real_part(a: C64, b: C64, c: C64) -> f64 {
    (a.re * b.re - a.im * b.im) * c.re - (a.im * b.re + a.re * b.im) * c.im
}

/// The six context values of a scalar assignment.
pub fn context_terms(u: &PhaseAssignment) -> Terms {
    Terms::from_array(Context::ALL.map(|ctx| {
        let [a, b, c] = ctx.cells().map(|(j, k)| u[cell(j, k)]);
        context_real_part(a, b, c)
    }))
}

/// `R1 + R2 + R3 + C1 + C2 - C3` for scalar assignments.
pub fn phase_objective(u: &PhaseAssignment) -> f64 {
    context_terms(u).combined()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub initial_step: f64,
    pub min_step: f64,
    pub max_iterations: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            min_step: 1e-12,
            max_iterations: 100_000,
            execution: Execution::default(),
        }
    }
}

pub const DEFAULT_STARTS: usize = 64;
pub const DEFAULT_GRADIENT_TOL: f64 = 1e-10;
const UNIT_MODULUS_TOL: f64 = 1e-6;

/// Gradient of the objective in the complex plane of each cell, with the
/// outward radial part removed on the unit circle.
///
/// The objective is `Σ w Re(u_i o_i)` in each `u_i`, so the Euclidean
/// gradient with respect to `(Re u_i, Im u_i)` is `w·conj(o_i)`.
fn projected_gradient(u: &PhaseAssignment) -> PhaseAssignment {
    let mut g = [C64::new(0.0, 0.0); 9];
    for ctx in Context::ALL {
        let w = ctx.weight();
        let idx = ctx.cells().map(|(j, k)| cell(j, k));
        for (pos, &i) in idx.iter().enumerate() {
            let others: C64 = idx.iter().enumerate().filter(|&(p, _)| p != pos).map(|(_, &m)| u[m]).product();
            g[i] += others.conj() * w;
        }
    }
    for (gi, ui) in g.iter_mut().zip(u) {
        let r = ui.norm();
        if r >= 1.0 - 4.0 * f64::EPSILON {
            let radial = (*gi * ui.conj()).re / r;
            if radial > 0.0 {
                *gi -= ui / r * radial;
            }
        }
    }
    g
}

/// `u + s·g`, each cell pulled back into the unit disc.
fn step(u: &PhaseAssignment, g: &PhaseAssignment, s: f64) -> PhaseAssignment {
    std::array::from_fn(|i| {
        let v = u[i] + g[i] * s;
        let r = v.norm();
        if r > 1.0 {
            v / r
        } else {
            v
        }
    })
}

fn norm(g: &PhaseAssignment) -> f64 {
    g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn ascend(start: PhaseAssignment, index: usize, tol: f64, cfg: &AscentConfig) -> (StartOutcome, PhaseAssignment) {
    let mut u = start;
    let mut f = phase_objective(&u);
    let mut s = cfg.initial_step;
    let mut g = projected_gradient(&u);
    let mut gnorm = norm(&g);
    let mut iterations = 0;
    let status = loop {
        if gnorm < tol {
            break StartStatus::Gradient;
        }
        if s < cfg.min_step {
            break StartStatus::Step;
        }
        if iterations >= cfg.max_iterations {
            break StartStatus::IterationCap;
        }
        iterations += 1;
        let v = step(&u, &g, s);
        let fv = phase_objective(&v);
        let gv = projected_gradient(&v);
        let gv_norm = norm(&gv);
        // Near the optimum objective changes drop below rounding; a step
        // that keeps f within rounding and shrinks the gradient still counts.
        let flat = fv >= f - 4.0 * f64::EPSILON * f.abs().max(1.0) && gv_norm < gnorm;
        if fv > f || flat {
            u = v;
            f = fv.max(f);
            g = gv;
            gnorm = gv_norm;
        } else {
            s *= 0.5;
        }
    };
    let f = phase_objective(&u);
    let outcome = StartOutcome {
        index,
        value: f,
        iterations,
        gradient_norm: gnorm,
        min_modulus: u.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min),
        status,
    };
    (outcome, u)
}

pub fn phase_bound(n_starts: usize, tol: f64, seed: u64) -> Result<BoundCertificate, BoundsError> {
    phase_bound_with(n_starts, tol, seed, &AscentConfig::default())
}

/// Multi-start projected gradient ascent over the closed unit disc in each
/// cell.
///
/// Start `i` draws moduli uniformly from `[0, 1]` and phases uniformly from
/// `[-π, π)` with a generator seeded from `(seed, i)`. The reported optimum
/// is the best value, ties going to the lowest start index.
pub fn phase_bound_with(n_starts: usize, tol: f64, seed: u64, cfg: &AscentConfig) -> Result<BoundCertificate, BoundsError> {
    if n_starts == 0 {
        return Err(BoundsError::NoStarts);
    }
    if !(cfg.initial_step > 0.0 && cfg.min_step > 0.0 && tol >= 0.0) {
        return Err(BoundsError::InvalidConfig(format!(
            "initial_step {}, min_step {}, tol {tol}",
            cfg.initial_step, cfg.min_step
        )));
    }
    let results = par::map_indices(n_starts, cfg.execution, |i| {
        let mut rng = seeded_rng(stream_seed(seed, 0, i as u64));
        let start: PhaseAssignment = std::array::from_fn(|_| {
            let r: f64 = rng.random();
            C64::from_polar(r, rng.random_range(-PI..PI))
        });
        ascend(start, i, tol, cfg)
    });
    let mut best = 0;
    for (i, (o, _)) in results.iter().enumerate() {
        if o.value > results[best].0.value {
            best = i;
        }
    }
    let all_unit = results.iter().all(|(o, _)| o.min_modulus >= 1.0 - UNIT_MODULUS_TOL);
    let (best_outcome, argmax) = &results[best];
    Ok(BoundCertificate {
        bound_value: best_outcome.value,
        argmax: Argmax::Phases(*argmax),
        method: BoundMethod::MultistartAscent,
        n_starts,
        max_gradient_norm: best_outcome.gradient_norm,
        all_unit_modulus: Some(all_unit),
        starts: results.into_iter().map(|(o, _)| o).collect(),
    })
}

/// Largest objective over the given assignments.
pub fn max_objective(assignments: &[PhaseAssignment]) -> Option<f64> {
    assignments.iter().map(phase_objective).reduce(f64::max)
}

const SAMPLE_CHUNK: usize = 4096;

pub fn sample_noncontextual(n: usize, seed: u64) -> Result<f64, BoundsError> {
    sample_noncontextual_with(n, seed, Execution::default())
}

/// Maximum of the objective over `n` assignments with independent uniform
/// phases and unit moduli. Samples are drawn in chunks of 4096 from
/// per-chunk generators.
pub fn sample_noncontextual_with(n: usize, seed: u64, exec: Execution) -> Result<f64, BoundsError> {
    if n == 0 {
        return Err(BoundsError::NoSamples);
    }
    let chunks = n.div_ceil(SAMPLE_CHUNK);
    let maxima = par::map_indices(chunks, exec, |c| {
        let mut rng = seeded_rng(stream_seed(seed, 1, c as u64));
        let len = SAMPLE_CHUNK.min(n - c * SAMPLE_CHUNK);
        (0..len)
            .map(|_| {
                let u: PhaseAssignment = std::array::from_fn(|_| C64::from_polar(1.0, rng.random_range(-PI..PI)));
                phase_objective(&u)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    });
    Ok(maxima.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Assignment attaining `3√3`: phase `-π/18` on the first two columns and
/// `5π/18` on the third, so that rows and the first two columns carry total
/// phase `π/6` and the third column `5π/6`.
pub fn reference_phase_optimum() -> PhaseAssignment {
    std::array::from_fn(|i| {
        let phase = if i % 3 == 2 { 5.0 * PI / 18.0 } else { -PI / 18.0 };
        C64::from_polar(1.0, phase)
    })
}

/// Whether `value` respects the phase bound with slack `slack`.
pub fn within_phase_bound(value: f64, slack: f64) -> bool {
    value <= BOUND_NONCONTEXTUAL + slack
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_gives_exactly_four() {
        let c = dichotomic_bound();
        assert_eq!(c.bound_value, 4.0);
        assert_eq!(c.argmax, Argmax::Signs([1; 9]));
        assert_eq!(c.reevaluate(), 4.0);
        assert_eq!(c.method, BoundMethod::Exhaustive);
    }

    #[test]
    fn all_plus_one_is_three_plus_one_plus_one_minus_one() {
        let t = context_terms(&[C64::new(1.0, 0.0); 9]);
        assert_eq!(t.to_array(), [1.0; 6]);
        assert_eq!(dichotomic_objective(&[1; 9]), 4);
    }

    #[test]
    fn flipping_one_entry_never_beats_four() {
        let Argmax::Signs(best) = dichotomic_bound().argmax else {
            unreachable!()
        };
        for i in 0..9 {
            let mut s = best;
            s[i] = -s[i];
            assert!(dichotomic_objective(&s) <= 4);
        }
    }

    #[test]
    fn one_dimensional_oracle_peaks_at_pi_over_six() {
        // f(θ) = 5 cos θ - cos 5θ on a fine grid
        let n = 1_000_000;
        let (mut best, mut arg) = (f64::NEG_INFINITY, 0.0);
        for i in 0..=n {
            let t = -PI + 2.0 * PI * i as f64 / n as f64;
            let f = 5.0 * t.cos() - (5.0 * t).cos();
            if f > best {
                best = f;
                arg = t;
            }
        }
        assert!((best - 3.0 * 3.0_f64.sqrt()).abs() < 1e-9);
        assert!((arg.abs() - PI / 6.0).abs() < 1e-5);
    }

    #[test]
    fn reference_optimum_attains_three_root_three() {
        let u = reference_phase_optimum();
        let t = context_terms(&u);
        for v in &t.to_array()[..5] {
            assert!((v - (PI / 6.0).cos()).abs() < 1e-15);
        }
        assert!((t.c3 - (5.0 * PI / 6.0).cos()).abs() < 1e-15);
        assert!((phase_objective(&u) - BOUND_NONCONTEXTUAL).abs() < 1e-14);
        assert_eq!(max_objective(&[u]), Some(phase_objective(&u)));
    }

    #[test]
    fn expansion_matches_complex_product() {
        let mut rng = seeded_rng(5);
        for _ in 0..1000 {
            let z: [C64; 3] = std::array::from_fn(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            assert!((context_real_part(z[0], z[1], z[2]) - (z[0] * z[1] * z[2]).re).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_phases_are_not_a_local_maximum() {
        assert_eq!(phase_objective(&[C64::new(1.0, 0.0); 9]), 4.0);
        // a small move toward the optimum's phase pattern increases it
        let eps = 1e-3;
        let y = reference_phase_optimum().map(|z| C64::from_polar(1.0, z.arg() * eps));
        assert!(phase_objective(&y) > 4.0);
    }

    #[test]
    fn ascent_finds_three_root_three() {
        let c = phase_bound(16, DEFAULT_GRADIENT_TOL, 1).unwrap();
        assert!((c.bound_value - BOUND_NONCONTEXTUAL).abs() < 1e-6, "{}", c.bound_value);
        assert_eq!(c.all_unit_modulus, Some(true));
        assert!((c.reevaluate() - c.bound_value).abs() < 1e-12);
        assert!(c.starts.iter().all(|s| within_phase_bound(s.value, 1e-9)));
    }

    #[test]
    fn ascent_is_deterministic_across_execution() {
        let seq = AscentConfig {
            execution: Execution::Sequential,
            ..Default::default()
        };
        let par = AscentConfig {
            execution: Execution::Parallel,
            ..Default::default()
        };
        let a = phase_bound_with(8, 1e-10, 3, &seq).unwrap();
        let b = phase_bound_with(8, 1e-10, 3, &par).unwrap();
        assert_eq!(a.bound_value.to_bits(), b.bound_value.to_bits());
        assert_eq!(a.argmax, b.argmax);
    }

    #[test]
    fn scalar_embedding_matches_hermitian_route() {
        use crate::linalg::{ComplexMatrix, DensityMatrix};
        use crate::pms::{expectation_re_x_hermitian, PmsSquare};
        let one = ComplexMatrix::identity(1);
        let mut rng = seeded_rng(12);
        for _ in 0..50 {
            let u: PhaseAssignment = std::array::from_fn(|_| C64::from_polar(1.0, rng.random_range(-PI..PI)));
            let factors = std::array::from_fn(|j| {
                std::array::from_fn(|k| (ComplexMatrix::from_diagonal(&[u[cell(j, k)]]), one.clone()))
            });
            let sq = PmsSquare::from_factors(factors).unwrap();
            let r = expectation_re_x_hermitian(&sq, &DensityMatrix::maximally_mixed(1)).unwrap();
            assert!((r.total - phase_objective(&u)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_starts_and_samples_are_errors() {
        assert_eq!(phase_bound(0, 1e-10, 1).unwrap_err(), BoundsError::NoStarts);
        assert_eq!(sample_noncontextual(0, 1).unwrap_err(), BoundsError::NoSamples);
    }

    #[test]
    fn sampling_stays_below_the_bound() {
        let m = sample_noncontextual(20_000, 4).unwrap();
        assert!(within_phase_bound(m, 1e-9));
        let seq = sample_noncontextual_with(5000, 4, Execution::Sequential).unwrap();
        let par = sample_noncontextual_with(5000, 4, Execution::Parallel).unwrap();
        assert_eq!(seq.to_bits(), par.to_bits());
    }

    #[test]
    fn certificate_json() {
        let v: serde_json::Value = serde_json::from_str(&crate::json::to_string(&dichotomic_bound()).unwrap()).unwrap();
        assert_eq!(v["method"], "exhaustive");
        assert_eq!(v["argmax"].as_array().unwrap().len(), 9);
        let c = phase_bound(2, 1e-10, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&crate::json::to_string(&c).unwrap()).unwrap();
        assert_eq!(v["method"], "multistart-ascent");
        assert_eq!(v["argmax"][0].as_array().unwrap().len(), 2);
    }
}
