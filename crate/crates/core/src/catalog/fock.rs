use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use super::CatalogError;
use crate::linalg::{expm_i_hermitian, ComplexMatrix, StateVector, UnitaryOperator, C64};
use crate::pms::{EvalPath, PmsError, PmsSquare, PreparedSquare, ViolationReport};
use crate::spectral::Sign;

/// Tolerance on the triangle condition.
pub const ASADIAN_TOL: f64 = 1e-10;
const MIN_CUTOFF: usize = 8;

/// Displacements `α1`, `α2` (with `α3 = -α1 - α2`) on Fock states
/// `0..cutoff`. In quadratures, `ν = √2 Re α` and `μ = √2 Im α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FockParams {
    pub cutoff: usize,
    pub alpha1: C64,
    pub alpha2: C64,
}

impl FockParams {
    /// `α1 = √(π/2)`, `α2 = i√(π/2)`: a right triangle of area `π/2`.
    pub fn reference(cutoff: usize) -> Self {
        let a = FRAC_PI_2.sqrt();
        Self {
            cutoff,
            alpha1: C64::new(a, 0.0),
            alpha2: C64::new(0.0, a),
        }
    }

    pub fn alphas(&self) -> [C64; 3] {
        [self.alpha1, self.alpha2, -self.alpha1 - self.alpha2]
    }
}

/// Truncated annihilation operator, `a|n⟩ = √n |n-1⟩`.
pub fn annihilation(cutoff: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(cutoff, cutoff, |i, j| {
        if j == i + 1 {
            C64::new((j as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `exp(α a† - α* a)` on the truncated space, through the Hermitian
/// generator `-i(α a† - α* a)`; exactly unitary up to rounding.
pub fn displacement(alpha: C64, cutoff: usize) -> Result<UnitaryOperator, CatalogError> {
    let a = annihilation(cutoff);
    let gen = &a.adjoint().scale(alpha) - &a.scale(alpha.conj());
    let h = gen.scale(C64::new(0.0, -1.0)).hermitian_part();
    Ok(expm_i_hermitian(&h, 1.0)?)
}

/// Coherent state `|β⟩` truncated to `cutoff` levels and renormalized.
pub fn coherent_state(beta: C64, cutoff: usize) -> StateVector {
    let mut amps = Vec::with_capacity(cutoff);
    let mut c = C64::new((-beta.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..cutoff {
        if n > 0 {
            c = c * beta / (n as f64).sqrt();
        }
        amps.push(c);
    }
    StateVector::normalized(amps).expect("non-zero vacuum amplitude")
}

/// Residuals of the truncated triple on low-energy test states.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationQuality {
    /// `max |D†D - 1|` over the three displacements.
    pub unitarity_residual: f64,
    /// `max ‖{D_i, D_j} ψ‖` over pairs and test states.
    pub anticommutator_residual: f64,
    /// `max ‖(D_1 D_2 D_3 - sign·i) ψ‖` over test states.
    pub product_residual: f64,
    pub test_states: Vec<String>,
}

/// Three truncated displacements that anti-commute only away from the
/// cutoff; not a [`PmsTriple`](crate::spectral::PmsTriple).
#[derive(Debug, Clone, Serialize)]
pub struct ApproxTriple {
    pub sign: Sign,
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub u3: ComplexMatrix,
    pub alphas: [[f64; 2]; 3],
    pub cutoff: usize,
    pub quality: TruncationQuality,
    pub warnings: Vec<String>,
}

impl ApproxTriple {
    pub fn dim(&self) -> usize {
        self.cutoff
    }

    pub fn square(&self) -> PmsSquare {
        PmsSquare::from_operators(&self.u1, &self.u2, &self.u3).expect("common dimension")
    }

    /// `⟨Re X⟩` on `|ψ_a⟩ ⊗ |ψ_b⟩`.
    pub fn evaluate_product(
        &self,
        psi_a: &StateVector,
        psi_b: &StateVector,
        path: EvalPath,
    ) -> Result<ViolationReport, PmsError> {
        PreparedSquare::new(&self.square()).evaluate_product(&psi_a.projector(), &psi_b.projector(), path, None)
    }
}

/// Vacuum, Fock states 1..4 and coherent states with `|β| ≤ 1.5`.
fn test_states(cutoff: usize) -> Vec<(String, StateVector)> {
    let mut out: Vec<(String, StateVector)> = (0..5)
        .map(|n| (format!("fock:{n}"), StateVector::basis(cutoff, n)))
        .collect();
    for r in [0.75, 1.5] {
        for k in 0..8 {
            let beta = C64::from_polar(r, k as f64 * std::f64::consts::FRAC_PI_4);
            out.push((format!("coherent:{:.4},{:.4}", beta.re, beta.im), coherent_state(beta, cutoff)));
        }
    }
    out
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Truncated displacement triple for `α1`, `α2` with
/// `Im(α1 α2*) = ±π/2`; the sign of the product `D1 D2 D3 = e^{i Im(α1 α2*)}`
/// is recorded as the triple's sign.
pub fn fock_displacement_triple(p: &FockParams) -> Result<ApproxTriple, CatalogError> {
    if p.cutoff < MIN_CUTOFF {
        return Err(CatalogError::CutoffTooSmall {
            cutoff: p.cutoff,
            min: MIN_CUTOFF,
        });
    }
    let im = (p.alpha1 * p.alpha2.conj()).im;
    if (im.abs() - FRAC_PI_2).abs() > ASADIAN_TOL {
        return Err(CatalogError::TriangleCondition { im, tol: ASADIAN_TOL });
    }
    let sign = if im > 0.0 { Sign::Plus } else { Sign::Minus };
    let alphas = p.alphas();
    let warnings: Vec<String> = alphas
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm_sqr() > p.cutoff as f64 / 4.0)
        .map(|(i, a)| format!("|α{}|² = {:.3} exceeds cutoff/4 = {}", i + 1, a.norm_sqr(), p.cutoff as f64 / 4.0))
        .collect();
    let ops: Vec<UnitaryOperator> = alphas.iter().map(|&a| displacement(a, p.cutoff)).collect::<Result<_, _>>()?;
    let [u1, u2, u3] = [0, 1, 2].map(|i| ops[i].matrix().clone());

    let states = test_states(p.cutoff);
    let mut anti: f64 = 0.0;
    let mut product: f64 = 0.0;
    let prod = &(&u1 * &u2) * &u3;
    let target = sign.times_i();
    for (_, psi) in &states {
        let v = psi.amplitudes();
        for (a, b) in [(&u1, &u2), (&u1, &u3), (&u2, &u3)] {
            let ab = a.apply(&b.apply(v)?)?;
            let ba = b.apply(&a.apply(v)?)?;
            let sum: Vec<C64> = ab.iter().zip(&ba).map(|(x, y)| x + y).collect();
            anti = anti.max(vec_norm(&sum));
        }
        let pv = prod.apply(v)?;
        let diff: Vec<C64> = pv.iter().zip(v).map(|(x, y)| x - target * y).collect();
        product = product.max(vec_norm(&diff));
    }
    let quality = TruncationQuality {
        unitarity_residual: ops.iter().map(|u| u.unitarity_residual()).fold(0.0, f64::max),
        anticommutator_residual: anti,
        product_residual: product,
        test_states: states.into_iter().map(|(name, _)| name).collect(),
    };
    Ok(ApproxTriple {
        sign,
        u1,
        u2,
        u3,
        alphas: alphas.map(|a| [a.re, a.im]),
        cutoff: p.cutoff,
        quality,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsadianVerdict {
    pub accepted: bool,
    /// `Im(α1 α2*)`, `Im(α1 α3*)`, `Im(α2 α3*)`.
    pub pairwise: [f64; 3],
    /// `|α1 + α2 + α3|`.
    pub sum_residual: f64,
}

/// Accepts when every `Im(α_i α_j*)` is `±π/2` and `α1 + α2 + α3 = 0`, each
/// within `1e-10`.
pub fn asadian_check(a1: C64, a2: C64, a3: C64) -> AsadianVerdict {
    let pairwise = [(a1, a2), (a1, a3), (a2, a3)].map(|(x, y)| (x * y.conj()).im);
    let sum_residual = (a1 + a2 + a3).norm();
    let accepted =
        pairwise.iter().all(|v| (v.abs() - FRAC_PI_2).abs() <= ASADIAN_TOL) && sum_residual <= ASADIAN_TOL;
    AsadianVerdict {
        accepted,
        pairwise,
        sum_residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;

    #[test]
    fn reference_triangle_is_accepted() {
        let [a1, a2, a3] = FockParams::reference(16).alphas();
        let a = FRAC_PI_2.sqrt();
        assert!((a3 - C64::new(-a, -a)).norm() < 1e-15);
        let v = asadian_check(a1, a2, a3);
        assert!(v.accepted);
        assert!((v.pairwise[0] + FRAC_PI_2).abs() < 1e-15);
        // every ordering of the three
        for (x, y, z) in [(a1, a3, a2), (a2, a1, a3), (a2, a3, a1), (a3, a1, a2), (a3, a2, a1)] {
            assert!(asadian_check(x, y, z).accepted);
        }
        let zero = C64::new(0.0, 0.0);
        assert!(!asadian_check(zero, zero, zero).accepted);
    }

    #[test]
    fn parallel_displacements_are_refused() {
        let p = FockParams {
            cutoff: 16,
            alpha1: C64::new(1.0, 0.0),
            alpha2: C64::new(1.0, 0.0),
        };
        let err = fock_displacement_triple(&p).unwrap_err();
        assert!(matches!(err, CatalogError::TriangleCondition { .. }));
        assert!(err.is_structural());
        let small = FockParams::reference(4);
        assert!(matches!(fock_displacement_triple(&small), Err(CatalogError::CutoffTooSmall { .. })));
    }

    #[test]
    fn coherent_state_matches_displaced_vacuum() {
        let beta = C64::new(0.6, -0.4);
        let d = displacement(beta, 40).unwrap();
        let shifted = d.apply(StateVector::basis(40, 0).amplitudes()).unwrap();
        let coh = coherent_state(beta, 40);
        let diff: Vec<C64> = shifted.iter().zip(coh.amplitudes()).map(|(x, y)| x - y).collect();
        assert!(vec_norm(&diff) < 1e-10);
    }

    #[test]
    fn weyl_relation_on_low_energy_states() {
        // D(α)D(β) = e^{i Im(αβ*)} D(α+β)
        let (a, b) = (C64::new(0.3, 0.2), C64::new(-0.1, 0.5));
        let n = 48;
        let lhs = &displacement(a, n).unwrap().into_matrix() * displacement(b, n).unwrap().matrix();
        let rhs = displacement(a + b, n).unwrap().scale(C64::from_polar(1.0, (a * b.conj()).im));
        let v = coherent_state(C64::new(0.5, 0.0), n);
        let diff: Vec<C64> = lhs
            .apply(v.amplitudes())
            .unwrap()
            .iter()
            .zip(rhs.apply(v.amplitudes()).unwrap())
            .map(|(x, y)| x - y)
            .collect();
        assert!(vec_norm(&diff) < 1e-10);
    }

    #[test]
    fn reference_triple_quality() {
        let t = fock_displacement_triple(&FockParams::reference(32)).unwrap();
        assert_eq!(t.sign, Sign::Minus);
        assert!(t.quality.unitarity_residual < 1e-10);
        assert!(t.quality.anticommutator_residual < 1e-3, "{:?}", t.quality);
        assert!(t.warnings.is_empty());
        let residuals: Vec<f64> = [8, 16, 32]
            .map(|c| fock_displacement_triple(&FockParams::reference(c)).unwrap().quality.anticommutator_residual)
            .to_vec();
        assert!(residuals.windows(2).all(|w| w[1] <= w[0]), "{residuals:?}");
    }

    #[test]
    fn truncated_generator_is_exact_for_two_levels() {
        // cutoff 2: a = |0⟩⟨1|, generator αa† - α*a = i(Im α σx) ... a rotation
        let d = displacement(C64::new(0.3, 0.0), 2).unwrap();
        let expected = &pauli::identity().scale(C64::new(0.3_f64.cos(), 0.0))
            + &pauli::y().scale(C64::new(0.0, -0.3_f64.sin()));
        assert!(d.max_diff(&expected) < 1e-14);
    }
}
