//! Example operator families.
//!
//! Finite triples: Pauli qubits, rotations by `π` of half-integer spins,
//! parity pseudospins truncated to whole blocks, and clock-and-shift qudits
//! of even dimension. The truncated-Fock phase-space displacements form an
//! [`ApproxTriple`], which satisfies the algebra only on states far from
//! the cutoff.

mod fock;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use fock::{
    annihilation, asadian_check, coherent_state, displacement, fock_displacement_triple, AsadianVerdict, ApproxTriple,
    FockParams, TruncationQuality, ASADIAN_TOL,
};

use crate::linalg::{direct_sum, expm_i_hermitian, pauli, ComplexMatrix, LinalgError, UnitaryOperator, C64};
use crate::spectral::{complete_triple, require_pairing, PmsTriple, Sign, SpectralError, TripleJson};
use crate::tol::Tolerances;

#[derive(Debug, Error, Clone)]
pub enum CatalogError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(
        "{name} = {value} is not π: exp(i S t) has eigenvalues e^{{i(S+1-b)t}}, b = 1..2S+1, \
         which pair under negation only for t = π"
    )]
    EigenvalueCondition { name: &'static str, value: f64 },
    #[error("triangle condition violated: Im(α1·conj(α2)) = {im} but must be ±π/2 within {tol:e}")]
    TriangleCondition { im: f64, tol: f64 },
    #[error("cutoff {cutoff} is below the minimum {min}")]
    CutoffTooSmall { cutoff: usize, min: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown catalog entry {0:?}; expected pauli, spin:<two_s>, parity:<blocks>, weyl:<d> or fock:<re1>,<im1>,<re2>,<im2>,<cutoff>")]
    Parse(String),
}

impl CatalogError {
    /// Refusals grounded in the spectrum or the defining conditions, as
    /// opposed to malformed input.
    pub fn is_structural(&self) -> bool {
        match self {
            Self::Spectral(e) => e.is_structural(),
            Self::EigenvalueCondition { .. } | Self::TriangleCondition { .. } => true,
            _ => false,
        }
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            Self::Spectral(e) => e.residual(),
            Self::Linalg(e) => e.residual(),
            _ => None,
        }
    }
}

fn unitary(m: ComplexMatrix) -> UnitaryOperator {
    UnitaryOperator::try_from_matrix(m).expect("catalog matrices are unitary by construction")
}

/// `u1 = σx`, `u2 = σz`, `u3 = -i σz σx = σy`.
pub fn pauli_triple() -> PmsTriple {
    complete_triple(&unitary(pauli::x()), &unitary(pauli::z()), Sign::Minus).expect("Pauli operators anti-commute")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinParams {
    /// Twice the spin; the dimension is `two_s + 1`.
    pub two_s: u32,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl SpinParams {
    /// Rotations by `π` about all three axes.
    pub fn half_turns(two_s: u32) -> Self {
        Self {
            two_s,
            t1: PI,
            t2: PI,
            t3: PI,
        }
    }
}

/// `(S_x, S_y, S_z)` in the basis `m = S, S-1, …, -S`.
pub fn spin_matrices(two_s: u32) -> [ComplexMatrix; 3] {
    let d = two_s as usize + 1;
    let s = two_s as f64 / 2.0;
    let m = |b: usize| s - b as f64;
    // S+ |m⟩ = sqrt(S(S+1) - m(m+1)) |m+1⟩, and |m+1⟩ sits one row up
    let plus = ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            C64::new((s * (s + 1.0) - m(j) * (m(j) + 1.0)).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let minus = plus.adjoint();
    let sx = (&plus + &minus).scale(C64::new(0.5, 0.0));
    let sy = (&plus - &minus).scale(C64::new(0.0, -0.5));
    let sz = ComplexMatrix::from_diagonal(&(0..d).map(|b| C64::new(m(b), 0.0)).collect::<Vec<_>>());
    [sx, sy, sz]
}

const ANGLE_TOL: f64 = 1e-12;

/// Triple from `u1 = exp(iπS_x)`, `u2 = exp(iπS_y)` and `u3 = i u2† u1†`.
///
/// Integer spins are refused with the pairing defect of `exp(iπS_z)`.
pub fn spin_rotation_triple(p: SpinParams) -> Result<PmsTriple, CatalogError> {
    if p.two_s == 0 {
        return Err(CatalogError::InvalidParameter("two_s must be at least 1".into()));
    }
    for (name, value) in [("t1", p.t1), ("t2", p.t2), ("t3", p.t3)] {
        if (value - PI).abs() > ANGLE_TOL {
            return Err(CatalogError::EigenvalueCondition { name, value });
        }
    }
    let [sx, sy, sz] = spin_matrices(p.two_s);
    let rz = expm_i_hermitian(&sz, p.t3)?;
    require_pairing(rz.matrix(), &Tolerances::default())?;
    let u1 = expm_i_hermitian(&sx, p.t1)?;
    let u2 = expm_i_hermitian(&sy, p.t2)?;
    Ok(complete_triple(&u1, &u2, Sign::Plus)?)
}

/// How `exp(iπS_z)` relates to a triple's `u3`: `exp(iπS_z) ≈ phase·u3`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PhaseRelation {
    pub phase: C64,
    /// `max |exp(iπS_z) - phase·u3|`.
    pub residual: f64,
}

pub fn exp_sz_relation(triple: &PmsTriple, two_s: u32) -> Result<PhaseRelation, CatalogError> {
    let [_, _, sz] = spin_matrices(two_s);
    if sz.rows() != triple.dim() {
        return Err(CatalogError::InvalidParameter(format!(
            "two_s = {two_s} does not match dimension {}",
            triple.dim()
        )));
    }
    let rz = expm_i_hermitian(&sz, PI)?;
    let u3 = triple.u3.matrix();
    let overlap = (&u3.adjoint() * rz.matrix()).trace() / triple.dim() as f64;
    let phase = overlap / overlap.norm();
    let residual = rz.max_diff(&u3.scale(phase));
    Ok(PhaseRelation { phase, residual })
}

/// `u1 = ⊕σz`, `u2 = ⊕σx`, `u3 = i u2† u1† = ⊕σy` over `num_blocks` blocks
/// `{|2n⟩, |2n+1⟩}`.
pub fn parity_pseudospin_triple(num_blocks: usize) -> Result<PmsTriple, CatalogError> {
    if num_blocks == 0 {
        return Err(CatalogError::InvalidParameter("num_blocks must be at least 1".into()));
    }
    let u1 = direct_sum(&vec![pauli::z(); num_blocks])?;
    let u2 = direct_sum(&vec![pauli::x(); num_blocks])?;
    Ok(complete_triple(&unitary(u1), &unitary(u2), Sign::Plus)?)
}

/// Clock `Z|k⟩ = ω^k|k⟩` with `ω = e^{2πi/d}`.
pub fn clock(d: usize) -> ComplexMatrix {
    let diag: Vec<C64> = (0..d).map(|k| C64::from_polar(1.0, 2.0 * PI * k as f64 / d as f64)).collect();
    ComplexMatrix::from_diagonal(&diag)
}

/// Shift `X|k⟩ = |k+1 mod d⟩`.
pub fn shift(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |i, j| {
        if i == (j + 1) % d {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `u1 = Z^{d/2}`, `u2 = X`, `u3 = i u2† u1†`. Odd `d` is refused with the
/// pairing defect of `X`.
pub fn weyl_triple(d: usize) -> Result<PmsTriple, CatalogError> {
    if d < 2 {
        return Err(CatalogError::InvalidParameter("d must be at least 2".into()));
    }
    let x = shift(d);
    if d % 2 == 1 {
        require_pairing(&x, &Tolerances::default())?;
        unreachable!("d-th roots of unity never pair for odd d");
    }
    // Z^{d/2} = diag((-1)^k), built exactly
    let diag: Vec<C64> = (0..d).map(|k| C64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
    let u1 = ComplexMatrix::from_diagonal(&diag);
    Ok(complete_triple(&unitary(u1), &unitary(x), Sign::Plus)?)
}

/// A catalog entry addressed by name.
#[derive(Debug, Clone, PartialEq)]
pub enum CatalogSpec {
    Pauli,
    Spin { two_s: u32 },
    Parity { blocks: usize },
    Weyl { d: usize },
    Fock(FockParams),
}

#[derive(Debug, Clone)]
pub enum CatalogEntry {
    Exact(PmsTriple),
    Approx(ApproxTriple),
}

impl CatalogEntry {
    pub fn exact(&self) -> Option<&PmsTriple> {
        match self {
            Self::Exact(t) => Some(t),
            Self::Approx(_) => None,
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match self {
            Self::Exact(t) => serde_json::to_value(TripleJson::from(t)),
            Self::Approx(a) => serde_json::to_value(a),
        }
        .expect("catalog entries serialize")
    }
}

impl CatalogSpec {
    pub fn build(&self) -> Result<CatalogEntry, CatalogError> {
        Ok(match self {
            Self::Pauli => CatalogEntry::Exact(pauli_triple()),
            Self::Spin { two_s } => CatalogEntry::Exact(spin_rotation_triple(SpinParams::half_turns(*two_s))?),
            Self::Parity { blocks } => CatalogEntry::Exact(parity_pseudospin_triple(*blocks)?),
            Self::Weyl { d } => CatalogEntry::Exact(weyl_triple(*d)?),
            Self::Fock(p) => CatalogEntry::Approx(fock_displacement_triple(p)?),
        })
    }
}

impl fmt::Display for CatalogSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Pauli => write!(f, "pauli"),
            Self::Spin { two_s } => write!(f, "spin:{two_s}"),
            Self::Parity { blocks } => write!(f, "parity:{blocks}"),
            Self::Weyl { d } => write!(f, "weyl:{d}"),
            Self::Fock(p) => write!(
                f,
                "fock:{},{},{},{},{}",
                p.alpha1.re, p.alpha1.im, p.alpha2.re, p.alpha2.im, p.cutoff
            ),
        }
    }
}

impl FromStr for CatalogSpec {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, CatalogError> {
        let bad = || CatalogError::Parse(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let int = |a: Option<&str>| a.and_then(|v| v.parse::<usize>().ok()).ok_or_else(bad);
        match name {
            "pauli" if arg.is_none() => Ok(Self::Pauli),
            "spin" => Ok(Self::Spin {
                two_s: u32::try_from(int(arg)?).map_err(|_| bad())?,
            }),
            "parity" => Ok(Self::Parity { blocks: int(arg)? }),
            "weyl" => Ok(Self::Weyl { d: int(arg)? }),
            "fock" => {
                let parts: Vec<&str> = arg.ok_or_else(bad)?.split(',').map(str::trim).collect();
                if parts.len() != 5 {
                    return Err(bad());
                }
                let num: Vec<f64> = parts[..4]
                    .iter()
                    .map(|p| p.parse::<f64>().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?;
                Ok(Self::Fock(FockParams {
                    alpha1: C64::new(num[0], num[1]),
                    alpha2: C64::new(num[2], num[3]),
                    cutoff: parts[4].parse().map_err(|_| bad())?,
                }))
            }
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{tensor, I};
    use crate::spectral::{canonical_form, verify_algebra, PairingDefect};

    #[test]
    fn pauli_u3_is_sigma_y() {
        let t = pauli_triple();
        assert!(t.u3.max_diff(&pauli::y()) < 1e-15);
        assert!(t.is_valid(1e-15));
        let f = canonical_form(&t).unwrap();
        assert_eq!((f.n_blocks, f.block_multiplicities.clone()), (1, vec![1]));
    }

    #[test]
    fn spin_half_is_i_sigma() {
        let t = spin_rotation_triple(SpinParams::half_turns(1)).unwrap();
        assert_eq!(t.dim(), 2);
        assert!(t.u1.max_diff(&pauli::x().scale(I)) < 1e-13);
        assert!(t.u2.max_diff(&pauli::y().scale(I)) < 1e-13);
        assert!(t.residuals.anticommutator_12 < 1e-12);
        // exp(iπσz/2) = iσz while u3 = -σz
        let rel = exp_sz_relation(&t, 1).unwrap();
        assert!((rel.phase - C64::new(0.0, -1.0)).norm() < 1e-12, "{:?}", rel);
        assert!(rel.residual < 1e-12);
    }

    #[test]
    fn spin_matrices_commutation() {
        for two_s in 1..6 {
            let [sx, sy, sz] = spin_matrices(two_s);
            let comm = sx.commutator(&sy).unwrap();
            assert!(comm.max_diff(&sz.scale(I)) < 1e-13);
            let s = two_s as f64 / 2.0;
            let casimir = &(&(&sx * &sx) + &(&sy * &sy)) + &(&sz * &sz);
            assert!(casimir.distance_to_scalar(C64::new(s * (s + 1.0), 0.0)) < 1e-12);
        }
    }

    #[test]
    fn spin_one_refused_with_multiplicity_mismatch() {
        let err = spin_rotation_triple(SpinParams::half_turns(2)).unwrap_err();
        assert!(err.is_structural());
        let CatalogError::Spectral(SpectralError::Pairing { defect, .. }) = err else {
            panic!("{err:?}")
        };
        match defect {
            PairingDefect::MultiplicityMismatch {
                lambda,
                multiplicity,
                partner_multiplicity,
            } => {
                assert!((lambda + 1.0).norm() < 1e-9);
                assert_eq!((multiplicity, partner_multiplicity), (2, 1));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spin_angle_other_than_pi_refused() {
        let p = SpinParams {
            t2: 1.0,
            ..SpinParams::half_turns(3)
        };
        let err = spin_rotation_triple(p).unwrap_err();
        assert!(matches!(err, CatalogError::EigenvalueCondition { name: "t2", .. }));
        assert!(err.to_string().contains("e^{i(S+1-b)t}"));
    }

    #[test]
    fn spin_three_halves_is_valid() {
        let t = spin_rotation_triple(SpinParams::half_turns(3)).unwrap();
        assert_eq!(t.dim(), 4);
        assert!(verify_algebra(&t, 1e-9).pass);
        assert!(exp_sz_relation(&t, 3).unwrap().residual < 1e-12);
    }

    #[test]
    fn single_parity_block_is_pauli_in_disguise() {
        let t = parity_pseudospin_triple(1).unwrap();
        assert_eq!(t.u1.matrix(), &pauli::z());
        assert_eq!(t.u2.matrix(), &pauli::x());
        assert!(t.u3.max_diff(&pauli::y()) < 1e-15);
    }

    #[test]
    fn parity_eight_is_exact() {
        let t = parity_pseudospin_triple(8).unwrap();
        assert_eq!(t.dim(), 16);
        assert_eq!(t.residuals.max(), 0.0);
        let f = canonical_form(&t).unwrap();
        assert_eq!(f.n_blocks, 1);
        assert_eq!(f.block_multiplicities, vec![8]);
        assert!((f.lambdas[0] - 1.0).norm() < 1e-12);
    }

    #[test]
    fn weyl_two_is_pauli_with_roles_swapped() {
        let w = weyl_triple(2).unwrap();
        let p = pauli_triple();
        assert!(w.u1.max_diff(p.u2.matrix()) < 1e-12);
        assert!(w.u2.max_diff(p.u1.matrix()) < 1e-12);
        assert!(w.u3.max_diff(p.u3.matrix()) < 1e-12);
    }

    #[test]
    fn weyl_four_clock_shift_relation() {
        let z = clock(4);
        let x = shift(4);
        let z2 = &z * &z;
        assert!((&z2 * &x).max_diff(&(&x * &z2).scale(C64::new(-1.0, 0.0))) < 1e-15);
        let t = weyl_triple(4).unwrap();
        assert!(t.u1.max_diff(&z2) < 1e-15);
        assert!(verify_algebra(&t, 1e-9).pass);
        let f = canonical_form(&t).unwrap();
        assert_eq!(f.n_blocks, 2);
    }

    #[test]
    fn odd_weyl_refused() {
        for d in [3, 5, 7, 9] {
            let err = weyl_triple(d).unwrap_err();
            assert!(err.is_structural(), "{d}: {err}");
            assert!(matches!(
                err,
                CatalogError::Spectral(SpectralError::Pairing {
                    defect: PairingDefect::NegationAbsent { .. },
                    ..
                })
            ));
        }
    }

    #[test]
    fn catalog_names_round_trip() {
        for name in ["pauli", "spin:3", "parity:8", "weyl:4", "fock:1.25,0,0,1.25,16"] {
            let spec: CatalogSpec = name.parse().unwrap();
            assert_eq!(spec.to_string().parse::<CatalogSpec>().unwrap(), spec);
        }
        for bad in ["", "pauli:2", "spin", "spin:x", "weyl:-1", "fock:1,2,3", "ising:4"] {
            assert!(bad.parse::<CatalogSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn pauli_square_entries_match_tensor_products() {
        let t = pauli_triple();
        let a33 = tensor(t.u3.matrix(), t.u3.matrix()).unwrap();
        assert!(a33.max_diff(&tensor(&pauli::y(), &pauli::y()).unwrap()) < 1e-15);
        assert!((&a33 * &a33).distance_to_scalar(C64::new(1.0, 0.0)) < 1e-15);
    }
}
