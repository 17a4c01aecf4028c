//! Peres-Mermin contextuality with arbitrary unitary operators.
//!
//! The crate decides whether a unitary can sit in a maximally violating
//! Peres-Mermin square (its spectrum must pair `λ ↔ -λ` with equal
//! multiplicities), constructs the completing operators, evaluates
//! `⟨Re X⟩` on arbitrary bipartite states along two independent routes,
//! computes the classical bounds 4 and `3√3`, and generates the standard
//! operator families: Pauli qubits, half-integer spin rotations, parity
//! pseudospins, clock-and-shift qudits and truncated phase-space
//! displacements.
//!
//! Modules:
//! - [`linalg`]: dense complex matrices, Jacobi eigensolvers, random states.
//! - [`spectral`]: pairing test, partner construction, triple algebra,
//!   canonical form.
//! - [`pms`]: square assembly, context checks, `⟨Re X⟩` evaluation, scans.
//! - [`bounds`]: classical bounds by enumeration and multi-start ascent.
//! - [`catalog`]: example operator families.

pub mod bounds;
pub mod catalog;
pub mod json;
pub mod linalg;
pub mod par;
pub mod pms;
pub mod spectral;
pub mod tol;

pub use linalg::{ComplexMatrix, DensityMatrix, StateVector, UnitaryOperator, C64};
pub use spectral::{PmsTriple, Sign};
