//! Finite-truncation spectral analysis of operators that commute with a
//! fixed elliptic operator on a closed manifold.
//!
//! The elliptic operator enters only through its distinct eigenvalues and
//! their multiplicities ([`SpectrumModel`]). Functions and distributions are
//! stored as per-eigenspace coefficient blocks ([`CoefficientField`]), and an
//! invariant operator as its per-eigenspace matrix ([`InvariantSymbol`]).
//! On top of that the crate offers
//!
//! * gain curves and polynomial lower-bound fits that test global
//!   hypoellipticity and global solvability ([`diagnostics`]),
//! * block solvers for single operators and systems, including the
//!   eigenbasis-switching solver for systems of normal operators
//!   ([`solvers`]),
//! * constructions of distributional counterexamples ([`witness`]),
//! * built-in torus and sphere models ([`models`]).

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod field;
pub mod fit;
pub mod io;
pub mod linalg;
pub mod models;
pub mod solvers;
pub mod spectrum;
pub mod symbol;
pub mod witness;

pub use config::{RunConfig, ZeroTol};
pub use diagnostics::{DiagnosticReport, GainCurve, Verdict, ZCensus};
pub use error::{Error, Result};
pub use field::{CoefficientField, DecayClass, DecayReport};
pub use fit::PolyBoundFit;
pub use linalg::{CMat, CVec, C64};
pub use solvers::SolveOutcome;
pub use spectrum::{BlockInfo, SpectrumModel};
pub use symbol::{InvariantSymbol, NormalBlockFactorization, SystemSymbol};
pub use witness::WitnessBundle;
