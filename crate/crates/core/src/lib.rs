//! Approximate judgement aggregation.
//!
//! Exact and Monte-Carlo inconsistency/dependency indices for aggregation
//! mechanisms over binary agendas, the boolean-function analysis behind the
//! approximation theorems (influence, ignorability, junta projections,
//! Walsh–Hadamard spectra), brute-force characterisation oracles, and a
//! harness that checks the approximation bounds at desk scale.

pub mod agenda;
pub mod bitfn;
pub mod cli;
pub mod error;
pub mod fourier;
pub mod indices;
pub mod mechanism;
pub mod montecarlo;
pub mod oracle;
pub mod rational;
pub mod theorems;

pub use agenda::{Agenda, AgendaKind, AffineAgenda, TruthFunctionalAgenda};
pub use bitfn::{BoolFn, Coalition, Family};
pub use mechanism::{IndependentMechanism, Mechanism, Profile, ProfileSpace, TableMechanism};
pub use error::{Error, Result};
pub use rational::Rational;
