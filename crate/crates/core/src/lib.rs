//! Coherence checking for probability assignments over boolean events.
//!
//! The crate decides whether a partial assignment of probabilities to events
//! extends to a finitely additive state, producing either the state or a
//! Dutch-book stake vector, computes the tight probability interval of a
//! query event, and works with exchangeable states through their extremal
//! decomposition. All arithmetic is exact.

pub mod algebra;
pub mod bookfile;
pub mod cli;
pub mod coherence;
pub mod exchange;
pub mod formula;
pub mod ratlp;
pub mod rational;
pub mod report;

pub use algebra::{AlgebraError, Event, EventAlgebra, StateVector};
pub use formula::{parse, Formula, FormulaError, Universe, World};
pub use rational::Rational;
