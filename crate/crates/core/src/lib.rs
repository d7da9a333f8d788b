//! Construction and analysis of CHSH-type (full-correlation) Bell inequalities.
//!
//! Expressions are exact rational coefficient tensors over a measurement
//! scenario. The [`polytope`] module certifies local-realistic bounds and
//! facet-ness by brute force over deterministic strategies, [`lifting`] adds
//! an observer with two or three settings to known facets, and [`quantum`]
//! evaluates Bell operators on qubit states.
//!
//! Setting indices are zero-based everywhere. Party 0 is the most significant
//! index of a coefficient tensor and the leftmost qubit of a ket.

pub mod document;
pub mod error;
pub mod exact;
pub mod lifting;
pub mod polytope;
pub mod quantum;
pub mod reproduce;
pub mod scenario;

pub use error::{Error, Result};
pub use scenario::{
    linear_combine, BellExpression, DeterministicStrategy, PartyMap, Rational, Scenario,
    SignedSettingMap,
};
