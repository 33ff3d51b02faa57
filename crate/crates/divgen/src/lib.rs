//! Counter-assisted number generators with provable sequence diversity.
//!
//! An iterative generator `x_i = f(x_{i-1})` can fall into unexpectedly short
//! cycles no matter how strong `f` looks. Combining the iterate with a cyclic
//! counter through a Latin-square operation (`x_i = f(x_{i-1}) ⋆ i`) bounds
//! the number of distinct states in every window of the state sequence from
//! below, for *every* `f` and *every* seed. This crate implements the
//! generator constructions (counter-assisted, sequence-assisted, cascades,
//! t-step tuple mode), exact diversity and cycle analysis on small state
//! spaces, the worst-case "meshed" functions that show the bounds are tight,
//! and the oracle experiments behind the birthday-collision distinguisher.
//!
//! Everything is exact and deterministic: analyses enumerate all seeds and
//! run each orbit until its extended state recurs, and all randomized
//! experiments are driven by an explicitly seeded RNG.

pub mod statespace;
pub mod genkit;
pub(crate) mod orbit;
pub mod analysis;
pub mod adversarial;
pub mod multistep;
pub mod oracles;

pub use statespace::{Arithmetic, LatinOp, LatinReport, StateSpace};

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An operand or parameter is outside its stated domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested operation is not valid for the given state space.
    #[error("invalid operation: {0}")]
    InvalidOp(String),

    /// An exhaustive analysis was refused because it exceeds a size guard.
    #[error("guard exceeded: {0}")]
    Guard(String),

    /// A range parameter (window size, length) is inconsistent.
    #[error("range error: {0}")]
    Range(String),

    /// An adversarial construction's constraints cannot be satisfied.
    #[error("construction error: {0}")]
    Construction(String),

    /// A sequence-assisted generator was stepped past its assist sequence.
    #[error("assist sequence exhausted: index {index} but only {len} values provided")]
    AssistExhausted { index: u64, len: usize },

    /// Unknown gallery entry name.
    #[error("unknown gallery entry: {0}")]
    UnknownGallery(String),

    /// A table file or config could not be parsed or validated.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
