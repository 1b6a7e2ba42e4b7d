//! Truncated Puiseux series over the rationals: a computable valued field
//! with value group `Q` and residue field `Q`, and its tree of closed balls.
//!
//! Every value carries its own precision. Operations that would need digits
//! beyond the known precision fail instead of guessing.

mod ball;
pub mod sample;
mod series;

pub use ball::{ball_inf, cone_index, Ball, PNode, PuiseuxBranch, PuiseuxField};
pub use series::{Series, SeriesJson, TermJson, Valuation};

use thiserror::Error;

use crate::rational::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PuiseuxError {
    #[error("values indistinguishable up to O(t^{0})")]
    PrecisionExhausted(Q),
    #[error("division by a series that is zero up to O(t^{0})")]
    DivisionByZero(Q),
    #[error("negative valuation {0}")]
    NegativeValuation(Q),
    #[error("insufficient precision: need digits at t^{needed}, known up to O(t^{available})")]
    InsufficientPrecision { needed: Q, available: Q },
    #[error("point lies outside the ball")]
    OutsideBall,
    #[error("invalid series: {0}")]
    InvalidSeries(String),
}
