//! Error types shared across the crate.

use thiserror::Error;

/// A single violated invariant or unusable input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A headcount does not divide evenly by the per-minute depletion rate,
    /// so the arena cannot empty on a whole-minute boundary.
    #[error("divisibility violation: {0}")]
    DivisibilityViolation(String),

    /// Two parameters are in the wrong order (e.g. armed success not above
    /// unarmed success, or phase kill rates not decreasing).
    #[error("ordering violation: {0}")]
    OrderingViolation(String),

    /// A probability lies outside (0, 1] or a count is out of range.
    #[error("range violation: {0}")]
    RangeViolation(String),

    /// A fighter schedule breaks its monotonicity or bound constraints.
    #[error("schedule violation: {0}")]
    ScheduleViolation(String),

    /// A joint fight needs at least two people present for the stray-fire
    /// factor to be defined.
    #[error("degenerate pool: {0}")]
    DegeneratePool(String),

    /// The scenario admits no meaningful threshold (e.g. everyone dies in
    /// the first minute).
    #[error("degenerate scenario: {0}")]
    DegenerateScenario(String),

    /// A minute index past the last minute the arena can sustain.
    #[error("minute {minute} is beyond the {horizon}-minute horizon")]
    OutOfHorizon { minute: u32, horizon: u32 },
}

/// Validation failure carrying *every* violated invariant, not just the first.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}", self.render())]
pub struct ValidationErrors(pub Vec<Error>);

impl ValidationErrors {
    fn render(&self) -> String {
        self.0
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl From<Error> for ValidationErrors {
    fn from(e: Error) -> Self {
        ValidationErrors(vec![e])
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
