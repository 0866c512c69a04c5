use thiserror::Error;

use crate::world::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate tangent: {0}")]
    DegenerateTangent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("goal cell ({0}, {1}) is blocked")]
    GoalBlocked(usize, usize),

    #[error("point ({0:.3}, {1:.3}) lies outside all zones")]
    OutsideAllZones(f64, f64),

    #[error("no route between zones {from} and {to}")]
    NoRoute { from: String, to: String },

    #[error("roadmap incomplete: {0}")]
    RoadmapIncomplete(String),

    #[error("unknown machine node {0}")]
    UnknownNode(u32),

    #[error("start pose is in collision")]
    StartBlocked,

    #[error("no path found after {expansions} expansions{}", join_suffix(.join))]
    NoPathFound {
        expansions: usize,
        /// Which composite-planner join failed, when known.
        join: Option<String>,
    },

    #[error("discontinuous join before part {index}: gap {gap:.6} m")]
    DiscontinuousJoin { index: usize, gap: f64 },

    #[error("roadmap validation failed:\n{0}")]
    ValidationFailed(Box<ValidationReport>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_suffix(join: &Option<String>) -> String {
    match join {
        Some(j) => format!(" (join {j})"),
        None => String::new(),
    }
}

impl Error {
    /// True for failures of the search itself rather than of the inputs.
    pub fn is_planning_failure(&self) -> bool {
        matches!(
            self,
            Error::NoPathFound { .. }
                | Error::NoRoute { .. }
                | Error::StartBlocked
                | Error::GoalBlocked(..)
        )
    }
}
