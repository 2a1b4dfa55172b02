use crate::lattice::ParamViolation;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("box side must be a nonnegative even integer, got {0}")]
    InvalidBoxSide(i64),

    #[error("window side must be a positive even integer, got {0}")]
    InvalidWindowSide(i64),

    #[error("parameter constraints violated: {}", format_violations(.0))]
    ParamViolations(Vec<ParamViolation>),

    #[error("window side {side} too small: region spans up to coordinate {needed} from the origin")]
    WindowTooSmall { side: i64, needed: i64 },

    #[error("geometry degenerate at this N: {0}")]
    DegenerateGeometry(String),

    #[error("edge {0} does not belong to the window")]
    UnknownEdge(String),

    #[error("times were generated for a different window ({expected} edges, got {got})")]
    TimesMismatch { expected: usize, got: usize },

    #[error("clock value out of the open interval (0,1): {0}")]
    BadClockValue(f64),

    #[error("time dump has {len} bytes, not a multiple of 8 matching {edges} edges")]
    BadTimesDump { len: usize, edges: usize },

    #[error("annulus malformed: {0}")]
    MalformedAnnulus(String),

    #[error("circuit is self-intersecting")]
    SelfIntersectingCircuit,

    #[error("origin not contained in the window")]
    OriginOutsideWindow,

    #[error("target {target:.6} outside the crossing-probability bracket (0, {at_half:.6}) at t = 1/2")]
    TargetOutsideBracket { target: f64, at_half: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(violations: &[ParamViolation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
