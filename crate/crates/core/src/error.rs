use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("two_s must be non-negative, got {0}")]
    NegativeSpin(i32),

    #[error("expected {expected} coefficients for two_s={two_s}, got {got}")]
    CoefficientCount {
        two_s: i32,
        expected: usize,
        got: usize,
    },

    #[error(
        "hermiticity violated: alpha[{two_k}/2]* = {lhs} but alpha[{neg_two_k}/2] = {rhs}",
        neg_two_k = -two_k
    )]
    NotHermitian { two_k: i32, lhs: String, rhs: String },

    #[error("spin mismatch: {what} has two_s={got}, expected {expected}")]
    SpinMismatch {
        what: &'static str,
        expected: i32,
        got: i32,
    },

    #[error("unsupported preset {name} for two_s={two_s} (only two_s=1 presets exist)")]
    UnsupportedPreset { name: &'static str, two_s: i32 },

    #[error("two_jz={two_jz} has the wrong parity for two_s={two_s}; two_jz must be {allowed}")]
    SectorParity {
        two_jz: i32,
        two_s: i32,
        allowed: &'static str,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: spacing {spacing} exceeds {limit} (10 nodes per length 1/(m max|alpha|))")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("eigensolver did not converge for matrix of size {size} after {iterations} iterations")]
    NoConvergence { size: usize, iterations: usize },

    #[error("invalid packet: {0}")]
    InvalidPacket(String),

    #[error("convergence study needs at least {needed} spacings, got {got}")]
    TooFewSpacings { needed: usize, got: usize },

    #[error("multiplet has no member in any adjacent solved sector")]
    MultipletNotAdjacent,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
