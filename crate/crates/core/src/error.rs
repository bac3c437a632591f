use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("degree imbalance: mean out-degree {mean_out} != mean in-degree {mean_in}")]
    Balance { mean_out: f64, mean_in: f64 },

    #[error("mean degree must be positive")]
    ZeroDegree,

    #[error("degenerate marginal: edge-type marginal has zero variance")]
    DegenerateMarginal,

    #[error("target assortativity {target} outside attainable range [{min}, {max}]")]
    OutOfRange { target: f64, min: f64, max: f64 },

    #[error("graph size {n} too small to sample any node; {}", match min_n {
        Some(m) => format!("smallest feasible size is {m}"),
        None => "no feasible size below 2^41".to_string(),
    })]
    TooSmall { n: usize, min_n: Option<usize> },

    /// Filler nodes ran out. Indicates a bug in the construction.
    #[error("internal capacity error: {0}")]
    Capacity(String),

    /// Slot and edge counts disagree in a matching group. Indicates a bug.
    #[error("internal matching error: {0}")]
    Match(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
