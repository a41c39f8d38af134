use thiserror::Error;

#[derive(Debug, Error)]
pub enum OssError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid instance: {}", .0.join("; "))]
    InvalidInstance(Vec<String>),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("budget infeasible: frac = {frac} is below the minimum feasible frac {min_frac} for this instance")]
    BudgetInfeasible { frac: f64, min_frac: f64 },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("undefined empty minimum: both the representative set and the selection are empty")]
    EmptyMinimum,

    #[error("lp solver returned {status:?} on a formulation that should be {expected}")]
    Solver { status: crate::lp::LpStatus, expected: &'static str },

    #[error("enumeration guard exceeded: {count} assignments > {limit}")]
    GuardExceeded { count: u128, limit: u128 },

    #[error("frame {0} has no loss value")]
    MissingLoss(String),

    #[error("scorer failed at step {step}: {source}")]
    Scorer {
        step: usize,
        #[source]
        source: Box<OssError>,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, OssError>;
