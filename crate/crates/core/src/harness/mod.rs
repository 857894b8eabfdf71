//! Experiment orchestration: configuration, the command set behind the CLI,
//! inequality checks and report formatting.
//!
//! Cells are computed in parallel and gathered in input order, so every
//! output is a pure function of the configuration.

mod commands;
mod config;
mod report;
mod summary;
mod verify;

use serde_json::Value;
use thiserror::Error;

use crate::blocker::BlockError;
use crate::flatspace::FlatError;
use crate::growth::GrowthError;
use crate::hyperbolic::HyperbolicError;

pub use commands::{
    cmd_block, cmd_count, cmd_entropy, cmd_recursion, cmd_transform, BlockRun, CountRows, CountTable, EntropyPair,
    EntropyRun, FlatCountRow, HyperbolicCountRow, RecursionRun, TransformRow, TransformTable,
};
pub use config::{
    BoundChoice, ExperimentConfig, Geometry, PairSpec, SamplerConfig, Scalar, TGrid, TransformConfig, VerifyToggles,
    MAX_GRID_POINTS,
};
pub use report::{Check, CheckStatus, Context, Summary, VerificationReport};
pub use summary::{cmd_report, RunSummary};
pub use verify::{cmd_verify, VerifyRun};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("resource cap: {0}")]
    ResourceCap(String),
    #[error(transparent)]
    Flat(#[from] FlatError),
    #[error(transparent)]
    Block(#[from] BlockError),
    #[error(transparent)]
    Hyperbolic(#[from] HyperbolicError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl HarnessError {
    /// 1 for a failed internal consistency check, 2 for bad input, 3 for a
    /// resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::ResourceCap(_) => 3,
            HarnessError::Block(BlockError::ResourceCap(_)) => 3,
            HarnessError::Block(
                BlockError::Infeasible(_) | BlockError::MidpointCover(_) | BlockError::InvalidSolution(_),
            ) => 1,
            HarnessError::Hyperbolic(HyperbolicError::ResourceCap(_) | HyperbolicError::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    match workers {
        None => Ok(f()),
        Some(0) => Err(HarnessError::Config("workers must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::ResourceCap(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// A command result that can be written out.
pub trait Render {
    fn to_json(&self) -> Value;

    /// `None` when the output has no tabular form.
    fn to_csv(&self) -> Option<String> {
        None
    }

    /// False when a hard check failed.
    fn passed(&self) -> bool {
        true
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_text(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("json values serialize");
    s.push('\n');
    s
}

pub(crate) fn num(x: f64) -> Value {
    crate::blocker::num(x)
}

pub(crate) fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

/// Quotes a CSV field when it holds a separator or a quote.
pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
