use thiserror::Error;

/// Errors raised by the library.
///
/// The variants are grouped by the exit-code class the CLI maps them to:
/// input problems, resource caps, and internal invariant violations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid braid word: {0}")]
    InvalidBraid(String),

    #[error("invalid grid diagram: {0}")]
    InvalidGrid(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("not a knot: closure has {0} components")]
    NotAKnot(usize),

    #[error("chain is not a cycle: its boundary has {0} nonzero terms")]
    NotACycle(usize),

    #[error("resource cap exceeded: grid size {k} exceeds limit {limit} ({estimate})")]
    ResourceCap {
        k: usize,
        limit: usize,
        estimate: String,
    },

    #[error("resource cap exceeded: grading bucket of {size} states exceeds limit {limit}")]
    BucketCap { size: usize, limit: usize },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn cap(k: usize, limit: usize) -> Self {
        Error::ResourceCap {
            k,
            limit,
            estimate: sizing_estimate(k),
        }
    }

    /// Exit code class: 1 input, 2 resources, 3 internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceCap { .. } | Error::BucketCap { .. } => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

/// Human readable size of the generator set of a size-`k` grid.
pub fn sizing_estimate(k: usize) -> String {
    // log10(k!) via a running sum keeps this finite for large k.
    let log10: f64 = (2..=k).map(|i| (i as f64).log10()).sum();
    if log10 < 15.0 {
        let states: u128 = (1..=k as u128).product();
        format!("{states} generators")
    } else {
        format!("about 10^{log10:.1} generators")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
