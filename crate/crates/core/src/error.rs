use thiserror::Error;

/// Errors shared across the rate calculus and the simulation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A theorem hypothesis required by the operation does not hold.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// Rate inversion failed because the bracket does not contain the target.
    #[error(
        "no bracket: rate({bracket_hi}) = {value} is still above the target {target}; \
         enlarge the bracket"
    )]
    NoBracket {
        bracket_hi: f64,
        value: f64,
        target: f64,
    },

    /// Bisection hit its iteration cap without meeting the residual tolerance.
    #[error("bisection stalled: residual {residual} above tolerance {tolerance}")]
    ToleranceNotMet { residual: f64, tolerance: f64 },

    /// A simulation would exceed the configured sample-step budget.
    #[error("sample budget exceeded: run needs {required} sample-steps, budget is {budget}")]
    BudgetExceeded { required: u64, budget: u64 },

    /// A block index range runs past the available sequence prefix.
    #[error("block range [{lo}, {hi}) exceeds available sequence length {len}")]
    BlockRange { lo: f64, hi: f64, len: usize },

    /// Sequence arguments have incompatible lengths.
    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    /// An intermediate index grew past the addressable range.
    #[error("index overflow: {0}")]
    IndexOverflow(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
