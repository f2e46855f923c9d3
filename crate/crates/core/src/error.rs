use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An exact computation was requested for a rule whose values are not rational.
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("empty report: coefficients vanish on the window [{start}, {end}]")]
    EmptyReport { start: u64, end: u64 },

    #[error("empty support within window {window}")]
    EmptySupport { window: u64 },

    #[error("insufficient data: need {needed} points, have {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("numeric failure after {iterations} iterations; bracket [{lo}, {hi}]")]
    NumericFailure {
        iterations: usize,
        lo: String,
        hi: String,
    },

    #[error("sample point n = {0} is undefined (coefficient is zero)")]
    SamplePointUndefined(u64),

    #[error("onset violation: f0({index}) = 0 inside the window (L too small)")]
    OnsetViolation { index: u64 },

    #[error("inequality check failed at n = {n}: {detail}")]
    CheckFailure { n: u64, detail: String },

    #[error("hypothesis bound violated at n = {n}: g(n)*n!/n^(theta*n) = {ratio} exceeds {cap}")]
    HypothesisFailure { n: u64, ratio: f64, cap: f64 },

    #[error("no qualifying degree in ({after}, {cap}]: {trace}")]
    SearchExhausted { after: u64, cap: u64, trace: String },

    #[error("integrality failure at n = {n}: {value} is not a nonnegative integer")]
    IntegralityFailure { n: u64, value: String },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("n = {n} exceeds the oracle cap {cap} for {class}")]
    CapExceeded { class: String, n: u64, cap: u64 },

    #[error("unknown class `{0}`")]
    UnknownClass(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
