use thiserror::Error;

/// Everything that can go wrong in divlab.
///
/// Variants are grouped by the module that raises them; [`Error::is_io`]
/// separates filesystem problems from invalid input so front ends can map
/// them to different exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    // pmf
    #[error("alphabet is empty")]
    EmptyAlphabet,

    #[error("duplicate letter {0:?} in alphabet")]
    DuplicateLetter(String),

    #[error("alphabet has {letters} letters but {probabilities} probabilities were given")]
    LengthMismatch {
        letters: usize,
        probabilities: usize,
    },

    #[error("negative probability {value} at index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, not 1 (tolerance {tolerance})")]
    MassNotUnit { sum: f64, tolerance: f64 },

    #[error("non-finite probability at index {index}")]
    NonFiniteMass { index: usize },

    #[error("index {index} out of range for alphabet of {len} letters")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unknown letter {0:?}")]
    UnknownLetter(String),

    #[error("epsilon {epsilon} outside (0, 2^-(n-1)) for n = {n}")]
    EpsilonOutOfRange { n: usize, epsilon: f64 },

    #[error("alphabet size {n} is too small (need at least {min})")]
    AlphabetTooSmall { n: usize, min: usize },

    #[error("xi = {xi} puts a band outside [1, {n}]")]
    XiOutOfRange { xi: usize, n: usize },

    // divergence
    #[error("PMFs are defined over different alphabets")]
    AlphabetMismatch,

    #[error("joint PMF marginals do not match: {0}")]
    MarginalMismatch(String),

    #[error("joint PMF must be {expected}x{expected}, got {rows} rows")]
    JointShape { expected: usize, rows: usize },

    #[error("k must be positive, got {0}")]
    NonPositiveK(f64),

    #[error("scale factor must be positive, got {0}")]
    NonPositiveFactor(f64),

    #[error("conditional entropy needs a joint PMF")]
    MissingJoint,

    #[error("cannot parse measure {0:?}")]
    ParseMeasure(String),

    // costbenefit
    #[error("measure {0} is not supported here")]
    UnsupportedMeasure(String),

    #[error("cost must be positive, got {0}")]
    NonPositiveCost(f64),

    #[error("maximum entropy override {hmax} is below H(input) = {entropy}")]
    HmaxTooSmall { hmax: f64, entropy: f64 },

    // coding
    #[error("letter {0:?} has zero probability")]
    ZeroProbabilityLetter(String),

    #[error("invalid prefix code: {0}")]
    InvalidCode(String),

    // curves
    #[error("sampling grid is empty")]
    GridEmpty,

    #[error("invalid curve specification: {0}")]
    InvalidGrid(String),

    // mcda
    #[error("missing score for criterion {criterion:?}, candidate {candidate:?}")]
    MissingScore {
        criterion: String,
        candidate: String,
    },

    #[error(
        "score {score} out of range [0, 5] for criterion {criterion:?}, candidate {candidate:?}"
    )]
    ScoreOutOfRange {
        criterion: String,
        candidate: String,
        score: i64,
    },

    #[error("unknown criterion {0:?}")]
    UnknownCriterion(String),

    #[error("unknown candidate {0:?}")]
    UnknownCandidate(String),

    #[error("malformed criteria table: {0}")]
    MalformedTable(String),

    // scenarios
    #[error("answer {answer} outside [1, {n}]")]
    AnswerOutOfRange { answer: i64, n: usize },

    #[error("no bands defined for question {0:?}")]
    UnknownQuestion(String),

    #[error("invalid scenario bundle {name:?}: {reason}")]
    InvalidBundle { name: String, reason: String },

    #[error("invalid survey record: {0}")]
    InvalidRecord(String),

    // io
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{path}: {message}")]
    Format { path: String, message: String },
}

impl Error {
    /// True when the error came from the filesystem rather than from the data.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    pub(crate) fn format(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        Error::Format {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
