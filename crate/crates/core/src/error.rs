use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("sequence ends in 1^inf and has only finitely many zeros")]
    PeriodAllOnes,

    #[error("{0} is outside the admissible range (0, 1/2)")]
    OutOfRange(String),

    #[error("coding {0} is not admissible for this target")]
    NotAdmissible(String),

    #[error("bracket does not straddle the target")]
    NoSignChange,

    #[error("enclosures too coarse to decide at {bits} bits; raise the precision")]
    Inconclusive { bits: u32 },

    #[error("bisection did not reach the target width within {0} steps")]
    StepLimit(u32),

    #[error("derivative truncation at {0} terms cannot certify positivity")]
    NeedsLargerTruncation(u32),

    #[error("fewer than two members of the parameter set were found")]
    InsufficientMembers,

    #[error("cover depth budget of {0} exceeded")]
    DepthBudgetExceeded(u32),

    #[error("malformed defining sequence: {0}")]
    MalformedSequence(String),

    #[error("thickness must be positive")]
    NonpositiveThickness,

    #[error("hypothesis cannot be satisfied: {0}")]
    HypothesisUnsatisfiable(String),

    #[error("no common parameter found within the search depth")]
    NoneFound,
}
