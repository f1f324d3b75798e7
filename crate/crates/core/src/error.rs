use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("position {index} out of range for word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("unbound free variable `{0}`")]
    UnboundVariable(String),

    #[error("variable `{var}` assigned position {pos}, outside 1..={len}")]
    PositionOutOfRange { var: String, pos: usize, len: usize },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("expected dimension {expected}, got {found}")]
    Dimension { expected: usize, found: usize },

    #[error("marker `{0}` collides with an existing letter")]
    MarkerCollision(String),

    #[error("invalid interpretation: {0}")]
    InvalidInterpretation(String),

    #[error("invalid transducer: {0}")]
    InvalidMachine(String),

    #[error("invalid combinator tree: {0}")]
    InvalidTree(String),

    #[error("non-termination: configuration (state {state}, head {head}) repeated after {steps} steps")]
    NonTermination { state: String, head: usize, steps: usize },

    #[error("output emitted while reading an endmarker (state {state}, head {head})")]
    EmitAtEndmarker { state: String, head: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("unknown builtin or function reference `{0}`")]
    Unknown(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors raised while running a machine rather than loading one.
    pub fn is_evaluation_error(&self) -> bool {
        matches!(
            self,
            Error::NonTermination { .. }
                | Error::EmitAtEndmarker { .. }
                | Error::UnboundVariable(_)
                | Error::PositionOutOfRange { .. }
                | Error::BudgetExceeded(_)
        )
    }
}
