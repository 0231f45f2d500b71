use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("budget exceeded while {context}: {detail}")]
    BudgetExceeded { context: String, detail: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unresolved {kind} reference `{name}`")]
    UnresolvedRef { kind: &'static str, name: String },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("functor does not invert `{0}`")]
    NotInverting(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn budget(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::BudgetExceeded { context: context.into(), detail: detail.into() }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
