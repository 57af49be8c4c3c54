use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("search budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: String,
        needed: usize,
        budget: usize,
    },

    /// The active provider policy cannot supply a sound value.
    #[error("policy refusal: {0}")]
    Policy(String),
}

impl Error {
    pub(crate) fn parse(input: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Domain(_) => 1,
            Error::Budget { .. } => 2,
            Error::Policy(_) => 3,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
