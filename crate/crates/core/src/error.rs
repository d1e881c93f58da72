use thiserror::Error;

/// Errors raised by the engine. Every variant carries a stable machine code
/// (see [`Error::code`]) that the CLI and batch runner report verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("unrepresentable scale: {0}")]
    UnrepresentableScale(String),

    #[error("unsupported constant: {0}")]
    UnsupportedConstant(String),

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("undecided sign: {0}")]
    Undecided(String),

    #[error("parity dependent: {0}")]
    ParityDependent(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("outside summand grammar: {0}")]
    Grammar(String),

    #[error("pole in summation range: {0}")]
    Pole(String),

    #[error("divisibility violation: {0}")]
    Divisibility(String),

    #[error("oracle overflow guard: {0}")]
    Overflow(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "E_DIV_ZERO",
            Error::UnrepresentableScale(_) => "E_UNREPRESENTABLE_SCALE",
            Error::UnsupportedConstant(_) => "E_UNSUPPORTED_CONSTANT",
            Error::Unbounded(_) => "E_UNBOUNDED",
            Error::Undecided(_) => "E_UNDECIDED",
            Error::ParityDependent(_) => "E_PARITY_DEPENDENT",
            Error::Domain(_) => "E_DOMAIN",
            Error::Grammar(_) => "E_GRAMMAR",
            Error::Pole(_) => "E_POLE",
            Error::Divisibility(_) => "E_DIVISIBILITY",
            Error::Overflow(_) => "E_OVERFLOW",
            Error::UnknownScenario(_) => "E_UNKNOWN_SCENARIO",
            Error::Syntax { .. } => "E_SYNTAX",
            Error::UnknownIdentifier(_) => "E_UNKNOWN_IDENT",
        }
    }

    /// True for failures that happen before evaluation starts.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::UnknownIdentifier(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
