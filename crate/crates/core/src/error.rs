use alloc::string::String;

use thiserror::Error;

/// What went wrong while reading DSL text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    UndeclaredSymbol(String),
    UndeclaredVariable(String),
    Duplicate(String),
}

/// A located parse failure. `line` and `column` are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: [{}] {}", self.code(), self.describe())]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, line: usize, column: usize) -> Self {
        ParseError { kind, line, column }
    }

    /// Stable machine-readable code, distinct per kind.
    pub fn code(&self) -> &'static str {
        match self.kind {
            ParseErrorKind::Syntax(_) => "E001-syntax",
            ParseErrorKind::ArityMismatch { .. } => "E002-arity",
            ParseErrorKind::UndeclaredSymbol(_) => "E003-undeclared-symbol",
            ParseErrorKind::UndeclaredVariable(_) => "E004-undeclared-variable",
            ParseErrorKind::Duplicate(_) => "E005-duplicate",
        }
    }

    fn describe(&self) -> String {
        use alloc::format;
        match &self.kind {
            ParseErrorKind::Syntax(msg) => msg.clone(),
            ParseErrorKind::ArityMismatch {
                symbol,
                expected,
                found,
            } => format!("symbol `{symbol}` takes {expected} argument(s), found {found}"),
            ParseErrorKind::UndeclaredSymbol(s) => format!("undeclared symbol `{s}`"),
            ParseErrorKind::UndeclaredVariable(s) => format!("undeclared variable `{s}`"),
            ParseErrorKind::Duplicate(s) => format!("`{s}` is declared twice"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("interpretation does not match: {0}")]
    Mismatch(String),
    #[error(
        "search space of {space} exceeds the budget of {budget}; use branch-bound or local mode"
    )]
    BudgetExceeded { space: String, budget: u64 },
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("instance lacks the no-collision property: {0}")]
    NotTermDag(String),
    #[error("table is not a quasigroup: {0}")]
    NotQuasigroup(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown case study `{0}`")]
    UnknownCase(String),
    #[error("internal check failed: {0}")]
    Internal(String),
}
