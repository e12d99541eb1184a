use std::fmt;

use serde::{Deserialize, Serialize};

/// 1-based line and column (columns count characters, not bytes).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub line: u32,
    pub column: u32,
}

impl Location {
    pub const START: Location = Location { line: 1, column: 1 };

    pub fn new(line: u32, column: u32) -> Self {
        Self { line, column }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

/// A positioned message about a rule or knowledge-base document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub location: Location,
    pub code: String,
    pub message: String,
}

impl Diagnostic {
    pub fn error(location: Location, code: &str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            location,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn warning(location: Location, code: &str, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            location,
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// `line:col: severity[code] message`
impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {}[{}] {}",
            self.location, self.severity, self.code, self.message
        )
    }
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

/// Machine tags carried in [`Diagnostic::code`].
pub mod codes {
    pub const ILLEGAL_CHAR: &str = "illegal-char";
    pub const SYNTAX: &str = "syntax";
    pub const DUP_ANTECEDENT: &str = "dup-antecedent";
    pub const NO_VARIABLES: &str = "no-variables";
    pub const DUP_VARIABLE: &str = "dup-variable";
    pub const INVALID_RANGE: &str = "invalid-range";
    pub const INVALID_SHAPE: &str = "invalid-shape";
    pub const INVALID_VARIABLE: &str = "invalid-variable";
    pub const UNKNOWN_VARIABLE: &str = "unknown-variable";
    pub const UNKNOWN_TERM: &str = "unknown-term";
    pub const UNKNOWN_RULE: &str = "unknown-rule";
    pub const ANTECEDENT_NOT_INPUT: &str = "antecedent-not-input";
    pub const CONSEQUENT_NOT_OUTPUT: &str = "consequent-not-output";
    pub const UNCOVERED_TERM: &str = "uncovered-term";
    pub const DUPLICATE_RULE: &str = "duplicate-rule";
    pub const CONTRADICTION: &str = "contradiction";
}
