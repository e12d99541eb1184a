use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use fuzzyshell::engine::ConsultError;
use fuzzyshell::kb::{OverrideError, StoreError};
use fuzzyshell::{Diagnostic, EditError, FuzzyError};
use serde::{Deserialize, Serialize};

/// Stable machine-readable error codes.
pub mod codes {
    pub const INVALID_REQUEST: &str = "invalid-request";
    pub const MISSING_INPUTS: &str = "missing-inputs";
    pub const OUT_OF_UNIVERSE: &str = "out-of-universe";
    pub const NO_RULE_FIRED: &str = "no-rule-fired";
    pub const INVALID_KB: &str = "invalid-kb";
    pub const CONFLICT: &str = "conflict";
    pub const NOT_FOUND: &str = "not-found";
    pub const INVALID_OVERRIDE: &str = "invalid-override";
    pub const INVALID_CHILD: &str = "invalid-child";
    pub const STORAGE: &str = "storage";
}

/// JSON error body: `{code, message, diagnostics?}` plus optional details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Vec<Diagnostic>>,
    /// Input variables that were required but not supplied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing: Option<Vec<String>>,
    /// The variable an input error refers to.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variable: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_revision: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ServiceError {
    pub status: StatusCode,
    pub body: Box<ErrorBody>,
}

impl ServiceError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: Box::new(ErrorBody {
                code: code.to_string(),
                message: message.into(),
                diagnostics: None,
                missing: None,
                variable: None,
                current_revision: None,
            }),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, codes::INVALID_REQUEST, message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, codes::NOT_FOUND, message)
    }

    pub fn storage(message: impl std::fmt::Display) -> Self {
        tracing::error!(%message, "storage failure");
        Self::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            codes::STORAGE,
            message.to_string(),
        )
    }

    pub fn code(&self) -> &str {
        &self.body.code
    }

    fn with_diagnostics(mut self, diagnostics: Vec<Diagnostic>) -> Self {
        self.body.diagnostics = Some(diagnostics);
        self
    }
}

impl std::fmt::Display for ServiceError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} ({}): {}",
            self.status, self.body.code, self.body.message
        )
    }
}

impl std::error::Error for ServiceError {}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        (self.status, Json(*self.body)).into_response()
    }
}

impl From<ConsultError> for ServiceError {
    fn from(err: ConsultError) -> Self {
        let message = err.to_string();
        let unprocessable = StatusCode::UNPROCESSABLE_ENTITY;
        if err.is_no_rule_fired() {
            return Self::new(unprocessable, codes::NO_RULE_FIRED, message);
        }
        match err {
            ConsultError::InvalidKnowledgeBase(d) => {
                Self::new(unprocessable, codes::INVALID_KB, message).with_diagnostics(d)
            }
            ConsultError::MissingInputs(names) => {
                let mut e = Self::new(unprocessable, codes::MISSING_INPUTS, message);
                e.body.missing = Some(names);
                e
            }
            ConsultError::Fuzzy(FuzzyError::OutOfUniverse { variable, .. }) => {
                let mut e = Self::new(unprocessable, codes::OUT_OF_UNIVERSE, message);
                e.body.variable = Some(variable);
                e
            }
            ConsultError::Fuzzy(FuzzyError::InvalidResolution(_)) => Self::bad_request(message),
            _ => Self::new(unprocessable, codes::INVALID_REQUEST, message),
        }
    }
}

impl From<EditError> for ServiceError {
    fn from(err: EditError) -> Self {
        let message = err.to_string();
        match err {
            EditError::Conflict { current, .. } => {
                let mut e = Self::new(StatusCode::CONFLICT, codes::CONFLICT, message);
                e.body.current_revision = Some(current);
                e
            }
            EditError::Rejected(d) => {
                Self::new(StatusCode::UNPROCESSABLE_ENTITY, codes::INVALID_KB, message)
                    .with_diagnostics(d)
            }
        }
    }
}

impl From<StoreError> for ServiceError {
    fn from(err: StoreError) -> Self {
        match err {
            StoreError::Edit(e) => e.into(),
            StoreError::Load(e) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                codes::INVALID_KB,
                e.to_string(),
            )
            .with_diagnostics(e.diagnostics().to_vec()),
            other => Self::storage(other),
        }
    }
}

impl From<OverrideError> for ServiceError {
    fn from(err: OverrideError) -> Self {
        match err {
            OverrideError::NotFinite(_) | OverrideError::NoDisagreement(_) => Self::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                codes::INVALID_OVERRIDE,
                err.to_string(),
            ),
            other => Self::storage(other),
        }
    }
}
