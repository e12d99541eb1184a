//! HTTP service for consultations, knowledge-base management, therapist
//! overrides and child records.
//!
//! | method | path | body | success |
//! |---|---|---|---|
//! | POST | `/consult` | `{inputs, child_id?, resolution?}` | 201 stored consultation |
//! | GET | `/consultations/{id}` | | stored consultation |
//! | GET | `/kb` | | `{document, revision}` |
//! | PUT | `/kb` | `{document, expected_revision}` | `{revision, warnings}` |
//! | POST | `/kb/edits` | an [`Edit`](fuzzyshell::Edit) | `{revision, warnings}` |
//! | GET | `/kb/variables` | | universes and term geometry |
//! | POST | `/overrides` | `{consultation_id, therapist_value, note}` | 201 override record |
//! | GET | `/overrides?child_id=` | | override records |
//! | POST | `/children` | `{display_label, age_years}` | 201 child record |
//! | GET | `/children`, `/children/{id}` | | child records |
//! | GET | `/children/{id}/consultations` | | that child's consultations |
//!
//! Errors carry `{code, message, diagnostics?}`; see [`error::codes`].
//! A stale `expected_revision` yields 409 with `current_revision`, and a
//! consultation in which no rule fires yields 422 `no-rule-fired`.

pub mod error;
mod http;
mod journal;
mod model;

pub use error::{ErrorBody, ServiceError};
pub use http::{router, serve, shutdown_signal};
pub use journal::JournalError;
pub use model::{
    ChildRecord, ChildRequest, Config, ConsultRequest, KbAccepted, KbDocument, KbPutRequest,
    KbVariables, OpenError, OverrideRequest, SharedService, StoredConsultation, TermView,
    TherapyService, VariableView, AGE_RANGE, CHILDREN_FILE, CONSULTATIONS_FILE,
};
