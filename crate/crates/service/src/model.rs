use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::http::StatusCode;
use chrono::{DateTime, SubsecRound, Utc};
use fuzzyshell::fuzzy::DEFAULT_RESOLUTION;
use fuzzyshell::kb::{EditOutcome, OverrideLink, OverrideLog, OverrideRecord, OVERRIDES_FILE};
use fuzzyshell::{
    fixture, ConsultationResult, Diagnostic, Edit, EditKind, Engine, Inputs, KbStore,
    KnowledgeBase, LinguisticVariable, MembershipFunction, UniverseInterval, VariableRole,
};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};

use crate::error::{codes, ServiceError};
use crate::journal::{Journal, JournalError};

pub const CONSULTATIONS_FILE: &str = "consultations.jsonl";
pub const CHILDREN_FILE: &str = "children.jsonl";

/// Youngest and oldest accepted child age in years.
pub const AGE_RANGE: (f64, f64) = (3.0, 8.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub listen: SocketAddr,
    /// Knowledge base used to seed an empty data directory.
    pub kb_path: Option<PathBuf>,
    /// Where the knowledge base, consultations, children and overrides
    /// live. Everything is kept in memory when absent.
    pub data_dir: Option<PathBuf>,
    pub default_resolution: usize,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            kb_path: None,
            data_dir: None,
            default_resolution: DEFAULT_RESOLUTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsultRequest {
    pub inputs: Inputs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child_id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredConsultation {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child_id: Option<u64>,
    pub result: ConsultationResult,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbDocument {
    pub document: String,
    pub revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbPutRequest {
    pub document: String,
    pub expected_revision: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbAccepted {
    pub revision: u64,
    pub warnings: Vec<Diagnostic>,
}

/// Geometry of one term, enough to plot it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermView {
    pub name: String,
    pub mf: MembershipFunction,
    pub vertices: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableView {
    pub name: String,
    pub role: VariableRole,
    pub universe: UniverseInterval,
    pub terms: Vec<TermView>,
}

impl From<&LinguisticVariable> for VariableView {
    fn from(v: &LinguisticVariable) -> Self {
        Self {
            name: v.name().to_string(),
            role: v.role(),
            universe: v.universe(),
            terms: v
                .terms()
                .iter()
                .map(|t| TermView {
                    name: t.name.clone(),
                    mf: t.mf.clone(),
                    vertices: t.mf.vertices(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbVariables {
    pub revision: u64,
    pub variables: Vec<VariableView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideRequest {
    pub consultation_id: u64,
    pub therapist_value: f64,
    #[serde(default)]
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildRequest {
    pub display_label: String,
    pub age_years: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildRecord {
    pub id: u64,
    /// Pseudonymous label; never a real name.
    pub display_label: String,
    pub age_years: f64,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug)]
struct Records {
    consultations: Journal<StoredConsultation>,
    children: Journal<ChildRecord>,
}

/// Transport-independent service state and operations.
#[derive(Debug)]
pub struct TherapyService {
    kb: KbStore,
    overrides: OverrideLog,
    records: Mutex<Records>,
    default_resolution: usize,
}

fn journal_err(err: JournalError) -> ServiceError {
    ServiceError::storage(err)
}

impl TherapyService {
    /// Service over `kb` with nothing persisted.
    pub fn in_memory(kb: KnowledgeBase, default_resolution: usize) -> Self {
        Self {
            kb: KbStore::in_memory(kb),
            overrides: OverrideLog::in_memory(),
            records: Mutex::new(Records {
                consultations: Journal::in_memory(),
                children: Journal::in_memory(),
            }),
            default_resolution,
        }
    }

    /// Opens the service described by `config`.
    ///
    /// An existing knowledge base in the data directory wins over
    /// `kb_path`, which only seeds a fresh directory. Without either, the
    /// built-in speech-therapy knowledge base is used.
    pub fn open(config: &Config) -> Result<Self, OpenError> {
        if config.default_resolution < 2 {
            return Err(OpenError::Resolution(config.default_resolution));
        }
        let seed = match &config.kb_path {
            Some(path) => std::fs::read_to_string(path).map_err(|source| OpenError::Read {
                path: path.clone(),
                source,
            })?,
            None => fixture::SPEECH_THERAPY_KB.to_string(),
        };
        let Some(dir) = &config.data_dir else {
            let kb = fuzzyshell::kb::load(seed.as_bytes(), None)?;
            return Ok(Self::in_memory(kb, config.default_resolution));
        };
        let kb = KbStore::open_or_init(dir, Some(&seed))?;
        Ok(Self {
            kb,
            overrides: OverrideLog::open(dir.join(OVERRIDES_FILE))?,
            records: Mutex::new(Records {
                consultations: Journal::open(&dir.join(CONSULTATIONS_FILE))?,
                children: Journal::open(&dir.join(CHILDREN_FILE))?,
            }),
            default_resolution: config.default_resolution,
        })
    }

    pub fn kb_store(&self) -> &KbStore {
        &self.kb
    }

    pub fn default_resolution(&self) -> usize {
        self.default_resolution
    }

    /// Runs a consultation against the current snapshot and stores it.
    pub fn consult(&self, request: &ConsultRequest) -> Result<StoredConsultation, ServiceError> {
        if let Some(child) = request.child_id {
            self.child(child)?;
        }
        let kb = self.kb.snapshot();
        let engine = Engine::new(&kb)?
            .with_resolution(request.resolution.unwrap_or(self.default_resolution))?;
        let result = engine.infer(&request.inputs)?;
        let mut records = self.records.lock();
        let stored = StoredConsultation {
            id: records.consultations.records().len() as u64 + 1,
            child_id: request.child_id,
            result,
            created_at: Utc::now().trunc_subsecs(6),
        };
        let stored = records
            .consultations
            .append(stored)
            .map_err(journal_err)?
            .clone();
        tracing::info!(
            id = stored.id,
            revision = stored.result.kb_revision,
            output = stored.result.crisp_output,
            "consultation stored"
        );
        Ok(stored)
    }

    pub fn consultation(&self, id: u64) -> Result<StoredConsultation, ServiceError> {
        self.records
            .lock()
            .consultations
            .records()
            .iter()
            .find(|c| c.id == id)
            .cloned()
            .ok_or_else(|| ServiceError::not_found(format!("no consultation {id}")))
    }

    pub fn kb_document(&self) -> KbDocument {
        let kb = self.kb.snapshot();
        KbDocument {
            document: kb.to_document(),
            revision: kb.revision(),
        }
    }

    pub fn kb_variables(&self) -> KbVariables {
        let kb = self.kb.snapshot();
        KbVariables {
            revision: kb.revision(),
            variables: kb.variables().iter().map(VariableView::from).collect(),
        }
    }

    /// Replaces the whole document if `expected_revision` is current.
    pub fn put_kb(&self, request: &KbPutRequest) -> Result<KbAccepted, ServiceError> {
        self.edit_kb(&Edit::new(
            EditKind::ReplaceDocument {
                document: request.document.clone(),
            },
            request.expected_revision,
        ))
    }

    pub fn edit_kb(&self, edit: &Edit) -> Result<KbAccepted, ServiceError> {
        let EditOutcome { kb, warnings } = self.kb.apply(edit)?;
        Ok(KbAccepted {
            revision: kb.revision(),
            warnings,
        })
    }

    pub fn record_override(
        &self,
        request: &OverrideRequest,
    ) -> Result<OverrideRecord, ServiceError> {
        let consultation = self.consultation(request.consultation_id)?;
        let record = self.overrides.record(
            &consultation.result,
            request.therapist_value,
            &request.note,
            OverrideLink {
                consultation_id: Some(consultation.id),
                child_id: consultation.child_id,
            },
        )?;
        tracing::info!(
            id = record.id,
            consultation = consultation.id,
            "override recorded"
        );
        Ok(record)
    }

    /// Overrides in creation order, optionally for one child.
    pub fn overrides(&self, child_id: Option<u64>) -> Vec<OverrideRecord> {
        let mut all = self.overrides.list();
        if let Some(child) = child_id {
            all.retain(|r| r.child_id == Some(child));
        }
        all
    }

    pub fn create_child(&self, request: &ChildRequest) -> Result<ChildRecord, ServiceError> {
        let label = request.display_label.trim();
        let invalid = |message: String| {
            ServiceError::new(
                StatusCode::UNPROCESSABLE_ENTITY,
                codes::INVALID_CHILD,
                message,
            )
        };
        if label.is_empty() {
            return Err(invalid("display_label must not be empty".into()));
        }
        let (lo, hi) = AGE_RANGE;
        if !(lo..=hi).contains(&request.age_years) {
            return Err(invalid(format!(
                "age_years must lie in [{lo}, {hi}], got {}",
                request.age_years
            )));
        }
        let mut records = self.records.lock();
        let child = ChildRecord {
            id: records.children.records().len() as u64 + 1,
            display_label: label.to_string(),
            age_years: request.age_years,
            created_at: Utc::now().trunc_subsecs(6),
        };
        Ok(records.children.append(child).map_err(journal_err)?.clone())
    }

    pub fn children(&self) -> Vec<ChildRecord> {
        self.records.lock().children.records().to_vec()
    }

    pub fn child(&self, id: u64) -> Result<ChildRecord, ServiceError> {
        self.records
            .lock()
            .children
            .records()
            .iter()
            .find(|c| c.id == id)
            .cloned()
            .ok_or_else(|| ServiceError::not_found(format!("no child {id}")))
    }

    pub fn child_consultations(&self, id: u64) -> Result<Vec<StoredConsultation>, ServiceError> {
        self.child(id)?;
        Ok(self
            .records
            .lock()
            .consultations
            .records()
            .iter()
            .filter(|c| c.child_id == Some(id))
            .cloned()
            .collect())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OpenError {
    #[error("default resolution must be at least 2, got {0}")]
    Resolution(usize),
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Load(#[from] fuzzyshell::kb::LoadError),
    #[error(transparent)]
    Store(#[from] fuzzyshell::kb::StoreError),
    #[error(transparent)]
    Overrides(#[from] fuzzyshell::kb::OverrideError),
    #[error(transparent)]
    Journal(#[from] JournalError),
}

impl OpenError {
    /// Diagnostics when the knowledge base itself is invalid.
    pub fn diagnostics(&self) -> Option<&[Diagnostic]> {
        match self {
            OpenError::Load(e) | OpenError::Store(fuzzyshell::kb::StoreError::Load(e)) => {
                Some(e.diagnostics())
            }
            _ => None,
        }
    }
}

/// Shared handle used by the HTTP layer.
pub type SharedService = Arc<TherapyService>;
