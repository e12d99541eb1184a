use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use parking_lot::{Mutex, RwLock};
use thiserror::Error;

use super::edit::{apply_edit, Edit, EditError, EditOutcome};
use super::meta::{KbMeta, MetaError};
use super::KnowledgeBase;
use crate::lang::{codes, has_errors, parse_kb, validate, Diagnostic, Location};

pub const KB_FILE: &str = "kb.fkb";
pub const META_FILE: &str = "kb.meta";
pub const OVERRIDES_FILE: &str = "overrides.log";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("knowledge base has {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Invalid(Vec<Diagnostic>),
}

impl LoadError {
    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            LoadError::Invalid(d) => d,
        }
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Meta {
        path: PathBuf,
        #[source]
        source: MetaError,
    },
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Edit(#[from] EditError),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Parses and validates a stored document.
///
/// The revision comes from `meta` when its checksum matches. A document
/// changed behind the sidecar's back counts as one more edit; without a
/// sidecar the revision is 0. Any error aborts the load.
pub fn load(document: &[u8], meta: Option<&KbMeta>) -> Result<KnowledgeBase, LoadError> {
    let text = std::str::from_utf8(document).map_err(|e| {
        LoadError::Invalid(vec![Diagnostic::error(
            Location::START,
            codes::SYNTAX,
            format!("document is not valid UTF-8: {e}"),
        )])
    })?;
    let kb = parse_kb(text).map_err(LoadError::Invalid)?;
    let diagnostics = validate(&kb);
    if has_errors(&diagnostics) {
        return Err(LoadError::Invalid(diagnostics));
    }
    let revision = match meta {
        Some(meta) if meta.matches(document) => meta.revision,
        Some(meta) => {
            tracing::warn!(
                revision = meta.revision,
                "knowledge base changed outside the store; counting it as a new revision"
            );
            meta.revision + 1
        }
        None => 0,
    };
    Ok(kb.with_revision(revision))
}

/// Canonical document bytes and the matching sidecar.
pub fn save(kb: &KnowledgeBase) -> (String, KbMeta) {
    let document = kb.to_document();
    let meta = KbMeta::for_document(kb.revision(), document.as_bytes());
    (document, meta)
}

/// The authoritative knowledge base of a service instance.
///
/// Readers take cheap [`Arc`] snapshots; writers go through a single gate,
/// so accepted revisions form a gap-free sequence. When backed by a
/// directory, an edit is written to disk before it becomes visible.
#[derive(Debug)]
pub struct KbStore {
    dir: Option<PathBuf>,
    current: RwLock<Arc<KnowledgeBase>>,
    writer: Mutex<()>,
}

impl KbStore {
    pub fn in_memory(kb: KnowledgeBase) -> Self {
        Self {
            dir: None,
            current: RwLock::new(Arc::new(kb)),
            writer: Mutex::new(()),
        }
    }

    /// Opens the store in `dir`, which must hold `kb.fkb`.
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        let kb_path = dir.join(KB_FILE);
        let document = fs::read(&kb_path).map_err(io_err(&kb_path))?;
        let meta_path = dir.join(META_FILE);
        let meta = match fs::read_to_string(&meta_path) {
            Ok(text) => Some(text.parse::<KbMeta>().map_err(|source| StoreError::Meta {
                path: meta_path.clone(),
                source,
            })?),
            Err(e) if e.kind() == io::ErrorKind::NotFound => None,
            Err(e) => return Err(io_err(&meta_path)(e)),
        };
        let kb = load(&document, meta.as_ref())?;
        let store = Self {
            dir: Some(dir),
            current: RwLock::new(Arc::new(kb)),
            writer: Mutex::new(()),
        };
        if meta.as_ref().is_none_or(|m| !m.matches(&document)) {
            store.persist(&store.snapshot())?;
        }
        Ok(store)
    }

    /// Opens `dir`, seeding it with `seed` when it has no knowledge base yet.
    pub fn open_or_init(dir: impl Into<PathBuf>, seed: Option<&str>) -> Result<Self, StoreError> {
        let dir = dir.into();
        if !dir.join(KB_FILE).exists() {
            if let Some(seed) = seed {
                let kb = load(seed.as_bytes(), None)?;
                fs::create_dir_all(&dir).map_err(io_err(&dir))?;
                let store = Self {
                    dir: Some(dir),
                    current: RwLock::new(Arc::new(kb)),
                    writer: Mutex::new(()),
                };
                store.persist(&store.snapshot())?;
                return Ok(store);
            }
        }
        Self::open(dir)
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// The current knowledge base. Later edits do not affect it.
    pub fn snapshot(&self) -> Arc<KnowledgeBase> {
        self.current.read().clone()
    }

    pub fn revision(&self) -> u64 {
        self.current.read().revision()
    }

    /// Applies `edit` if it targets the current revision and validates.
    pub fn apply(&self, edit: &Edit) -> Result<EditOutcome, StoreError> {
        let _gate = self.writer.lock();
        let base = self.snapshot();
        let outcome = apply_edit(&base, edit)?;
        self.persist(&outcome.kb)?;
        *self.current.write() = Arc::new(outcome.kb.clone());
        tracing::info!(
            revision = outcome.kb.revision(),
            "knowledge base edit accepted"
        );
        Ok(outcome)
    }

    fn persist(&self, kb: &KnowledgeBase) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let (document, meta) = save(kb);
        // document first: a crash in between leaves a checksum mismatch,
        // which `load` resolves to the same next revision
        write_atomic(&dir.join(KB_FILE), document.as_bytes())?;
        write_atomic(&dir.join(META_FILE), meta.to_string().as_bytes())?;
        Ok(())
    }
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let tmp = path.with_extension("tmp");
    let mut file = fs::File::create(&tmp).map_err(io_err(&tmp))?;
    file.write_all(bytes).map_err(io_err(&tmp))?;
    file.sync_all().map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}
