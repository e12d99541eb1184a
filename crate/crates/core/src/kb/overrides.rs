//! Append-only log of therapist overrides.
//!
//! Each record is one line of tab-separated fields:
//!
//! ```text
//! id  created_at  kb_revision  consultation_id  child_id  therapist_value  note  snapshot
//! ```
//!
//! `consultation_id` and `child_id` are `-` when absent, `note` is escaped
//! text and `snapshot` is the escaped JSON of the consultation result.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
use parking_lot::Mutex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::ConsultationResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideRecord {
    pub id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consultation_id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub child_id: Option<u64>,
    pub consultation_snapshot: ConsultationResult,
    pub therapist_value: f64,
    pub note: String,
    pub created_at: DateTime<Utc>,
    pub kb_revision_at_override: u64,
}

/// Identifiers tying an override to stored records.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OverrideLink {
    pub consultation_id: Option<u64>,
    pub child_id: Option<u64>,
}

#[derive(Debug, Error)]
pub enum OverrideError {
    #[error("therapist value must be finite, got {0}")]
    NotFinite(f64),
    #[error("override repeats the system value {0} without a note")]
    NoDisagreement(f64),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

/// An override must disagree with the system or carry a note.
pub fn check_override(
    result: &ConsultationResult,
    therapist_value: f64,
    note: &str,
) -> Result<(), OverrideError> {
    if !therapist_value.is_finite() {
        return Err(OverrideError::NotFinite(therapist_value));
    }
    if therapist_value == result.crisp_output && note.trim().is_empty() {
        return Err(OverrideError::NoDisagreement(therapist_value));
    }
    Ok(())
}

#[derive(Debug)]
pub struct OverrideLog {
    path: Option<PathBuf>,
    inner: Mutex<Inner>,
}

#[derive(Debug)]
struct Inner {
    records: Vec<OverrideRecord>,
    file: Option<File>,
}

impl OverrideLog {
    pub fn in_memory() -> Self {
        Self {
            path: None,
            inner: Mutex::new(Inner {
                records: Vec::new(),
                file: None,
            }),
        }
    }

    /// Opens (creating if needed) the log at `path` and reads existing
    /// records.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, OverrideError> {
        let path = path.into();
        let io_err = |source| OverrideError::Io {
            path: path.clone(),
            source,
        };
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(io_err(e)),
        };
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let record = decode_line(line).map_err(|message| OverrideError::Corrupt {
                path: path.clone(),
                line: i + 1,
                message,
            })?;
            records.push(record);
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(io_err)?;
        Ok(Self {
            path: Some(path),
            inner: Mutex::new(Inner {
                records,
                file: Some(file),
            }),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Checks and appends an override of `result`.
    pub fn record(
        &self,
        result: &ConsultationResult,
        therapist_value: f64,
        note: &str,
        link: OverrideLink,
    ) -> Result<OverrideRecord, OverrideError> {
        check_override(result, therapist_value, note)?;
        let mut inner = self.inner.lock();
        let record = OverrideRecord {
            id: inner.records.last().map_or(1, |r| r.id + 1),
            consultation_id: link.consultation_id,
            child_id: link.child_id,
            consultation_snapshot: result.clone(),
            therapist_value,
            note: note.to_string(),
            created_at: Utc::now().trunc_subsecs(6),
            kb_revision_at_override: result.kb_revision,
        };
        if let Some(file) = inner.file.as_mut() {
            let mut line = encode_line(&record);
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|source| OverrideError::Io {
                    path: self.path.clone().unwrap_or_default(),
                    source,
                })?;
        }
        inner.records.push(record.clone());
        Ok(record)
    }

    /// All records in creation order.
    pub fn list(&self) -> Vec<OverrideRecord> {
        self.inner.lock().records.clone()
    }

    pub fn len(&self) -> usize {
        self.inner.lock().records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(text: &str) -> Result<String, String> {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(format!("bad escape `\\{}`", other.unwrap_or(' '))),
        }
    }
    Ok(out)
}

fn opt(value: Option<u64>) -> String {
    value.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn encode_line(r: &OverrideRecord) -> String {
    let snapshot = serde_json::to_string(&r.consultation_snapshot).unwrap_or_default();
    [
        r.id.to_string(),
        r.created_at.to_rfc3339_opts(SecondsFormat::Micros, true),
        r.kb_revision_at_override.to_string(),
        opt(r.consultation_id),
        opt(r.child_id),
        format!("{:?}", r.therapist_value),
        escape(&r.note),
        escape(&snapshot),
    ]
    .join("\t")
}

fn decode_line(line: &str) -> Result<OverrideRecord, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [id, created_at, revision, consultation, child, value, note, snapshot] = fields[..] else {
        return Err(format!("expected 8 fields, found {}", fields.len()));
    };
    let num = |s: &str, what: &str| s.parse::<u64>().map_err(|e| format!("{what}: {e}"));
    let opt_num = |s: &str, what: &str| {
        if s == "-" {
            Ok(None)
        } else {
            num(s, what).map(Some)
        }
    };
    Ok(OverrideRecord {
        id: num(id, "id")?,
        created_at: DateTime::parse_from_rfc3339(created_at)
            .map_err(|e| format!("created_at: {e}"))?
            .with_timezone(&Utc),
        kb_revision_at_override: num(revision, "kb_revision")?,
        consultation_id: opt_num(consultation, "consultation_id")?,
        child_id: opt_num(child, "child_id")?,
        therapist_value: value.parse().map_err(|e| format!("therapist_value: {e}"))?,
        note: unescape(note)?,
        consultation_snapshot: serde_json::from_str(&unescape(snapshot)?)
            .map_err(|e| format!("snapshot: {e}"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Engine;
    use crate::fixture;

    fn consultation() -> ConsultationResult {
        let kb = fixture::speech_therapy_kb();
        Engine::new(&kb)
            .unwrap()
            .infer(&fixture::example_inputs())
            .unwrap()
    }

    #[test]
    fn disagreement_is_required() {
        let mut result = consultation();
        result.crisp_output = 2.0;
        let log = OverrideLog::in_memory();
        assert!(matches!(
            log.record(&result, 2.0, "", OverrideLink::default()),
            Err(OverrideError::NoDisagreement(_))
        ));
        assert!(log
            .record(
                &result,
                2.0,
                "agree, but watch family",
                OverrideLink::default()
            )
            .is_ok());
        assert!(log
            .record(&result, f64::NAN, "x", OverrideLink::default())
            .is_err());
        assert_eq!(log.len(), 1);
    }

    #[test]
    fn persisted_in_insertion_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("overrides.log");
        let result = consultation();
        let log = OverrideLog::open(&path).unwrap();
        let first = log
            .record(
                &result,
                3.0,
                "severe case, family absent\tsee\\notes\nline two",
                OverrideLink {
                    consultation_id: Some(7),
                    child_id: None,
                },
            )
            .unwrap();
        for i in 0..99 {
            log.record(&result, i as f64 * 0.01, "", OverrideLink::default())
                .unwrap();
        }
        drop(log);

        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 100);

        let reopened = OverrideLog::open(&path).unwrap();
        let records = reopened.list();
        assert_eq!(records.len(), 100);
        assert_eq!(records[0], first);
        assert!(records.windows(2).all(|w| w[0].id + 1 == w[1].id));
        assert_eq!(records[0].kb_revision_at_override, 0);
        let next = reopened
            .record(&result, 4.0, "", OverrideLink::default())
            .unwrap();
        assert_eq!(next.id, 101);
    }

    #[test]
    fn corrupt_line_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("overrides.log");
        fs::write(&path, "1\tnot-a-date\n").unwrap();
        assert!(matches!(
            OverrideLog::open(&path),
            Err(OverrideError::Corrupt { line: 1, .. })
        ));
    }

    #[test]
    fn escaping_round_trips() {
        for s in ["", "plain", "tab\there", "a\\b", "\\t literal", "\r\n"] {
            assert_eq!(unescape(&escape(s)).unwrap(), s);
            assert!(!escape(s).contains('\t'));
        }
    }
}
