//! Append-only JSON-lines files for consultations and children.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JournalError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

/// Records of one kind, held in memory and mirrored to an optional file.
#[derive(Debug)]
pub(crate) struct Journal<T> {
    path: Option<PathBuf>,
    file: Option<File>,
    records: Vec<T>,
}

impl<T: Serialize + DeserializeOwned> Journal<T> {
    pub(crate) fn in_memory() -> Self {
        Self {
            path: None,
            file: None,
            records: Vec::new(),
        }
    }

    pub(crate) fn open(path: &Path) -> Result<Self, JournalError> {
        let io_err = |source| JournalError::Io {
            path: path.to_path_buf(),
            source,
        };
        let text = match fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) if e.kind() == io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(io_err(e)),
        };
        let mut records = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            records.push(
                serde_json::from_str(line).map_err(|source| JournalError::Corrupt {
                    path: path.to_path_buf(),
                    line: i + 1,
                    source,
                })?,
            );
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err)?;
        Ok(Self {
            path: Some(path.to_path_buf()),
            file: Some(file),
            records,
        })
    }

    pub(crate) fn records(&self) -> &[T] {
        &self.records
    }

    /// Writes `record` to disk, then makes it visible.
    pub(crate) fn append(&mut self, record: T) -> Result<&T, JournalError> {
        if let Some(file) = self.file.as_mut() {
            let mut line = serde_json::to_string(&record).expect("records serialize");
            line.push('\n');
            file.write_all(line.as_bytes())
                .and_then(|_| file.flush())
                .map_err(|source| JournalError::Io {
                    path: self.path.clone().unwrap_or_default(),
                    source,
                })?;
        }
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }
}
