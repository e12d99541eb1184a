use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Sidecar metadata stored next to a knowledge-base document.
///
/// ```text
/// revision = 3
/// sha256 = 9f86d0...
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KbMeta {
    pub revision: u64,
    /// Hex SHA-256 of the document bytes.
    pub sha256: String,
}

impl KbMeta {
    pub fn for_document(revision: u64, document: &[u8]) -> Self {
        Self {
            revision,
            sha256: digest(document),
        }
    }

    pub fn matches(&self, document: &[u8]) -> bool {
        self.sha256 == digest(document)
    }
}

pub(crate) fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl fmt::Display for KbMeta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "revision = {}", self.revision)?;
        writeln!(f, "sha256 = {}", self.sha256)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetaError {
    #[error("line {0}: expected `key = value`")]
    Malformed(usize),
    #[error("bad revision `{0}`")]
    BadRevision(String),
    #[error("missing `{0}`")]
    Missing(&'static str),
}

impl FromStr for KbMeta {
    type Err = MetaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut revision = None;
        let mut sha256 = None;
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(MetaError::Malformed(i + 1))?;
            match key.trim() {
                "revision" => {
                    let v = value.trim();
                    revision = Some(v.parse().map_err(|_| MetaError::BadRevision(v.into()))?);
                }
                "sha256" => sha256 = Some(value.trim().to_string()),
                // unknown keys are tolerated for forward compatibility
                _ => {}
            }
        }
        Ok(KbMeta {
            revision: revision.ok_or(MetaError::Missing("revision"))?,
            sha256: sha256.ok_or(MetaError::Missing("sha256"))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let meta = KbMeta::for_document(7, b"variable");
        let parsed: KbMeta = meta.to_string().parse().unwrap();
        assert_eq!(parsed, meta);
        assert!(parsed.matches(b"variable"));
        assert!(!parsed.matches(b"variable "));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!("revision 3".parse::<KbMeta>(), Err(MetaError::Malformed(1)));
        assert!("revision = x\nsha256 = ab".parse::<KbMeta>().is_err());
        assert_eq!(
            "sha256 = ab".parse::<KbMeta>(),
            Err(MetaError::Missing("revision"))
        );
    }
}
