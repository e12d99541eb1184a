use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("`{0}` is not a valid identifier")]
    InvalidIdentifier(String),
    #[error("a rule needs at least one antecedent")]
    NoAntecedents,
    #[error("variable `{0}` appears twice in the antecedents")]
    DuplicateAntecedent(String),
}

/// True for `[a-z][a-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

/// `variable is term`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clause {
    pub variable: String,
    pub term: String,
}

impl Clause {
    /// Identifiers are case-folded before checking.
    pub fn new(variable: &str, term: &str) -> Result<Self, RuleError> {
        let variable = variable.to_ascii_lowercase();
        let term = term.to_ascii_lowercase();
        for id in [&variable, &term] {
            if !is_identifier(id) {
                return Err(RuleError::InvalidIdentifier(id.clone()));
            }
        }
        Ok(Self { variable, term })
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} is {}", self.variable, self.term)
    }
}

/// A conjunctive rule: `IF (v1 is t1) and ... THEN out is t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rule {
    antecedents: Vec<Clause>,
    consequent: Clause,
}

impl Rule {
    pub fn new(antecedents: Vec<Clause>, consequent: Clause) -> Result<Self, RuleError> {
        if antecedents.is_empty() {
            return Err(RuleError::NoAntecedents);
        }
        for (i, clause) in antecedents.iter().enumerate() {
            if antecedents[..i]
                .iter()
                .any(|c| c.variable == clause.variable)
            {
                return Err(RuleError::DuplicateAntecedent(clause.variable.clone()));
            }
        }
        Ok(Self {
            antecedents,
            consequent,
        })
    }

    pub fn antecedents(&self) -> &[Clause] {
        &self.antecedents
    }

    pub fn consequent(&self) -> &Clause {
        &self.consequent
    }

    /// Antecedents sorted by variable; two rules with equal keys fire
    /// identically.
    pub(crate) fn antecedent_key(&self) -> Vec<&Clause> {
        let mut key: Vec<&Clause> = self.antecedents.iter().collect();
        key.sort();
        key
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IF ")?;
        for (i, clause) in self.antecedents.iter().enumerate() {
            if i > 0 {
                f.write_str(" and ")?;
            }
            write!(f, "({clause})")?;
        }
        write!(f, " THEN {};", self.consequent)
    }
}

/// Position-derived rule id, `r1` for the first rule of a knowledge base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u32);

impl RuleId {
    pub fn from_index(index: usize) -> Self {
        RuleId(index as u32 + 1)
    }

    pub fn index(self) -> usize {
        self.0.saturating_sub(1) as usize
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("`{0}` is not a rule id (expected r1, r2, ...)")]
pub struct ParseRuleIdError(String);

impl FromStr for RuleId {
    type Err = ParseRuleIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('r')
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&n| n > 0)
            .map(RuleId)
            .ok_or_else(|| ParseRuleIdError(s.to_string()))
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RuleId {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
