//! Knowledge bases: variables plus rules at a revision, their on-disk
//! layout, revision-checked edits and the therapist override log.

mod edit;
mod meta;
mod overrides;
mod store;

pub use edit::{apply_edit, Edit, EditError, EditKind, EditOutcome};
pub use meta::{KbMeta, MetaError};
pub use overrides::{check_override, OverrideError, OverrideLink, OverrideLog, OverrideRecord};
pub use store::{load, save, KbStore, LoadError, StoreError, KB_FILE, META_FILE, OVERRIDES_FILE};

use crate::fuzzy::{LinguisticVariable, VariableRole};
use crate::lang::{render_document, render_kb, Location, Rule, RuleId};

/// Where each item of a knowledge base starts in its source document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceMap {
    pub variables: Vec<Location>,
    pub rules: Vec<Location>,
}

/// Linguistic variables and rules at a revision.
///
/// Rule ids are positional: the `i`-th rule is `r{i+1}`.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    variables: Vec<LinguisticVariable>,
    rules: Vec<Rule>,
    revision: u64,
    source: SourceMap,
}

impl PartialEq for KnowledgeBase {
    fn eq(&self, other: &Self) -> bool {
        self.variables == other.variables
            && self.rules == other.rules
            && self.revision == other.revision
    }
}

impl KnowledgeBase {
    /// Revision-0 knowledge base; locations refer to its canonical rendering.
    pub fn new(variables: Vec<LinguisticVariable>, rules: Vec<Rule>) -> Self {
        let (_, source) = render_document(&variables, &rules);
        Self::from_parts(variables, rules, 0, source)
    }

    pub(crate) fn from_parts(
        variables: Vec<LinguisticVariable>,
        rules: Vec<Rule>,
        revision: u64,
        source: SourceMap,
    ) -> Self {
        Self {
            variables,
            rules,
            revision,
            source,
        }
    }

    pub fn with_revision(mut self, revision: u64) -> Self {
        self.revision = revision;
        self
    }

    pub fn variables(&self) -> &[LinguisticVariable] {
        &self.variables
    }

    pub fn variable(&self, name: &str) -> Option<&LinguisticVariable> {
        self.variables.iter().find(|v| v.name() == name)
    }

    pub fn inputs(&self) -> impl Iterator<Item = &LinguisticVariable> {
        self.variables
            .iter()
            .filter(|v| v.role() == VariableRole::Input)
    }

    pub fn outputs(&self) -> impl Iterator<Item = &LinguisticVariable> {
        self.variables
            .iter()
            .filter(|v| v.role() == VariableRole::Output)
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule(&self, id: RuleId) -> Option<&Rule> {
        if id.0 == 0 {
            return None;
        }
        self.rules.get(id.index())
    }

    pub fn rules_with_ids(&self) -> impl Iterator<Item = (RuleId, &Rule)> {
        self.rules
            .iter()
            .enumerate()
            .map(|(i, r)| (RuleId::from_index(i), r))
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn source_map(&self) -> &SourceMap {
        &self.source
    }

    pub fn rule_location(&self, index: usize) -> Location {
        self.source
            .rules
            .get(index)
            .copied()
            .unwrap_or(Location::START)
    }

    pub fn variable_location(&self, index: usize) -> Location {
        self.source
            .variables
            .get(index)
            .copied()
            .unwrap_or(Location::START)
    }

    /// Canonical document text.
    pub fn to_document(&self) -> String {
        render_kb(self)
    }
}
