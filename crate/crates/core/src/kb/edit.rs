use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::KnowledgeBase;
use crate::lang::{
    codes, has_errors, parse_kb, parse_rule, parse_variable, render_document, validate, Diagnostic,
    Location, RuleId,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EditKind {
    /// Replace everything with a new document.
    ReplaceDocument {
        document: String,
    },
    /// Replace rule `id`, or append when `id` is absent.
    UpsertRule {
        #[serde(default)]
        id: Option<RuleId>,
        rule: String,
    },
    DeleteRule {
        id: RuleId,
    },
    /// Replace the variable with the block's name, or append it.
    UpsertVariable {
        block: String,
    },
}

/// An edit guarded by the revision it was prepared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edit {
    #[serde(flatten)]
    pub kind: EditKind,
    pub expected_revision: u64,
}

impl Edit {
    pub fn new(kind: EditKind, expected_revision: u64) -> Self {
        Self {
            kind,
            expected_revision,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EditOutcome {
    pub kb: KnowledgeBase,
    /// Validation warnings of the accepted knowledge base.
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EditError {
    #[error("stale revision: edit expected {expected}, knowledge base is at {current}")]
    Conflict { expected: u64, current: u64 },
    #[error("edit rejected with {} error(s)", .0.iter().filter(|d| d.is_error()).count())]
    Rejected(Vec<Diagnostic>),
}

/// Applies `edit` to a copy of `kb`.
///
/// The edit is accepted only when it was prepared against `kb`'s revision
/// and the result validates without errors; the new knowledge base then
/// sits at the next revision. `kb` itself is never modified.
pub fn apply_edit(kb: &KnowledgeBase, edit: &Edit) -> Result<EditOutcome, EditError> {
    if edit.expected_revision != kb.revision() {
        return Err(EditError::Conflict {
            expected: edit.expected_revision,
            current: kb.revision(),
        });
    }
    let (variables, rules) = match &edit.kind {
        EditKind::ReplaceDocument { document } => {
            let parsed = parse_kb(document).map_err(EditError::Rejected)?;
            // report against the submitted text before canonicalizing
            let diagnostics = validate(&parsed);
            if has_errors(&diagnostics) {
                return Err(EditError::Rejected(diagnostics));
            }
            (parsed.variables, parsed.rules)
        }
        EditKind::UpsertRule { id, rule } => {
            let rule = parse_rule(rule).map_err(EditError::Rejected)?;
            let mut rules = kb.rules.clone();
            match id {
                Some(id) => {
                    let slot = rules
                        .get_mut(id.index())
                        .filter(|_| id.0 > 0)
                        .ok_or_else(|| unknown_rule(*id))?;
                    *slot = rule;
                }
                None => rules.push(rule),
            }
            (kb.variables.clone(), rules)
        }
        EditKind::DeleteRule { id } => {
            if kb.rule(*id).is_none() {
                return Err(unknown_rule(*id));
            }
            let mut rules = kb.rules.clone();
            rules.remove(id.index());
            (kb.variables.clone(), rules)
        }
        EditKind::UpsertVariable { block } => {
            let var = parse_variable(block).map_err(EditError::Rejected)?;
            let mut variables = kb.variables.clone();
            match variables.iter_mut().find(|v| v.name() == var.name()) {
                Some(slot) => *slot = var,
                None => variables.push(var),
            }
            (variables, kb.rules.clone())
        }
    };

    let (document, _) = render_document(&variables, &rules);
    let candidate = parse_kb(&document).map_err(EditError::Rejected)?;
    let diagnostics = validate(&candidate);
    if has_errors(&diagnostics) {
        return Err(EditError::Rejected(diagnostics));
    }
    Ok(EditOutcome {
        kb: candidate.with_revision(kb.revision() + 1),
        warnings: diagnostics,
    })
}

fn unknown_rule(id: RuleId) -> EditError {
    EditError::Rejected(vec![Diagnostic::error(
        Location::START,
        codes::UNKNOWN_RULE,
        format!("there is no rule {id}"),
    )])
}
