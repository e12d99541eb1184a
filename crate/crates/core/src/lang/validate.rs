use std::collections::HashMap;

use super::diagnostic::{codes, Diagnostic};
use super::rule::{Clause, RuleId};
use crate::fuzzy::VariableRole;
use crate::kb::KnowledgeBase;

/// Cross-checks rules against the declared variables.
///
/// Errors: unknown variables or terms, antecedents on output variables,
/// consequents on input variables, duplicate variable names, and rules with
/// identical antecedents but different conclusions. Warnings: output terms
/// no rule concludes, and exact duplicate rules.
pub fn validate(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    for (i, var) in kb.variables().iter().enumerate() {
        if kb.variables()[..i].iter().any(|v| v.name() == var.name()) {
            out.push(Diagnostic::error(
                kb.variable_location(i),
                codes::DUP_VARIABLE,
                format!("variable `{}` is declared twice", var.name()),
            ));
        }
    }

    let mut seen: HashMap<(Vec<&Clause>, &str), (RuleId, &str)> = HashMap::new();
    for (i, rule) in kb.rules().iter().enumerate() {
        let id = RuleId::from_index(i);
        let loc = kb.rule_location(i);
        let mut check = |clause: &Clause, want: VariableRole| {
            let Some(var) = kb.variable(&clause.variable) else {
                out.push(Diagnostic::error(
                    loc,
                    codes::UNKNOWN_VARIABLE,
                    format!("{id}: unknown variable `{}`", clause.variable),
                ));
                return;
            };
            if !var.has_term(&clause.term) {
                out.push(Diagnostic::error(
                    loc,
                    codes::UNKNOWN_TERM,
                    format!(
                        "{id}: variable `{}` has no term `{}`",
                        clause.variable, clause.term
                    ),
                ));
            }
            if var.role() != want {
                let (code, what) = match want {
                    VariableRole::Input => (codes::ANTECEDENT_NOT_INPUT, "condition on"),
                    VariableRole::Output => (codes::CONSEQUENT_NOT_OUTPUT, "conclude"),
                };
                out.push(Diagnostic::error(
                    loc,
                    code,
                    format!(
                        "{id}: cannot {what} {} variable `{}`",
                        var.role(),
                        clause.variable
                    ),
                ));
            }
        };
        for clause in rule.antecedents() {
            check(clause, VariableRole::Input);
        }
        check(rule.consequent(), VariableRole::Output);

        let key = (rule.antecedent_key(), rule.consequent().variable.as_str());
        match seen.get(&key) {
            Some(&(first, term)) if term == rule.consequent().term => {
                out.push(Diagnostic::warning(
                    loc,
                    codes::DUPLICATE_RULE,
                    format!("{id} duplicates {first}"),
                ));
            }
            Some(&(first, term)) => {
                out.push(Diagnostic::error(
                    loc,
                    codes::CONTRADICTION,
                    format!(
                        "{id} concludes `{} is {}` but {first} concludes `{} is {term}` from the same conditions",
                        rule.consequent().variable,
                        rule.consequent().term,
                        rule.consequent().variable,
                    ),
                ));
            }
            None => {
                seen.insert(key, (id, rule.consequent().term.as_str()));
            }
        }
    }

    for (i, var) in kb.variables().iter().enumerate() {
        if var.role() != VariableRole::Output {
            continue;
        }
        for term in var.terms() {
            let covered = kb
                .rules()
                .iter()
                .any(|r| r.consequent().variable == var.name() && r.consequent().term == term.name);
            if !covered {
                out.push(Diagnostic::warning(
                    kb.variable_location(i),
                    codes::UNCOVERED_TERM,
                    format!("no rule concludes `{} is {}`", var.name(), term.name),
                ));
            }
        }
    }
    out
}
