use std::fmt::Write;

use super::ConsultationResult;
use crate::fuzzy::AggregatedOutputSet;

/// Multi-line report of every inference stage:
///
/// ```text
/// family_implication (2.00) = {"reduce"/0.00, "moderate"/1.00, "high"/0.00}
/// r2: min(0.38, 0.25, 1.00) = 0.25 -> low
/// low = max(0.25, 0.38) = 0.38
/// output = 1.56
/// 1 to 2 sessions per week (2 preferred)
/// ```
pub fn render_trace(result: &ConsultationResult) -> String {
    let mut out = String::new();
    for fv in &result.fuzzified {
        let _ = writeln!(out, "{fv}");
    }
    for firing in &result.firings {
        let degrees: Vec<String> = firing
            .clause_degrees
            .iter()
            .map(|c| format!("{:.2}", c.degree))
            .collect();
        let _ = writeln!(
            out,
            "{}: min({}) = {:.2} -> {}",
            firing.rule_id,
            degrees.join(", "),
            firing.alpha,
            firing.consequent.term
        );
    }
    write_aggregate(&mut out, result, &result.aggregate, None);
    for other in &result.other_outputs {
        write_aggregate(
            &mut out,
            result,
            &other.aggregate,
            Some(&other.aggregate.variable),
        );
    }
    out.push_str(&render_summary(result));
    out
}

/// Crisp output and recommendation only.
pub fn render_summary(result: &ConsultationResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "output = {:.2}", result.crisp_output);
    for other in &result.other_outputs {
        let _ = writeln!(
            out,
            "output {} = {:.2}",
            other.aggregate.variable, other.crisp_output
        );
    }
    if let Some(rec) = &result.recommendation {
        let _ = writeln!(out, "{}", rec.note);
    }
    out
}

fn write_aggregate(
    out: &mut String,
    result: &ConsultationResult,
    set: &AggregatedOutputSet,
    prefix: Option<&str>,
) {
    for (term, alpha) in &set.term_alphas {
        let contributions: Vec<String> = result
            .firings
            .iter()
            .filter(|f| f.consequent.variable == set.variable && &f.consequent.term == term)
            .map(|f| format!("{:.2}", f.alpha))
            .collect();
        let label = match prefix {
            Some(var) => format!("{var}.{term}"),
            None => term.clone(),
        };
        if contributions.is_empty() {
            let _ = writeln!(out, "{label} = {alpha:.2} (no rule)");
        } else {
            let _ = writeln!(
                out,
                "{label} = max({}) = {alpha:.2}",
                contributions.join(", ")
            );
        }
    }
}
