use std::fmt::Write;

use super::diagnostic::Location;
use super::rule::Rule;
use crate::fuzzy::{LinguisticVariable, MembershipFunction};
use crate::kb::{KnowledgeBase, SourceMap};

/// Canonical rule text: `IF (v1 is t1) and (v2 is t2) THEN vo is to;`
pub fn render(rule: &Rule) -> String {
    rule.to_string()
}

pub fn render_variable(variable: &LinguisticVariable) -> String {
    let mut out = String::new();
    write_variable(&mut out, variable);
    out
}

/// Canonical document: variable blocks in declaration order, a blank line,
/// then one rule per line. Comments are not preserved.
pub fn render_kb(kb: &KnowledgeBase) -> String {
    render_document(kb.variables(), kb.rules()).0
}

pub(crate) fn render_document(
    variables: &[LinguisticVariable],
    rules: &[Rule],
) -> (String, SourceMap) {
    let mut out = String::new();
    let mut map = SourceMap::default();
    let mut line = 1u32;
    for (i, var) in variables.iter().enumerate() {
        if i > 0 {
            out.push('\n');
            line += 1;
        }
        map.variables.push(Location::new(line, 1));
        write_variable(&mut out, var);
        line += var.terms().len() as u32 + 2;
    }
    if !variables.is_empty() && !rules.is_empty() {
        out.push('\n');
        line += 1;
    }
    for rule in rules {
        map.rules.push(Location::new(line, 1));
        let _ = writeln!(out, "{rule}");
        line += 1;
    }
    (out, map)
}

fn write_variable(out: &mut String, var: &LinguisticVariable) {
    let u = var.universe();
    let _ = writeln!(
        out,
        "variable {} {} range {} {} {{",
        var.name(),
        var.role(),
        u.lo(),
        u.hi()
    );
    for term in var.terms() {
        let _ = write!(out, "  term {} ", term.name);
        match &term.mf {
            MembershipFunction::Triangular { a, b, c } => {
                let _ = writeln!(out, "tri {a} {b} {c}");
            }
            MembershipFunction::Trapezoidal { a, b, c, d } => {
                let _ = writeln!(out, "trap {a} {b} {c} {d}");
            }
            MembershipFunction::PiecewiseLinear { points } => {
                out.push_str("points");
                for (x, mu) in points {
                    let _ = write!(out, " ({x},{mu})");
                }
                out.push('\n');
            }
        }
    }
    out.push_str("}\n");
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::lang::{parse_kb, parse_rule, parse_variable};

    #[test]
    fn render_is_a_fixpoint() {
        let src = "if (A is B)   AND (c is D) then E is f";
        let once = render(&parse_rule(src).unwrap());
        let twice = render(&parse_rule(&once).unwrap());
        assert_eq!(once, "IF (a is b) and (c is d) THEN e is f;");
        assert_eq!(once, twice);
    }

    #[test]
    fn document_round_trip() {
        let kb = parse_kb(fixture::SPEECH_THERAPY_KB).unwrap();
        let doc = render_kb(&kb);
        let again = parse_kb(&doc).unwrap();
        assert_eq!(kb, again);
        assert_eq!(render_kb(&again), doc);
        assert!(doc.starts_with(
            "variable speech_problems_level input range 0 3 {\n  term low tri 0 1 2\n"
        ));
    }

    #[test]
    fn canonical_source_map_matches_reparse() {
        let kb = parse_kb(fixture::SPEECH_THERAPY_KB).unwrap();
        let (doc, map) = render_document(kb.variables(), kb.rules());
        let reparsed = parse_kb(&doc).unwrap();
        assert_eq!(&map, reparsed.source_map());
    }

    #[test]
    fn variable_round_trip_with_points() {
        let src = "variable v output range -1 1.5 {\n  term a points (-1,0) (0,1) (1.5,0.25)\n  term b trap -1 -1 0 0.5\n}\n";
        let var = parse_variable(src).unwrap();
        assert_eq!(render_variable(&var), src);
    }
}
