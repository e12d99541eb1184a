//! Reference knowledge bases: the speech-therapy session planner and a
//! generator for large synthetic rule bases.

use std::fmt::Write;

use crate::engine::Inputs;
use crate::fuzzy::{FuzzifiedValue, FuzzyError};
use crate::kb::KnowledgeBase;
use crate::lang::parse_kb;

/// Four variables, five rules.
pub const SPEECH_THERAPY_KB: &str = include_str!("../fixtures/speech_therapy.fkb");

/// The five planner rules as written in the fixture.
pub const EXAMPLE_RULES: [&str; 5] = [
    "IF (speech_problems_level is high) and (child_age is medium) and (family_implication is reduce) THEN weekly_session_number is high",
    "IF (speech_problems_level is low) and (child_age is small) and (family_implication is moderate) THEN weekly_session_number is low",
    "IF (speech_problems_level is low) and (child_age is medium) and (family_implication is moderate) THEN weekly_session_number is low",
    "IF (speech_problems_level is normal) and (child_age is small) and (family_implication is moderate) THEN weekly_session_number is normal",
    "IF (speech_problems_level is normal) and (child_age is medium) and (family_implication is moderate) THEN weekly_session_number is normal",
];

pub fn speech_therapy_kb() -> KnowledgeBase {
    parse_kb(SPEECH_THERAPY_KB).expect("fixture knowledge base parses")
}

/// Level 1.62, family implication 2.00, age 4.50.
pub fn example_inputs() -> Inputs {
    [
        ("speech_problems_level".to_string(), 1.62),
        ("family_implication".to_string(), 2.00),
        ("child_age".to_string(), 4.50),
    ]
    .into()
}

/// Variable, crisp value and term degrees.
type DegreeRow = (&'static str, f64, [(&'static str, f64); 3]);

/// Recorded degree table for [`example_inputs`], injected as-is in place of
/// fuzzification.
pub fn recorded_degrees(kb: &KnowledgeBase) -> Result<Vec<FuzzifiedValue>, FuzzyError> {
    let table: [DegreeRow; 3] = [
        (
            "speech_problems_level",
            1.62,
            [("low", 0.37), ("normal", 0.62), ("high", 0.0)],
        ),
        (
            "family_implication",
            2.00,
            [("reduce", 0.0), ("moderate", 1.0), ("high", 0.0)],
        ),
        (
            "child_age",
            4.50,
            [("small", 0.25), ("medium", 0.5), ("big", 0.0)],
        ),
    ];
    table
        .iter()
        .map(|(name, crisp, degrees)| {
            let var = kb.variable(name).ok_or_else(|| FuzzyError::UnknownTerm {
                variable: name.to_string(),
                term: String::new(),
            })?;
            FuzzifiedValue::from_degrees(var, *crisp, degrees)
        })
        .collect()
}

const SYNTH_INPUTS: usize = 4;
const SYNTH_TERMS: usize = 5;
/// Multiplier coprime to `SYNTH_TERMS^SYNTH_INPUTS`, so rule `i` gets a
/// distinct antecedent combination for every `i` below that bound.
const SYNTH_STRIDE: usize = 7919;

/// Largest rule count [`synthetic_kb_document`] can produce.
pub const SYNTH_MAX_RULES: usize = SYNTH_TERMS.pow(SYNTH_INPUTS as u32);

/// A valid document with four inputs `f1..f4` over `[0, 10]`, one output
/// `plan`, five overlapping triangular terms each, and `rules` four-clause
/// rules with pairwise distinct antecedents.
///
/// # Panics
/// If `rules` exceeds [`SYNTH_MAX_RULES`].
pub fn synthetic_kb_document(rules: usize) -> String {
    assert!(rules <= SYNTH_MAX_RULES, "at most {SYNTH_MAX_RULES} rules");
    let terms = |out: &mut String| {
        for k in 0..SYNTH_TERMS {
            let center = 2.5 * k as f64;
            let a = (center - 5.0).max(0.0);
            let c = (center + 5.0).min(10.0);
            let _ = writeln!(out, "  term t{} tri {a} {center} {c}", k + 1);
        }
    };
    let mut doc = String::from("# generated\n");
    for v in 1..=SYNTH_INPUTS {
        let _ = writeln!(doc, "variable f{v} input range 0 10 {{");
        terms(&mut doc);
        doc.push_str("}\n");
    }
    doc.push_str("variable plan output range 0 10 {\n");
    terms(&mut doc);
    doc.push_str("}\n");
    for i in 0..rules {
        let mut code = (i * SYNTH_STRIDE) % SYNTH_MAX_RULES;
        let mut digits = [0usize; SYNTH_INPUTS];
        for d in digits.iter_mut() {
            *d = code % SYNTH_TERMS;
            code /= SYNTH_TERMS;
        }
        let clauses: Vec<String> = digits
            .iter()
            .enumerate()
            .map(|(v, d)| format!("(f{} is t{})", v + 1, d + 1))
            .collect();
        let conclusion = (digits.iter().sum::<usize>() + i) % SYNTH_TERMS + 1;
        let _ = writeln!(
            doc,
            "IF {} THEN plan is t{conclusion};",
            clauses.join(" and ")
        );
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_rule, validate};

    #[test]
    fn example_rules_match_fixture_rules() {
        let kb = speech_therapy_kb();
        for (src, rule) in EXAMPLE_RULES.iter().zip(kb.rules()) {
            assert_eq!(&parse_rule(src).unwrap(), rule);
        }
    }

    #[test]
    fn synthetic_documents_are_clean() {
        for n in [1, 150, SYNTH_MAX_RULES] {
            let kb = parse_kb(&synthetic_kb_document(n)).unwrap();
            assert_eq!(kb.rules().len(), n);
            let diags = validate(&kb);
            assert!(diags.iter().all(|d| !d.is_error()), "{diags:?}");
            if n >= 150 {
                assert!(diags.is_empty(), "{diags:?}");
            }
        }
    }

    #[test]
    fn degree_table_uses_declared_terms() {
        let kb = speech_therapy_kb();
        let table = recorded_degrees(&kb).unwrap();
        assert_eq!(table.len(), 3);
        assert_eq!(table[0].degree("low"), Some(0.37));
    }
}
