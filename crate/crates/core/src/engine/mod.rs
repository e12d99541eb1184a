//! Mamdani inference over a knowledge base: fuzzify the inputs, fire every
//! rule with `min`, aggregate per output term with `max`, defuzzify by
//! centroid and read the result as a session plan.

mod batch;
mod sessions;
mod trace;

pub use sessions::{interpret_sessions, SessionError, SessionRecommendation};
pub use trace::{render_summary, render_trace};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{
    aggregate, defuzzify_centroid_with, fuzzify, AggregatedOutputSet, FuzzifiedValue, FuzzyError,
    VariableRole, DEFAULT_RESOLUTION,
};
use crate::kb::KnowledgeBase;
use crate::lang::{has_errors, validate, Clause, Diagnostic, Rule, RuleId};
use crate::par::Execution;

/// Crisp inputs keyed by variable name.
pub type Inputs = BTreeMap<String, f64>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConsultError {
    #[error("knowledge base has {} validation error(s)", .0.iter().filter(|d| d.is_error()).count())]
    InvalidKnowledgeBase(Vec<Diagnostic>),
    #[error("missing input(s): {}", .0.join(", "))]
    MissingInputs(Vec<String>),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
    #[error("{rule}: no fuzzified value for `{variable}`")]
    MissingFuzzified { rule: RuleId, variable: String },
    #[error("{rule}: `{variable}` has no degree for term `{term}`")]
    MissingTerm {
        rule: RuleId,
        variable: String,
        term: String,
    },
    #[error("no rule fired for output `{variable}`")]
    NoRuleFired { variable: String },
}

impl ConsultError {
    pub fn is_no_rule_fired(&self) -> bool {
        matches!(
            self,
            ConsultError::NoRuleFired { .. } | ConsultError::Fuzzy(FuzzyError::NoRuleFired { .. })
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClauseDegree {
    pub variable: String,
    pub term: String,
    pub degree: f64,
}

/// One rule evaluated against the fuzzified inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleFiring {
    pub rule_id: RuleId,
    pub clause_degrees: Vec<ClauseDegree>,
    /// Minimum of `clause_degrees`.
    pub alpha: f64,
    pub consequent: Clause,
}

/// Aggregate and crisp value for an output variable other than the primary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputConclusion {
    pub aggregate: AggregatedOutputSet,
    pub crisp_output: f64,
}

/// Full record of one consultation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsultationResult {
    pub kb_revision: u64,
    /// Inputs actually used, i.e. those referenced by some rule.
    pub inputs: Inputs,
    pub fuzzified: Vec<FuzzifiedValue>,
    pub firings: Vec<RuleFiring>,
    /// Aggregate of the primary output variable.
    pub aggregate: AggregatedOutputSet,
    pub crisp_output: f64,
    /// Present when the crisp output is a non-negative count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recommendation: Option<SessionRecommendation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub other_outputs: Vec<OutputConclusion>,
}

/// Lookup of fuzzified values by variable name.
pub trait FuzzifiedLookup {
    fn fuzzified(&self, variable: &str) -> Option<&FuzzifiedValue>;
}

impl FuzzifiedLookup for HashMap<String, FuzzifiedValue> {
    fn fuzzified(&self, variable: &str) -> Option<&FuzzifiedValue> {
        self.get(variable)
    }
}

impl FuzzifiedLookup for BTreeMap<String, FuzzifiedValue> {
    fn fuzzified(&self, variable: &str) -> Option<&FuzzifiedValue> {
        self.get(variable)
    }
}

impl FuzzifiedLookup for HashMap<&str, &FuzzifiedValue> {
    fn fuzzified(&self, variable: &str) -> Option<&FuzzifiedValue> {
        self.get(variable).copied()
    }
}

impl FuzzifiedLookup for [FuzzifiedValue] {
    fn fuzzified(&self, variable: &str) -> Option<&FuzzifiedValue> {
        self.iter().find(|f| f.variable == variable)
    }
}

/// Degree of every antecedent clause and their minimum.
pub fn firing_strength<L: FuzzifiedLookup + ?Sized>(
    rule_id: RuleId,
    rule: &Rule,
    fuzzified: &L,
) -> Result<RuleFiring, ConsultError> {
    let mut alpha = f64::INFINITY;
    let mut clause_degrees = Vec::with_capacity(rule.antecedents().len());
    for clause in rule.antecedents() {
        let fv = fuzzified.fuzzified(&clause.variable).ok_or_else(|| {
            ConsultError::MissingFuzzified {
                rule: rule_id,
                variable: clause.variable.clone(),
            }
        })?;
        let degree = fv
            .degree(&clause.term)
            .ok_or_else(|| ConsultError::MissingTerm {
                rule: rule_id,
                variable: clause.variable.clone(),
                term: clause.term.clone(),
            })?;
        alpha = alpha.min(degree);
        clause_degrees.push(ClauseDegree {
            variable: clause.variable.clone(),
            term: clause.term.clone(),
            degree,
        });
    }
    Ok(RuleFiring {
        rule_id,
        clause_degrees,
        alpha,
        consequent: rule.consequent().clone(),
    })
}

/// A validated knowledge base ready for consultations.
///
/// Construction validates once; each consultation is then a pure function
/// of the inputs, so one engine can serve any number of threads.
#[derive(Debug, Clone)]
pub struct Engine<'kb> {
    kb: &'kb KnowledgeBase,
    /// Declaration indices of input variables some rule conditions on.
    inputs: Vec<usize>,
    /// Declaration indices of output variables some rule concludes.
    outputs: Vec<usize>,
    resolution: usize,
}

impl<'kb> Engine<'kb> {
    pub fn new(kb: &'kb KnowledgeBase) -> Result<Self, ConsultError> {
        let diagnostics = validate(kb);
        if has_errors(&diagnostics) {
            return Err(ConsultError::InvalidKnowledgeBase(diagnostics));
        }
        let referenced = |idx: &usize| {
            let name = kb.variables()[*idx].name();
            kb.rules().iter().any(|r| {
                r.consequent().variable == name
                    || r.antecedents().iter().any(|c| c.variable == name)
            })
        };
        let by_role = |role| {
            (0..kb.variables().len())
                .filter(|&i| kb.variables()[i].role() == role)
                .filter(referenced)
                .collect::<Vec<_>>()
        };
        Ok(Self {
            kb,
            inputs: by_role(VariableRole::Input),
            outputs: by_role(VariableRole::Output),
            resolution: DEFAULT_RESOLUTION,
        })
    }

    /// Centroid sample count used by [`Engine::infer`].
    pub fn with_resolution(mut self, resolution: usize) -> Result<Self, ConsultError> {
        if resolution < 2 {
            return Err(FuzzyError::InvalidResolution(resolution).into());
        }
        self.resolution = resolution;
        Ok(self)
    }

    pub fn knowledge_base(&self) -> &'kb KnowledgeBase {
        self.kb
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Input variables a consultation must supply, in declaration order.
    pub fn required_inputs(&self) -> impl Iterator<Item = &'kb str> + '_ {
        self.inputs.iter().map(|&i| self.kb.variables()[i].name())
    }

    /// Runs a consultation from crisp inputs. Inputs naming variables no
    /// rule uses are ignored.
    pub fn infer(&self, inputs: &Inputs) -> Result<ConsultationResult, ConsultError> {
        let missing: Vec<String> = self
            .required_inputs()
            .filter(|name| !inputs.contains_key(*name))
            .map(str::to_string)
            .collect();
        if !missing.is_empty() {
            return Err(ConsultError::MissingInputs(missing));
        }
        let fuzzified = self
            .inputs
            .iter()
            .map(|&i| {
                let var = &self.kb.variables()[i];
                fuzzify(var, inputs[var.name()])
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.infer_fuzzified(fuzzified)
    }

    /// Runs a consultation from already fuzzified inputs, bypassing the
    /// membership functions of the input variables.
    pub fn infer_fuzzified(
        &self,
        fuzzified: Vec<FuzzifiedValue>,
    ) -> Result<ConsultationResult, ConsultError> {
        let mut by_name: HashMap<&str, FuzzifiedValue> = HashMap::new();
        for fv in fuzzified {
            let name = self.required_inputs().find(|n| *n == fv.variable);
            if let Some(name) = name {
                by_name.insert(name, fv);
            }
        }
        let missing: Vec<String> = self
            .required_inputs()
            .filter(|n| !by_name.contains_key(n))
            .map(str::to_string)
            .collect();
        if !missing.is_empty() {
            return Err(ConsultError::MissingInputs(missing));
        }
        let lookup: HashMap<&str, &FuzzifiedValue> = by_name.iter().map(|(k, v)| (*k, v)).collect();

        let firings = self
            .kb
            .rules_with_ids()
            .map(|(id, rule)| firing_strength(id, rule, &lookup))
            .collect::<Result<Vec<_>, _>>()?;

        let mut conclusions = Vec::with_capacity(self.outputs.len());
        for &i in &self.outputs {
            let var = &self.kb.variables()[i];
            let contributions = firings
                .iter()
                .filter(|f| f.consequent.variable == var.name())
                .map(|f| (f.consequent.term.as_str(), f.alpha));
            let set = aggregate(contributions, var)?;
            let crisp = defuzzify_centroid_with(&set, var, self.resolution, Execution::Sequential)
                .map_err(|err| match err {
                    FuzzyError::NoRuleFired { variable } => ConsultError::NoRuleFired { variable },
                    other => other.into(),
                })?;
            conclusions.push(OutputConclusion {
                aggregate: set,
                crisp_output: crisp,
            });
        }
        if conclusions.is_empty() {
            let variable = self
                .kb
                .variables()
                .iter()
                .find(|v| v.role() == VariableRole::Output)
                .map_or_else(String::new, |v| v.name().to_string());
            return Err(ConsultError::NoRuleFired { variable });
        }
        let primary = conclusions.remove(0);

        let fuzzified: Vec<FuzzifiedValue> = self
            .required_inputs()
            .filter_map(|n| by_name.remove(n))
            .collect();
        let inputs = fuzzified
            .iter()
            .map(|f| (f.variable.clone(), f.crisp))
            .collect();
        Ok(ConsultationResult {
            kb_revision: self.kb.revision(),
            inputs,
            fuzzified,
            firings,
            recommendation: interpret_sessions(primary.crisp_output).ok(),
            aggregate: primary.aggregate,
            crisp_output: primary.crisp_output,
            other_outputs: conclusions,
        })
    }

    /// One consultation per input set, in order, spread over threads when
    /// `execution` allows.
    pub fn infer_batch(
        &self,
        batch: &[Inputs],
        execution: Execution,
    ) -> Vec<Result<ConsultationResult, ConsultError>> {
        batch::run(self, batch, execution)
    }
}

/// One-shot consultation against `kb`.
pub fn infer(
    kb: &KnowledgeBase,
    inputs: &Inputs,
    resolution: usize,
) -> Result<ConsultationResult, ConsultError> {
    Engine::new(kb)?.with_resolution(resolution)?.infer(inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture;
    use crate::lang::parse_rule;

    fn fv(var: &str, degrees: &[(&str, f64)]) -> FuzzifiedValue {
        FuzzifiedValue {
            variable: var.into(),
            crisp: 0.0,
            degrees: degrees.iter().map(|(t, d)| (t.to_string(), *d)).collect(),
        }
    }

    #[test]
    fn firing_strength_is_min() {
        let table: HashMap<String, FuzzifiedValue> = [
            fv(
                "speech_problems_level",
                &[("low", 0.37), ("normal", 0.62), ("high", 0.0)],
            ),
            fv(
                "family_implication",
                &[("reduce", 0.0), ("moderate", 1.0), ("high", 0.0)],
            ),
            fv(
                "child_age",
                &[("small", 0.25), ("medium", 0.5), ("big", 0.0)],
            ),
        ]
        .into_iter()
        .map(|f| (f.variable.clone(), f))
        .collect();

        let rule1 = parse_rule(fixture::EXAMPLE_RULES[0]).unwrap();
        let firing = firing_strength(RuleId(1), &rule1, &table).unwrap();
        assert_eq!(firing.alpha, 0.0);
        let degrees: Vec<f64> = firing.clause_degrees.iter().map(|c| c.degree).collect();
        assert_eq!(degrees, [0.0, 0.5, 0.0]);

        let rule3 = parse_rule(fixture::EXAMPLE_RULES[2]).unwrap();
        assert_eq!(
            firing_strength(RuleId(3), &rule3, &table).unwrap().alpha,
            0.37
        );

        let single =
            parse_rule("IF (child_age is medium) THEN weekly_session_number is low").unwrap();
        assert_eq!(
            firing_strength(RuleId(9), &single, &table).unwrap().alpha,
            0.5
        );
    }

    #[test]
    fn firing_strength_names_missing_clause() {
        let table: HashMap<String, FuzzifiedValue> = HashMap::new();
        let rule = parse_rule("IF (mood is sad) THEN y is b").unwrap();
        let err = firing_strength(RuleId(4), &rule, &table).unwrap_err();
        assert_eq!(err.to_string(), "r4: no fuzzified value for `mood`");
    }

    #[test]
    fn missing_and_out_of_range_inputs() {
        let kb = fixture::speech_therapy_kb();
        let engine = Engine::new(&kb).unwrap();
        let mut inputs = fixture::example_inputs();
        inputs.remove("child_age");
        let err = engine.infer(&inputs).unwrap_err();
        assert_eq!(err, ConsultError::MissingInputs(vec!["child_age".into()]));

        let mut inputs = fixture::example_inputs();
        inputs.insert("child_age".into(), 9.0);
        assert!(matches!(
            engine.infer(&inputs),
            Err(ConsultError::Fuzzy(FuzzyError::OutOfUniverse { .. }))
        ));
    }

    #[test]
    fn no_rule_fired() {
        let kb = fixture::speech_therapy_kb();
        let engine = Engine::new(&kb).unwrap();
        // high family implication matches no rule's antecedents
        let inputs: Inputs = [
            ("speech_problems_level".to_string(), 1.5),
            ("family_implication".to_string(), 3.0),
            ("child_age".to_string(), 4.5),
        ]
        .into();
        let err = engine.infer(&inputs).unwrap_err();
        assert!(err.is_no_rule_fired(), "{err:?}");
    }

    #[test]
    fn invalid_kb_is_refused() {
        let doc = format!(
            "{}IF (speech_problems_level is low) and (child_age is small) and (family_implication is moderate) THEN weekly_session_number is high;\n",
            fixture::SPEECH_THERAPY_KB
        );
        let kb = crate::lang::parse_kb(&doc).unwrap();
        assert!(matches!(
            Engine::new(&kb),
            Err(ConsultError::InvalidKnowledgeBase(_))
        ));
    }

    #[test]
    fn resolution_is_checked() {
        let kb = fixture::speech_therapy_kb();
        assert!(infer(&kb, &fixture::example_inputs(), 1).is_err());
    }
}
