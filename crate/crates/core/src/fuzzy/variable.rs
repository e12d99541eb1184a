use std::fmt;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{FuzzyError, MembershipFunction, UniverseInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariableRole {
    Input,
    Output,
}

impl fmt::Display for VariableRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VariableRole::Input => "input",
            VariableRole::Output => "output",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticTerm {
    pub name: String,
    pub mf: MembershipFunction,
}

impl LinguisticTerm {
    pub fn new(name: impl Into<String>, mf: MembershipFunction) -> Self {
        Self {
            name: name.into(),
            mf,
        }
    }
}

/// A named quantity over a universe, described by at least two terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinguisticVariable {
    name: String,
    role: VariableRole,
    universe: UniverseInterval,
    terms: Vec<LinguisticTerm>,
}

impl LinguisticVariable {
    pub fn new(
        name: impl Into<String>,
        role: VariableRole,
        universe: UniverseInterval,
        terms: Vec<LinguisticTerm>,
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        if terms.len() < 2 {
            return Err(FuzzyError::TooFewTerms { variable: name });
        }
        for (i, term) in terms.iter().enumerate() {
            if terms[..i].iter().any(|t| t.name == term.name) {
                return Err(FuzzyError::DuplicateTerm {
                    variable: name,
                    term: term.name.clone(),
                });
            }
            term.mf.check()?;
            let (lo, hi) = term.mf.support();
            if lo < universe.lo() || hi > universe.hi() {
                return Err(FuzzyError::SupportOutsideUniverse {
                    variable: name,
                    term: term.name.clone(),
                    lo: universe.lo(),
                    hi: universe.hi(),
                });
            }
        }
        Ok(Self {
            name,
            role,
            universe,
            terms,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn role(&self) -> VariableRole {
        self.role
    }

    pub fn universe(&self) -> UniverseInterval {
        self.universe
    }

    pub fn terms(&self) -> &[LinguisticTerm] {
        &self.terms
    }

    pub fn term(&self, name: &str) -> Option<&LinguisticTerm> {
        self.terms.iter().find(|t| t.name == name)
    }

    pub fn has_term(&self, name: &str) -> bool {
        self.term(name).is_some()
    }

    /// Copy with the universe and every term moved right by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self, FuzzyError> {
        let universe =
            UniverseInterval::new(self.universe.lo() + delta, self.universe.hi() + delta)?;
        let terms = self
            .terms
            .iter()
            .map(|t| LinguisticTerm::new(t.name.clone(), t.mf.shifted(delta)))
            .collect();
        Self::new(self.name.clone(), self.role, universe, terms)
    }
}

/// Degrees of one crisp value against every term of its variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzifiedValue {
    pub variable: String,
    pub crisp: f64,
    pub degrees: IndexMap<String, f64>,
}

impl FuzzifiedValue {
    /// Builds a value from externally supplied degrees, e.g. a degree table
    /// recorded by a therapist. Terms are reordered to match the variable.
    pub fn from_degrees(
        variable: &LinguisticVariable,
        crisp: f64,
        degrees: &[(&str, f64)],
    ) -> Result<Self, FuzzyError> {
        for &(term, mu) in degrees {
            if !variable.has_term(term) {
                return Err(FuzzyError::UnknownTerm {
                    variable: variable.name.clone(),
                    term: term.to_string(),
                });
            }
            if !(0.0..=1.0).contains(&mu) {
                return Err(FuzzyError::DegreeOutOfRange {
                    variable: variable.name.clone(),
                    term: term.to_string(),
                    degree: mu,
                });
            }
        }
        let mut out = IndexMap::with_capacity(variable.terms.len());
        for term in &variable.terms {
            let found = degrees.iter().rfind(|(t, _)| *t == term.name);
            match found {
                Some(&(_, mu)) => {
                    out.insert(term.name.clone(), mu);
                }
                None => {
                    return Err(FuzzyError::MissingDegree {
                        variable: variable.name.clone(),
                        term: term.name.clone(),
                    })
                }
            }
        }
        Ok(Self {
            variable: variable.name.clone(),
            crisp,
            degrees: out,
        })
    }

    pub fn degree(&self, term: &str) -> Option<f64> {
        self.degrees.get(term).copied()
    }
}

/// `name (1.62) = {"low"/0.38, "normal"/0.62, "high"/0.00}`
impl fmt::Display for FuzzifiedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:.2}) = {{", self.variable, self.crisp)?;
        for (i, (term, mu)) in self.degrees.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "\"{term}\"/{mu:.2}")?;
        }
        f.write_str("}")
    }
}

pub fn format_fuzzified(fv: &FuzzifiedValue) -> String {
    fv.to_string()
}

/// Degree of `x` in every term of `variable`, in declaration order.
pub fn fuzzify(variable: &LinguisticVariable, x: f64) -> Result<FuzzifiedValue, FuzzyError> {
    if !x.is_finite() || !variable.universe.contains(x) {
        return Err(FuzzyError::OutOfUniverse {
            variable: variable.name.clone(),
            value: x,
            lo: variable.universe.lo(),
            hi: variable.universe.hi(),
        });
    }
    let degrees = variable
        .terms
        .iter()
        .map(|t| (t.name.clone(), t.mf.degree(x)))
        .collect();
    Ok(FuzzifiedValue {
        variable: variable.name.clone(),
        crisp: x,
        degrees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri(a: f64, b: f64, c: f64) -> MembershipFunction {
        MembershipFunction::triangular(a, b, c).unwrap()
    }

    fn var(
        name: &str,
        lo: f64,
        hi: f64,
        terms: &[(&str, MembershipFunction)],
    ) -> LinguisticVariable {
        LinguisticVariable::new(
            name,
            VariableRole::Input,
            UniverseInterval::new(lo, hi).unwrap(),
            terms
                .iter()
                .map(|(n, mf)| LinguisticTerm::new(*n, mf.clone()))
                .collect(),
        )
        .unwrap()
    }

    fn child_age() -> LinguisticVariable {
        var(
            "children_age",
            3.0,
            7.0,
            &[
                ("small", tri(3.0, 3.0, 5.0)),
                ("medium", tri(4.0, 5.0, 6.0)),
                ("big", tri(5.0, 7.0, 7.0)),
            ],
        )
    }

    #[test]
    fn fuzzify_child_age() {
        let fv = fuzzify(&child_age(), 4.5).unwrap();
        let got: Vec<_> = fv.degrees.iter().map(|(t, d)| (t.as_str(), *d)).collect();
        assert_eq!(got, vec![("small", 0.25), ("medium", 0.5), ("big", 0.0)]);
        assert_eq!(
            fv.to_string(),
            r#"children_age (4.50) = {"small"/0.25, "medium"/0.50, "big"/0.00}"#
        );
    }

    #[test]
    fn fuzzify_family_implication() {
        let family = var(
            "family_implication",
            0.0,
            4.0,
            &[
                ("reduce", tri(0.0, 1.0, 2.0)),
                ("moderate", tri(1.0, 2.0, 3.0)),
                ("high", tri(2.0, 3.0, 4.0)),
            ],
        );
        let fv = fuzzify(&family, 2.0).unwrap();
        assert_eq!(fv.degree("reduce"), Some(0.0));
        assert_eq!(fv.degree("moderate"), Some(1.0));
        assert_eq!(fv.degree("high"), Some(0.0));
        assert_eq!(
            format_fuzzified(&fv),
            r#"family_implication (2.00) = {"reduce"/0.00, "moderate"/1.00, "high"/0.00}"#
        );
    }

    #[test]
    fn left_shoulder_at_universe_bound() {
        let v = var(
            "v",
            0.0,
            10.0,
            &[
                (
                    "low",
                    MembershipFunction::trapezoidal(0.0, 0.0, 2.0, 5.0).unwrap(),
                ),
                ("high", tri(4.0, 10.0, 10.0)),
            ],
        );
        assert_eq!(fuzzify(&v, 0.0).unwrap().degree("low"), Some(1.0));
    }

    #[test]
    fn out_of_universe_names_the_variable() {
        let err = fuzzify(&child_age(), 9.0).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("children_age"), "{msg}");
        assert!(msg.contains("[3, 7]"), "{msg}");
        assert!(fuzzify(&child_age(), f64::NAN).is_err());
    }

    #[test]
    fn single_zero_term_formats() {
        let mut degrees = IndexMap::new();
        degrees.insert("t".to_string(), 0.0);
        let fv = FuzzifiedValue {
            variable: "v".into(),
            crisp: 0.0,
            degrees,
        };
        assert_eq!(fv.to_string(), r#"v (0.00) = {"t"/0.00}"#);
    }

    #[test]
    fn variable_invariants() {
        let u = UniverseInterval::new(0.0, 4.0).unwrap();
        let one = vec![LinguisticTerm::new("a", tri(0.0, 1.0, 2.0))];
        assert!(matches!(
            LinguisticVariable::new("v", VariableRole::Input, u, one),
            Err(FuzzyError::TooFewTerms { .. })
        ));
        let dup = vec![
            LinguisticTerm::new("a", tri(0.0, 1.0, 2.0)),
            LinguisticTerm::new("a", tri(1.0, 2.0, 3.0)),
        ];
        assert!(matches!(
            LinguisticVariable::new("v", VariableRole::Input, u, dup),
            Err(FuzzyError::DuplicateTerm { .. })
        ));
        let wide = vec![
            LinguisticTerm::new("a", tri(0.0, 1.0, 2.0)),
            LinguisticTerm::new("b", tri(1.0, 2.0, 5.0)),
        ];
        assert!(matches!(
            LinguisticVariable::new("v", VariableRole::Input, u, wide),
            Err(FuzzyError::SupportOutsideUniverse { .. })
        ));
    }

    #[test]
    fn injected_degrees_follow_declaration_order() {
        let age = child_age();
        let fv = FuzzifiedValue::from_degrees(
            &age,
            4.5,
            &[("big", 0.0), ("small", 0.25), ("medium", 0.5)],
        )
        .unwrap();
        let order: Vec<_> = fv.degrees.keys().cloned().collect();
        assert_eq!(order, ["small", "medium", "big"]);
        assert!(FuzzifiedValue::from_degrees(&age, 4.5, &[("small", 0.25)]).is_err());
        assert!(FuzzifiedValue::from_degrees(&age, 4.5, &[("tiny", 0.25)]).is_err());
    }
}
