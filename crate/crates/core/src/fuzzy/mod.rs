//! Membership functions, fuzzification, max-aggregation and centroid
//! defuzzification.

mod aggregate;
mod membership;
mod variable;

pub use aggregate::{
    aggregate, defuzzify_centroid, defuzzify_centroid_with, AggregatedOutputSet, DEFAULT_RESOLUTION,
};
pub use membership::{membership_degree, MembershipFunction, UniverseInterval};
pub use variable::{
    format_fuzzified, fuzzify, FuzzifiedValue, LinguisticTerm, LinguisticVariable, VariableRole,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("invalid universe [{lo}, {hi}]: need finite lo < hi")]
    InvalidUniverse { lo: f64, hi: f64 },
    #[error("invalid membership function: {0}")]
    InvalidShape(String),
    #[error("variable `{variable}` needs at least two terms")]
    TooFewTerms { variable: String },
    #[error("variable `{variable}` declares term `{term}` twice")]
    DuplicateTerm { variable: String, term: String },
    #[error("term `{term}` of `{variable}` extends outside the universe [{lo}, {hi}]")]
    SupportOutsideUniverse {
        variable: String,
        term: String,
        lo: f64,
        hi: f64,
    },
    #[error("value {value} is outside the universe of `{variable}` [{lo}, {hi}]")]
    OutOfUniverse {
        variable: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("variable `{variable}` has no term `{term}`")]
    UnknownTerm { variable: String, term: String },
    #[error("no degree given for term `{term}` of `{variable}`")]
    MissingDegree { variable: String, term: String },
    #[error("degree {degree} for `{variable}` is `{term}` is outside [0, 1]")]
    DegreeOutOfRange {
        variable: String,
        term: String,
        degree: f64,
    },
    #[error("centroid resolution must be at least 2, got {0}")]
    InvalidResolution(usize),
    #[error("aggregate belongs to `{found}`, expected `{expected}`")]
    VariableMismatch { expected: String, found: String },
    #[error("no rule fired for output `{variable}`: every clipping level is zero")]
    NoRuleFired { variable: String },
}
