//! Fuzzy expert-system shell.
//!
//! A knowledge base declares linguistic variables (a numeric universe with
//! triangular, trapezoidal or piecewise-linear terms) and conjunctive rules
//! such as
//!
//! ```text
//! IF (speech_problems_level is low) and (child_age is small) THEN weekly_session_number is low;
//! ```
//!
//! A consultation fuzzifies crisp inputs, fires each rule with `min`,
//! combines rule strengths per output term with `max`, clips the output
//! terms at those levels and takes the centroid of their pointwise maximum.
//! Every stage is recorded in the returned [`ConsultationResult`].
//!
//! ```
//! use fuzzyshell::{fixture, Engine};
//!
//! let kb = fixture::speech_therapy_kb();
//! let result = Engine::new(&kb)?.infer(&fixture::example_inputs())?;
//! assert_eq!(result.recommendation.unwrap().note, "1 to 2 sessions per week (2 preferred)");
//! # Ok::<(), fuzzyshell::ConsultError>(())
//! ```

pub mod engine;
pub mod fixture;
pub mod fuzzy;
pub mod kb;
pub mod lang;
pub mod par;

pub use engine::{
    infer, interpret_sessions, ConsultError, ConsultationResult, Engine, Inputs, RuleFiring,
    SessionRecommendation,
};
pub use fuzzy::{
    aggregate, defuzzify_centroid, fuzzify, AggregatedOutputSet, FuzzifiedValue, FuzzyError,
    LinguisticTerm, LinguisticVariable, MembershipFunction, UniverseInterval, VariableRole,
};
pub use kb::{apply_edit, Edit, EditError, EditKind, KbStore, KnowledgeBase};
pub use lang::{parse_kb, parse_rule, render, validate, Diagnostic, Rule, RuleId};
pub use par::Execution;
