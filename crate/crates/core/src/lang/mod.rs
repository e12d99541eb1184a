//! The rule language: tokenizer, parser, canonical renderer and validator
//! for rules and knowledge-base documents.

mod diagnostic;
mod parser;
mod render;
mod rule;
mod token;
mod validate;

pub use diagnostic::{codes, has_errors, Diagnostic, Location, Severity};
pub use parser::{parse_kb, parse_rule, parse_variable};
pub(crate) use render::render_document;
pub use render::{render, render_kb, render_variable};
pub use rule::{is_identifier, Clause, ParseRuleIdError, Rule, RuleError, RuleId};
pub use token::{tokenize, Token, TokenKind};
pub use validate::validate;
