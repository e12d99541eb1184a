//! Recursive-descent parser for rules and knowledge-base documents.
//!
//! ```text
//! document := (variable | rule)*
//! variable := "variable" IDENT ("input" | "output") "range" NUM NUM "{" term* "}"
//! term     := "term" IDENT ( "tri" NUM NUM NUM
//!                          | "trap" NUM NUM NUM NUM
//!                          | "points" ("(" NUM "," NUM ")")+ )
//! rule     := IF clause (AND clause)* THEN IDENT IS IDENT [";"]
//! clause   := "(" IDENT IS IDENT ")"
//! ```
//!
//! `variable`, `range`, `term` and the shape names are contextual: they are
//! ordinary identifiers everywhere except where the grammar expects them.

use super::diagnostic::{codes, Diagnostic, Location};
use super::rule::{Clause, Rule};
use super::token::{lex, Token, TokenKind};
use crate::fuzzy::{
    FuzzyError, LinguisticTerm, LinguisticVariable, MembershipFunction, UniverseInterval,
    VariableRole,
};
use crate::kb::{KnowledgeBase, SourceMap};

/// Parses a single rule. A trailing `;` is optional.
pub fn parse_rule(source: &str) -> Result<Rule, Vec<Diagnostic>> {
    let (tokens, mut diagnostics) = lex(source);
    let mut parser = Parser::new(&tokens);
    let parsed = parser.rule();
    if parsed.is_ok() {
        if let Some(tok) = parser.peek() {
            parser.error_at(
                tok.location,
                format!("expected end of rule, found {}", tok.kind),
            );
        }
    }
    diagnostics.append(&mut parser.diagnostics);
    match parsed {
        Ok((rule, _)) if diagnostics.is_empty() => Ok(rule),
        _ => Err(sorted(diagnostics)),
    }
}

/// Parses one `variable ... { ... }` block.
pub fn parse_variable(source: &str) -> Result<LinguisticVariable, Vec<Diagnostic>> {
    let (tokens, mut diagnostics) = lex(source);
    let mut parser = Parser::new(&tokens);
    let parsed = if parser.at_word("variable") {
        parser.variable()
    } else {
        let loc = parser.here();
        parser.error_at(loc, "expected `variable` block");
        Err(())
    };
    if parsed.is_ok() {
        if let Some(tok) = parser.peek() {
            parser.error_at(
                tok.location,
                format!("expected end of input, found {}", tok.kind),
            );
        }
    }
    diagnostics.append(&mut parser.diagnostics);
    match parsed {
        Ok((var, _)) if diagnostics.is_empty() => Ok(var),
        _ => Err(sorted(diagnostics)),
    }
}

/// Parses a full knowledge-base document into a revision-0 knowledge base.
///
/// Parsing resynchronizes after errors so one pass reports as many problems
/// as possible. Semantic checks across rules and variables are left to
/// [`validate`](super::validate).
pub fn parse_kb(document: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    let (tokens, mut diagnostics) = lex(document);
    let mut parser = Parser::new(&tokens);
    let mut variables: Vec<LinguisticVariable> = Vec::new();
    let mut rules = Vec::new();
    let mut source = SourceMap::default();
    let mut declared = false;

    while let Some(tok) = parser.peek() {
        match &tok.kind {
            TokenKind::If => match parser.rule() {
                Ok((rule, loc)) => {
                    rules.push(rule);
                    source.rules.push(loc);
                }
                Err(()) => parser.recover_top(),
            },
            TokenKind::Ident(w) if w == "variable" => {
                declared = true;
                if let Ok((var, loc)) = parser.variable() {
                    if variables.iter().any(|v| v.name() == var.name()) {
                        parser.diagnostics.push(Diagnostic::error(
                            loc,
                            codes::DUP_VARIABLE,
                            format!("variable `{}` is declared twice", var.name()),
                        ));
                    } else {
                        variables.push(var);
                        source.variables.push(loc);
                    }
                }
            }
            other => {
                let msg = format!("expected `variable` block or `IF` rule, found {other}");
                parser.error_at(tok.location, msg);
                parser.recover_top();
            }
        }
    }

    diagnostics.append(&mut parser.diagnostics);
    if !declared {
        diagnostics.push(Diagnostic::error(
            Location::START,
            codes::NO_VARIABLES,
            "no variables declared",
        ));
    }
    if diagnostics.is_empty() {
        Ok(KnowledgeBase::from_parts(variables, rules, 0, source))
    } else {
        Err(sorted(diagnostics))
    }
}

fn sorted(mut diagnostics: Vec<Diagnostic>) -> Vec<Diagnostic> {
    diagnostics.sort_by_key(|d| d.location);
    diagnostics
}

type PResult<T> = Result<T, ()>;

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    diagnostics: Vec<Diagnostic>,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Self {
            tokens,
            pos: 0,
            diagnostics: Vec::new(),
        }
    }

    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'t Token> {
        self.tokens.get(self.pos + ahead)
    }

    fn advance(&mut self) -> Option<&'t Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    /// Location of the next token, or of the last token at end of input.
    fn here(&self) -> Location {
        self.peek()
            .or(self.tokens.last())
            .map_or(Location::START, |t| t.location)
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Ident(w), .. }) if w == word)
    }

    fn error_at(&mut self, location: Location, message: impl Into<String>) {
        self.diagnostics
            .push(Diagnostic::error(location, codes::SYNTAX, message));
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let found = match self.peek() {
            Some(tok) => tok.kind.describe(),
            None => "end of input".to_string(),
        };
        let loc = self.here();
        self.error_at(loc, format!("expected {expected}, found {found}"));
        Err(())
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> PResult<&'t Token> {
        match self.peek() {
            Some(tok) if tok.kind == kind => {
                self.pos += 1;
                Ok(tok)
            }
            _ => self.unexpected(expected),
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<Location> {
        if self.at_word(word) {
            Ok(self
                .advance()
                .map(|t| t.location)
                .unwrap_or(Location::START))
        } else {
            self.unexpected(&format!("`{word}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Location)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                location,
                ..
            }) => {
                self.pos += 1;
                Ok((name.clone(), *location))
            }
            _ => self.unexpected(what),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Number(n),
                ..
            }) => {
                self.pos += 1;
                Ok(*n)
            }
            _ => self.unexpected("number"),
        }
    }

    fn starts_item(&self) -> bool {
        match self.peek() {
            Some(Token {
                kind: TokenKind::If,
                ..
            }) => true,
            Some(Token {
                kind: TokenKind::Ident(w),
                ..
            }) => {
                w == "variable"
                    && matches!(
                        self.peek_at(1),
                        Some(Token {
                            kind: TokenKind::Ident(_),
                            ..
                        })
                    )
                    && matches!(
                        self.peek_at(2),
                        Some(Token { kind: TokenKind::Ident(r), .. }) if r == "input" || r == "output"
                    )
            }
            _ => false,
        }
    }

    /// Skips to the start of the next top-level item.
    fn recover_top(&mut self) {
        self.advance();
        while let Some(tok) = self.peek() {
            if self.starts_item() {
                return;
            }
            self.pos += 1;
            if matches!(tok.kind, TokenKind::Semicolon | TokenKind::RBrace) {
                return;
            }
        }
    }

    fn clause(&mut self) -> PResult<(Clause, Location)> {
        self.expect(TokenKind::LParen, "`(` opening a clause")?;
        let (clause, loc) = self.bare_clause()?;
        self.expect(TokenKind::RParen, "`)` closing the clause")?;
        Ok((clause, loc))
    }

    fn bare_clause(&mut self) -> PResult<(Clause, Location)> {
        let (variable, loc) = self.ident("variable name")?;
        self.expect(TokenKind::Is, "`is`")?;
        let (term, _) = self.ident("term name")?;
        Ok((Clause { variable, term }, loc))
    }

    fn rule(&mut self) -> PResult<(Rule, Location)> {
        let start = self.expect(TokenKind::If, "`IF`")?.location;
        let mut antecedents: Vec<Clause> = Vec::new();
        let mut duplicate = false;
        loop {
            let (clause, loc) = self.clause()?;
            if antecedents.iter().any(|c| c.variable == clause.variable) {
                self.diagnostics.push(Diagnostic::error(
                    loc,
                    codes::DUP_ANTECEDENT,
                    format!(
                        "variable `{}` already appears in this rule",
                        clause.variable
                    ),
                ));
                duplicate = true;
            }
            antecedents.push(clause);
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::And) => {
                    self.pos += 1;
                }
                Some(TokenKind::Then) => {
                    self.pos += 1;
                    break;
                }
                _ => return self.unexpected("`and` or `THEN`"),
            }
        }
        let (consequent, _) = self.bare_clause()?;
        if matches!(self.peek().map(|t| &t.kind), Some(TokenKind::Semicolon)) {
            self.pos += 1;
        }
        if duplicate {
            return Err(());
        }
        let rule = Rule::new(antecedents, consequent).map_err(|_| ())?;
        Ok((rule, start))
    }

    fn variable(&mut self) -> PResult<(LinguisticVariable, Location)> {
        let start = self.expect_word("variable")?;
        let header = self.variable_header();
        let (name, role, universe) = match header {
            Ok(h) => h,
            Err(()) => {
                self.skip_block();
                return Err(());
            }
        };

        let mut terms: Vec<LinguisticTerm> = Vec::new();
        let mut ok = universe.is_some();
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(TokenKind::RBrace) => {
                    self.pos += 1;
                    break;
                }
                Some(TokenKind::Ident(w)) if w == "term" => match self.term() {
                    Ok((term, loc)) => {
                        if terms.iter().any(|t| t.name == term.name) {
                            self.diagnostics.push(Diagnostic::error(
                                loc,
                                codes::INVALID_VARIABLE,
                                format!("term `{}` is declared twice in `{name}`", term.name),
                            ));
                            ok = false;
                        } else if let Some(u) = universe {
                            let (lo, hi) = term.mf.support();
                            if lo < u.lo() || hi > u.hi() {
                                self.diagnostics.push(Diagnostic::error(
                                    loc,
                                    codes::INVALID_SHAPE,
                                    format!(
                                        "term `{}` extends outside the range [{}, {}] of `{name}`",
                                        term.name,
                                        u.lo(),
                                        u.hi()
                                    ),
                                ));
                                ok = false;
                            }
                        }
                        terms.push(term);
                    }
                    Err(()) => {
                        ok = false;
                        self.skip_to_term();
                    }
                },
                _ if self.peek().is_none() || self.starts_item() => {
                    let _ = self.unexpected::<()>("`}` closing the variable block");
                    return Err(());
                }
                _ => {
                    let _ = self.unexpected::<()>("`term` or `}`");
                    ok = false;
                    self.advance();
                    self.skip_to_term();
                }
            }
        }
        if !ok {
            return Err(());
        }
        let universe = universe.ok_or(())?;
        match LinguisticVariable::new(name.clone(), role, universe, terms) {
            Ok(var) => Ok((var, start)),
            Err(err) => {
                self.diagnostics.push(Diagnostic::error(
                    start,
                    codes::INVALID_VARIABLE,
                    match err {
                        FuzzyError::TooFewTerms { .. } => {
                            format!("variable `{name}` needs at least two terms")
                        }
                        other => other.to_string(),
                    },
                ));
                Err(())
            }
        }
    }

    /// `IDENT role range lo hi {`; the universe is `None` when the range is
    /// numerically invalid but syntactically fine.
    fn variable_header(&mut self) -> PResult<(String, VariableRole, Option<UniverseInterval>)> {
        let (name, _) = self.ident("variable name")?;
        let role = if self.at_word("input") {
            VariableRole::Input
        } else if self.at_word("output") {
            VariableRole::Output
        } else {
            return self.unexpected("`input` or `output`");
        };
        self.pos += 1;
        let range_loc = self.expect_word("range")?;
        let lo = self.number()?;
        let hi = self.number()?;
        let universe = match UniverseInterval::new(lo, hi) {
            Ok(u) => Some(u),
            Err(_) => {
                self.diagnostics.push(Diagnostic::error(
                    range_loc,
                    codes::INVALID_RANGE,
                    format!("range {lo} {hi} of `{name}` is empty: need lo < hi"),
                ));
                None
            }
        };
        self.expect(TokenKind::LBrace, "`{` opening the variable block")?;
        Ok((name, role, universe))
    }

    fn term(&mut self) -> PResult<(LinguisticTerm, Location)> {
        let loc = self.expect_word("term")?;
        let (name, _) = self.ident("term name")?;
        let shape_loc = self.here();
        let mf = if self.at_word("tri") {
            self.pos += 1;
            let (a, b, c) = (self.number()?, self.number()?, self.number()?);
            MembershipFunction::triangular(a, b, c)
        } else if self.at_word("trap") {
            self.pos += 1;
            let (a, b, c, d) = (
                self.number()?,
                self.number()?,
                self.number()?,
                self.number()?,
            );
            MembershipFunction::trapezoidal(a, b, c, d)
        } else if self.at_word("points") {
            self.pos += 1;
            let mut points = Vec::new();
            loop {
                self.expect(TokenKind::LParen, "`(` opening a point")?;
                let x = self.number()?;
                self.expect(TokenKind::Comma, "`,`")?;
                let mu = self.number()?;
                self.expect(TokenKind::RParen, "`)` closing the point")?;
                points.push((x, mu));
                if !matches!(self.peek().map(|t| &t.kind), Some(TokenKind::LParen)) {
                    break;
                }
            }
            MembershipFunction::piecewise_linear(points)
        } else {
            return self.unexpected("`tri`, `trap` or `points`");
        };
        match mf {
            Ok(mf) => Ok((LinguisticTerm { name, mf }, loc)),
            Err(err) => {
                self.diagnostics.push(Diagnostic::error(
                    shape_loc,
                    codes::INVALID_SHAPE,
                    format!("term `{name}`: {err}"),
                ));
                Err(())
            }
        }
    }

    fn skip_to_term(&mut self) {
        while let Some(tok) = self.peek() {
            match &tok.kind {
                TokenKind::RBrace => return,
                TokenKind::Ident(w) if w == "term" => return,
                _ if self.starts_item() => return,
                _ => self.pos += 1,
            }
        }
    }

    /// Abandons a variable block whose header failed.
    fn skip_block(&mut self) {
        while let Some(tok) = self.peek() {
            if self.starts_item() {
                return;
            }
            self.pos += 1;
            if tok.kind == TokenKind::RBrace {
                return;
            }
        }
    }
}
