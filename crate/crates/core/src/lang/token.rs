use std::fmt;

use super::diagnostic::{codes, Diagnostic, Location};

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    If,
    And,
    Then,
    Is,
    /// Lower-cased identifier.
    Ident(String),
    Number(f64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Semicolon,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::If => "`IF`".into(),
            TokenKind::And => "`and`".into(),
            TokenKind::Then => "`THEN`".into(),
            TokenKind::Is => "`is`".into(),
            TokenKind::Ident(name) => format!("identifier `{name}`"),
            TokenKind::Number(n) => format!("number `{n}`"),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Semicolon => "`;`".into(),
        }
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Source text of the token as written.
    pub lexeme: String,
    pub location: Location,
    /// Byte offset of the lexeme in the source.
    pub offset: usize,
}

/// Splits `source` into tokens. `#` starts a comment running to end of line.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let (tokens, diagnostics) = lex(source);
    if diagnostics.is_empty() {
        Ok(tokens)
    } else {
        Err(diagnostics)
    }
}

/// Lenient form of [`tokenize`]: skips illegal characters and keeps going.
pub(crate) fn lex(source: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    Lexer::new(source).run()
}

struct Lexer<'s> {
    source: &'s str,
    chars: std::iter::Peekable<std::str::CharIndices<'s>>,
    line: u32,
    column: u32,
    tokens: Vec<Token>,
    diagnostics: Vec<Diagnostic>,
}

impl<'s> Lexer<'s> {
    fn new(source: &'s str) -> Self {
        Self {
            source,
            chars: source.char_indices().peekable(),
            line: 1,
            column: 1,
            tokens: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let (i, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some((i, c))
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.source.len(), |&(i, _)| i)
    }

    fn run(mut self) -> (Vec<Token>, Vec<Diagnostic>) {
        while let Some(c) = self.peek() {
            let location = Location::new(self.line, self.column);
            let start = self.offset();
            match c {
                c if c.is_whitespace() => {
                    self.bump();
                }
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                '(' | ')' | '{' | '}' | ',' | ';' => {
                    self.bump();
                    let kind = match c {
                        '(' => TokenKind::LParen,
                        ')' => TokenKind::RParen,
                        '{' => TokenKind::LBrace,
                        '}' => TokenKind::RBrace,
                        ',' => TokenKind::Comma,
                        _ => TokenKind::Semicolon,
                    };
                    self.push(kind, start, location);
                }
                c if c.is_ascii_alphabetic() => {
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                        self.bump();
                    }
                    let word = self.source[start..self.offset()].to_ascii_lowercase();
                    let kind = match word.as_str() {
                        "if" => TokenKind::If,
                        "and" => TokenKind::And,
                        "then" => TokenKind::Then,
                        "is" => TokenKind::Is,
                        _ => TokenKind::Ident(word),
                    };
                    self.push(kind, start, location);
                }
                c if c.is_ascii_digit()
                    || (c == '-' && self.peek_second().is_some_and(|d| d.is_ascii_digit())) =>
                {
                    self.bump();
                    self.digits();
                    if self.peek() == Some('.')
                        && self.peek_second().is_some_and(|d| d.is_ascii_digit())
                    {
                        self.bump();
                        self.digits();
                    }
                    let text = &self.source[start..self.offset()];
                    match text.parse::<f64>() {
                        Ok(n) if n.is_finite() => self.push(TokenKind::Number(n), start, location),
                        _ => self.diagnostics.push(Diagnostic::error(
                            location,
                            codes::SYNTAX,
                            format!("number `{text}` is out of range"),
                        )),
                    }
                }
                other => {
                    self.bump();
                    self.diagnostics.push(Diagnostic::error(
                        location,
                        codes::ILLEGAL_CHAR,
                        format!("illegal character `{}`", other.escape_debug()),
                    ));
                }
            }
        }
        (self.tokens, self.diagnostics)
    }

    fn digits(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
    }

    fn push(&mut self, kind: TokenKind, start: usize, location: Location) {
        let end = self.offset();
        self.tokens.push(Token {
            kind,
            lexeme: self.source[start..end].to_string(),
            location,
            offset: start,
        });
    }
}
