//! Turtle serialization, strict parsing, regex-based recovery and the
//! four-way validation cascade for model outputs.
//!
//! The strict parser covers the grammar subset the schema exercises:
//! prefixed names, IRIs, typed/plain string literals, numeric literals and
//! semicolon-chained predicate-object lists. Prefix declarations are
//! accepted and discarded; `log:` and `xsd:` are treated as well-known, so
//! canonical blocks need no preamble. Blank nodes and collections are out of
//! scope — the schema never emits them.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::rdf::{Datatype, Literal, Statement, Term, TripleSet, SYNTHETIC_SUBJECT};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

fn escape_literal(lexical: &str) -> String {
    let mut out = String::with_capacity(lexical.len());
    for ch in lexical.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '"' => out.push_str("\\\""),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            other => out.push(other),
        }
    }
    out
}

fn write_term(out: &mut String, term: &Term) {
    match term {
        Term::Iri(iri) => {
            out.push('<');
            out.push_str(iri);
            out.push('>');
        }
        Term::Literal(lit) => {
            out.push('"');
            out.push_str(&escape_literal(&lit.lexical));
            out.push('"');
            if let Some(qname) = lit.datatype.xsd_qname() {
                out.push_str("^^");
                out.push_str(qname);
            }
        }
    }
}

/// Canonical Turtle layout: subject alone on the first line, one
/// `predicate object ;` per statement line, the final statement closed
/// with `.`.
pub fn serialize(set: &TripleSet) -> String {
    let mut out = String::new();
    out.push('<');
    out.push_str(&set.subject);
    out.push('>');
    let last = set.statements.len().saturating_sub(1);
    for (idx, statement) in set.statements.iter().enumerate() {
        out.push_str("\n    ");
        out.push_str(&statement.predicate);
        out.push(' ');
        write_term(&mut out, &statement.object);
        out.push_str(if idx == last { " ." } else { " ;" });
    }
    out
}

// ---------------------------------------------------------------------------
// Strict parser
// ---------------------------------------------------------------------------

/// Strict-parse failure with source position.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Iri(String),
    PName(String),
    Word(String),
    StringLit(String),
    Integer(String),
    Decimal(String),
    Boolean(String),
    LangTag(String),
    CaretCaret,
    Semicolon,
    Comma,
    Dot,
    AtPrefix,
    AtBase,
    SparqlPrefix,
    SparqlBase,
    KeywordA,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src, pos: 0 }
    }

    fn error(&self, at: usize, message: impl Into<String>) -> ParseError {
        let prefix = &self.src[..at.min(self.src.len())];
        let line = prefix.matches('\n').count() + 1;
        let column = prefix.chars().rev().take_while(|&c| c != '\n').count() + 1;
        ParseError { line, column, message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if trimmed.starts_with('#') {
                match trimmed.find('\n') {
                    Some(nl) => self.pos += nl + 1,
                    None => self.pos = self.src.len(),
                }
            } else {
                return;
            }
        }
    }

    fn lex_iri(&mut self) -> Result<Token, ParseError> {
        let start = self.pos;
        let body = &self.src[self.pos + 1..];
        let end = body
            .find('>')
            .ok_or_else(|| self.error(start, "unterminated IRI"))?;
        let iri = &body[..end];
        if iri.chars().any(|c| c == '\n' || c == ' ' || c == '\t') {
            return Err(self.error(start, "whitespace inside IRI"));
        }
        self.pos += end + 2;
        Ok(Token::Iri(iri.to_string()))
    }

    fn lex_string(&mut self) -> Result<Token, ParseError> {
        let start = self.pos;
        if self.rest().starts_with("\"\"\"") {
            return Err(self.error(start, "long-form string literals are not supported"));
        }
        let mut value = String::new();
        let mut chars = self.src[self.pos + 1..].char_indices();
        while let Some((idx, ch)) = chars.next() {
            match ch {
                '"' => {
                    self.pos += idx + 2;
                    return Ok(Token::StringLit(value));
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => value.push('\n'),
                    Some((_, 'r')) => value.push('\r'),
                    Some((_, 't')) => value.push('\t'),
                    Some((_, '"')) => value.push('"'),
                    Some((_, '\\')) => value.push('\\'),
                    Some((_, '\'')) => value.push('\''),
                    Some((_, 'u')) | Some((_, 'U')) => {
                        return Err(self.error(start, "unicode escapes are not supported"))
                    }
                    other => {
                        return Err(self.error(
                            start,
                            format!("invalid escape {:?}", other.map(|(_, c)| c)),
                        ))
                    }
                },
                '\n' => return Err(self.error(start, "newline inside string literal")),
                other => value.push(other),
            }
        }
        Err(self.error(start, "unterminated string literal"))
    }

    fn lex_number(&mut self) -> Result<Token, ParseError> {
        let start = self.pos;
        let rest = self.rest();
        static RE: OnceLock<Regex> = OnceLock::new();
        let re = RE.get_or_init(|| {
            Regex::new(r"^[+-]?(?:\d+\.\d+(?:[eE][+-]?\d+)?|\.\d+|\d+[eE][+-]?\d+|\d+)")
                .expect("static regex compiles")
        });
        let m = re
            .find(rest)
            .ok_or_else(|| self.error(start, "malformed numeric literal"))?;
        let text = m.as_str().to_string();
        self.pos += m.end();
        if text.contains('.') || text.contains('e') || text.contains('E') {
            Ok(Token::Decimal(text))
        } else {
            Ok(Token::Integer(text))
        }
    }

    fn lex_name(&mut self) -> Result<Token, ParseError> {
        let rest = self.rest();
        static RE: OnceLock<Regex> = OnceLock::new();
        let re = RE.get_or_init(|| {
            Regex::new(r"^[A-Za-z_][A-Za-z0-9_.\-]*(?::[A-Za-z0-9_.\-/%#]*)?")
                .expect("static regex compiles")
        });
        let m = re.find(rest).expect("caller checked first char");
        let mut text = m.as_str();
        // A name cannot end with '.'; that dot terminates the statement.
        while text.ends_with('.') {
            text = &text[..text.len() - 1];
        }
        self.pos += text.len();
        let token = match text {
            "a" => Token::KeywordA,
            "true" | "false" => Token::Boolean(text.to_string()),
            "PREFIX" | "prefix" | "Prefix" => Token::SparqlPrefix,
            "BASE" | "base" | "Base" => Token::SparqlBase,
            _ if text.contains(':') => Token::PName(text.to_string()),
            _ => Token::Word(text.to_string()),
        };
        Ok(token)
    }

    fn next_token(&mut self) -> Result<Option<(usize, Token)>, ParseError> {
        self.skip_trivia();
        let start = self.pos;
        let rest = self.rest();
        let Some(ch) = rest.chars().next() else {
            return Ok(None);
        };
        let token = match ch {
            '<' => self.lex_iri()?,
            '"' => self.lex_string()?,
            ';' => {
                self.pos += 1;
                Token::Semicolon
            }
            ',' => {
                self.pos += 1;
                Token::Comma
            }
            '.' => {
                if rest[1..].chars().next().is_some_and(|c| c.is_ascii_digit()) {
                    self.lex_number()?
                } else {
                    self.pos += 1;
                    Token::Dot
                }
            }
            '^' => {
                if rest.starts_with("^^") {
                    self.pos += 2;
                    Token::CaretCaret
                } else {
                    return Err(self.error(start, "expected ^^"));
                }
            }
            '@' => {
                let word: String = rest[1..]
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || *c == '-')
                    .collect();
                self.pos += 1 + word.len();
                match word.as_str() {
                    "prefix" => Token::AtPrefix,
                    "base" => Token::AtBase,
                    _ if !word.is_empty() => Token::LangTag(word),
                    _ => return Err(self.error(start, "dangling @")),
                }
            }
            c if c.is_ascii_digit() || c == '+' || c == '-' => self.lex_number()?,
            c if c.is_ascii_alphabetic() || c == '_' => self.lex_name()?,
            ':' => {
                // Empty-prefix qname like `:foo`.
                let local: String = rest[1..]
                    .chars()
                    .take_while(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
                    .collect();
                self.pos += 1 + local.len();
                Token::PName(format!(":{local}"))
            }
            other => return Err(self.error(start, format!("unexpected character {other:?}"))),
        };
        Ok(Some((start, token)))
    }

    fn tokenize(mut self) -> Result<Vec<(usize, Token)>, ParseError> {
        let mut tokens = Vec::new();
        while let Some(token) = self.next_token()? {
            tokens.push(token);
        }
        Ok(tokens)
    }
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(usize, Token)>,
    idx: usize,
}

impl<'a> Parser<'a> {
    fn error_at(&self, message: impl Into<String>) -> ParseError {
        let at = self
            .tokens
            .get(self.idx)
            .map(|(pos, _)| *pos)
            .unwrap_or(self.src.len());
        Lexer::new(self.src).error(at, message)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.idx).map(|(_, t)| t)
    }

    fn advance(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.idx).map(|(_, t)| t.clone());
        if token.is_some() {
            self.idx += 1;
        }
        token
    }

    fn expect_dot(&mut self) -> Result<(), ParseError> {
        match self.advance() {
            Some(Token::Dot) => Ok(()),
            _ => {
                self.idx = self.idx.saturating_sub(1);
                Err(self.error_at("expected '.'"))
            }
        }
    }

    fn datatype_from_name(name: &str) -> Datatype {
        let local = name
            .rsplit(['#', '/', ':'])
            .next()
            .unwrap_or(name)
            .to_ascii_lowercase();
        match local.as_str() {
            "datetime" | "datetimestamp" | "date" => Datatype::DateTime,
            "integer" | "int" | "long" | "short" | "byte" | "nonnegativeinteger"
            | "positiveinteger" | "unsignedint" | "unsignedlong" => Datatype::Integer,
            "decimal" | "double" | "float" => Datatype::Decimal,
            _ => Datatype::PlainString,
        }
    }

    fn parse_object(&mut self) -> Result<Term, ParseError> {
        match self.advance() {
            Some(Token::Iri(iri)) => Ok(Term::Iri(iri)),
            Some(Token::PName(name)) => Ok(Term::Iri(name)),
            Some(Token::Integer(text)) => Ok(Term::typed(text, Datatype::Integer)),
            Some(Token::Decimal(text)) => Ok(Term::typed(text, Datatype::Decimal)),
            Some(Token::Boolean(text)) => Ok(Term::plain(text)),
            Some(Token::StringLit(value)) => {
                match self.peek() {
                    Some(Token::CaretCaret) => {
                        self.advance();
                        let datatype = match self.advance() {
                            Some(Token::PName(name)) => Self::datatype_from_name(&name),
                            Some(Token::Iri(iri)) => Self::datatype_from_name(&iri),
                            _ => {
                                self.idx = self.idx.saturating_sub(1);
                                return Err(self.error_at("expected datatype after ^^"));
                            }
                        };
                        Ok(Term::Literal(Literal::typed(value, datatype)))
                    }
                    Some(Token::LangTag(_)) => {
                        self.advance();
                        Ok(Term::plain(value))
                    }
                    _ => Ok(Term::plain(value)),
                }
            }
            _ => {
                self.idx = self.idx.saturating_sub(1);
                Err(self.error_at("expected object"))
            }
        }
    }

    fn parse_verb(&mut self) -> Result<String, ParseError> {
        match self.advance() {
            Some(Token::PName(name)) => Ok(name),
            Some(Token::Iri(iri)) => Ok(format!("<{iri}>")),
            Some(Token::KeywordA) => Ok("rdf:type".to_string()),
            _ => {
                self.idx = self.idx.saturating_sub(1);
                Err(self.error_at("expected predicate"))
            }
        }
    }

    fn parse_prefix_decl(&mut self, requires_dot: bool) -> Result<(), ParseError> {
        match self.advance() {
            Some(Token::PName(_)) => {}
            _ => {
                self.idx = self.idx.saturating_sub(1);
                return Err(self.error_at("expected prefix name"));
            }
        }
        match self.advance() {
            Some(Token::Iri(_)) => {}
            _ => {
                self.idx = self.idx.saturating_sub(1);
                return Err(self.error_at("expected namespace IRI"));
            }
        }
        if requires_dot {
            self.expect_dot()?;
        }
        Ok(())
    }

    fn parse_document(&mut self) -> Result<TripleSet, ParseError> {
        let mut subject: Option<String> = None;
        let mut statements: Vec<Statement> = Vec::new();

        while let Some(token) = self.peek().cloned() {
            match token {
                Token::AtPrefix => {
                    self.advance();
                    // Declarations are accepted and discarded; qnames keep
                    // their written prefix.
                    self.parse_prefix_decl(true)?;
                }
                Token::SparqlPrefix => {
                    self.advance();
                    self.parse_prefix_decl(false)?;
                }
                Token::AtBase => {
                    self.advance();
                    match self.advance() {
                        Some(Token::Iri(_)) => self.expect_dot()?,
                        _ => {
                            self.idx = self.idx.saturating_sub(1);
                            return Err(self.error_at("expected base IRI"));
                        }
                    }
                }
                Token::SparqlBase => {
                    self.advance();
                    match self.advance() {
                        Some(Token::Iri(_)) => {}
                        _ => {
                            self.idx = self.idx.saturating_sub(1);
                            return Err(self.error_at("expected base IRI"));
                        }
                    }
                }
                Token::Iri(_) | Token::PName(_) => {
                    let block_subject = match self.advance() {
                        Some(Token::Iri(iri)) => iri,
                        Some(Token::PName(name)) => name,
                        _ => unreachable!("peeked"),
                    };
                    if subject.is_none() {
                        subject = Some(block_subject);
                    }
                    self.parse_predicate_object_list(&mut statements)?;
                    self.expect_dot()?;
                }
                _ => return Err(self.error_at("expected subject")),
            }
        }

        match subject {
            Some(subject) if !statements.is_empty() => {
                let mut set = TripleSet::new(subject);
                for statement in statements {
                    set.push_unique(statement);
                }
                Ok(set)
            }
            _ => Err(Lexer::new(self.src).error(self.src.len(), "no triples found")),
        }
    }

    fn parse_predicate_object_list(
        &mut self,
        statements: &mut Vec<Statement>,
    ) -> Result<(), ParseError> {
        loop {
            let predicate = self.parse_verb()?;
            loop {
                let object = self.parse_object()?;
                statements.push(Statement::new(predicate.clone(), object));
                if matches!(self.peek(), Some(Token::Comma)) {
                    self.advance();
                } else {
                    break;
                }
            }
            if matches!(self.peek(), Some(Token::Semicolon)) {
                while matches!(self.peek(), Some(Token::Semicolon)) {
                    self.advance();
                }
                // Trailing semicolon before the closing dot is legal.
                if matches!(self.peek(), Some(Token::Dot)) {
                    return Ok(());
                }
            } else {
                return Ok(());
            }
        }
    }
}

/// Full-grammar acceptance over the exercised Turtle subset. Predicates
/// outside the vocabulary are retained; the evaluator decides their fate.
pub fn parse_strict(text: &str) -> Result<TripleSet, ParseError> {
    let tokens = Lexer::new(text).tokenize()?;
    let mut parser = Parser { src: text, tokens, idx: 0 };
    parser.parse_document()
}

// ---------------------------------------------------------------------------
// Output cleaning
// ---------------------------------------------------------------------------

fn is_turtle_start(line: &str) -> bool {
    let t = line.trim_start();
    if t.starts_with('<') && t.len() > 1 {
        return true;
    }
    if t.starts_with("@prefix") || t.starts_with("@base") {
        return true;
    }
    let upper = t.get(..7).map(|s| s.to_ascii_uppercase());
    if matches!(upper.as_deref(), Some("PREFIX ")) {
        return true;
    }
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Za-z_][\w\-]*:\S").expect("static regex compiles"))
        .is_match(t)
}

/// Extracts the RDF/TTL content from a model answer: code fences are
/// unwrapped, leading and trailing prose around the triple block is
/// stripped, interior content is preserved verbatim. Text with no
/// triple-like line passes through trimmed so the cascade can judge it.
pub fn clean_output(raw: &str) -> String {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return String::new();
    }

    static FENCE: OnceLock<Regex> = OnceLock::new();
    let fence = FENCE.get_or_init(|| {
        Regex::new(r"(?ms)^\s*```[A-Za-z]*[ \t]*\r?\n(.*?)^\s*```[ \t]*$")
            .expect("static regex compiles")
    });
    let fenced: Vec<&str> = fence
        .captures_iter(trimmed)
        .filter_map(|caps| caps.get(1).map(|m| m.as_str()))
        .filter(|body| body.lines().any(is_turtle_start))
        .collect();
    if !fenced.is_empty() {
        return fenced.join("\n").trim().to_string();
    }

    let lines: Vec<&str> = trimmed.lines().collect();
    let Some(first) = lines.iter().position(|l| is_turtle_start(l)) else {
        return trimmed.to_string();
    };
    // The block ends at the last triple-like line; statement lines either
    // start like Turtle or close with a spaced terminator.
    let last = lines
        .iter()
        .enumerate()
        .skip(first)
        .filter(|(_, l)| is_turtle_start(l) || l.trim_end().ends_with(" ."))
        .map(|(i, _)| i)
        .next_back()
        .unwrap_or(first);
    lines[first..=last].join("\n").trim().to_string()
}

// ---------------------------------------------------------------------------
// Regex recovery
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
enum RecTokenKind {
    Iri,
    Url,
    Quoted,
    Number,
    Name,
}

#[derive(Debug, Clone)]
struct RecToken {
    kind: RecTokenKind,
    text: String,
}

fn recovery_tokens(line: &str) -> Vec<RecToken> {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(
            r#"(?x)
            (?P<iri><[^<>\s]+>)
            |(?P<lit>"(?:[^"\\]|\\.)*"(?:\^\^\S+|@[A-Za-z\-]+)?)
            |(?P<url>https?://[^\s;,"]+)
            |(?P<num>[+-]?\d+(?:\.\d+)?)
            |(?P<name>[A-Za-z_][A-Za-z0-9_.\-]*(?::[A-Za-z0-9_.\-/%#]*)?)
            "#,
        )
        .expect("static regex compiles")
    });
    re.captures_iter(line)
        .filter_map(|caps| {
            let (kind, text) = if let Some(m) = caps.name("iri") {
                (RecTokenKind::Iri, m.as_str())
            } else if let Some(m) = caps.name("lit") {
                (RecTokenKind::Quoted, m.as_str())
            } else if let Some(m) = caps.name("url") {
                (RecTokenKind::Url, m.as_str())
            } else if let Some(m) = caps.name("num") {
                (RecTokenKind::Number, m.as_str())
            } else if let Some(m) = caps.name("name") {
                (RecTokenKind::Name, m.as_str())
            } else {
                return None;
            };
            let text = text.trim_end_matches(['.', ';', ',']);
            if text.is_empty() {
                None
            } else {
                Some(RecToken { kind, text: text.to_string() })
            }
        })
        .collect()
}

fn is_qname(text: &str) -> bool {
    match text.split_once(':') {
        Some((prefix, local)) => !prefix.is_empty() && !local.is_empty(),
        None => false,
    }
}

fn subject_like(token: &RecToken) -> bool {
    match token.kind {
        RecTokenKind::Iri | RecTokenKind::Url => true,
        RecTokenKind::Name => is_qname(&token.text),
        _ => false,
    }
}

/// Predicate slots accept qnames, IRIs and identifier-shaped bare words
/// (UPPER_SNAKE or camelCase); plain lowercase prose words are rejected so
/// free text does not fabricate statements.
fn predicate_like(token: &RecToken) -> Option<PredicateStrength> {
    match token.kind {
        RecTokenKind::Iri | RecTokenKind::Url => Some(PredicateStrength::Strong),
        RecTokenKind::Name if is_qname(&token.text) => Some(PredicateStrength::Strong),
        RecTokenKind::Name => {
            static RE: OnceLock<Regex> = OnceLock::new();
            let identifier = RE.get_or_init(|| {
                Regex::new(r"^(?:[A-Za-z][A-Za-z0-9]*_[A-Za-z0-9_]+|[a-z]+[A-Z][A-Za-z0-9]*|[A-Z]{2,}[A-Za-z0-9]*)$")
                    .expect("static regex compiles")
            });
            identifier.is_match(&token.text).then_some(PredicateStrength::Weak)
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum PredicateStrength {
    Strong,
    Weak,
}

fn object_strong(token: &RecToken) -> bool {
    matches!(
        token.kind,
        RecTokenKind::Iri | RecTokenKind::Url | RecTokenKind::Quoted | RecTokenKind::Number
    )
}

fn subject_text(token: &RecToken) -> String {
    match token.kind {
        RecTokenKind::Iri => token.text.trim_matches(['<', '>']).to_string(),
        _ => token.text.clone(),
    }
}

fn predicate_text(token: &RecToken) -> String {
    match token.kind {
        RecTokenKind::Iri => token.text.clone(),
        RecTokenKind::Url => format!("<{}>", token.text),
        _ => token.text.clone(),
    }
}

fn object_term(token: &RecToken) -> Term {
    match token.kind {
        RecTokenKind::Iri => Term::iri(token.text.trim_matches(['<', '>'])),
        RecTokenKind::Url => Term::iri(token.text.clone()),
        RecTokenKind::Number => {
            if token.text.contains('.') {
                Term::typed(token.text.clone(), Datatype::Decimal)
            } else {
                Term::typed(token.text.clone(), Datatype::Integer)
            }
        }
        RecTokenKind::Quoted => {
            let (body, suffix) = match token.text.rfind('"') {
                Some(last) => (&token.text[1..last], &token.text[last + 1..]),
                None => (token.text.as_str(), ""),
            };
            let mut lexical = String::with_capacity(body.len());
            let mut chars = body.chars();
            while let Some(ch) = chars.next() {
                if ch == '\\' {
                    match chars.next() {
                        Some('n') => lexical.push('\n'),
                        Some('r') => lexical.push('\r'),
                        Some('t') => lexical.push('\t'),
                        Some(other) => lexical.push(other),
                        None => {}
                    }
                } else {
                    lexical.push(ch);
                }
            }
            let datatype = suffix
                .strip_prefix("^^")
                .map(Parser::datatype_from_name)
                .unwrap_or(Datatype::PlainString);
            Term::Literal(Literal::typed(lexical, datatype))
        }
        RecTokenKind::Name => Term::plain(token.text.clone()),
    }
}

/// Line-oriented recovery of near-Turtle content: tolerates missing
/// terminators, stray or broken prefix declarations and unbracketed URIs.
/// Statements seen before any subject line attach to a synthetic subject so
/// they are counted but flagged; the recovery never invents a real subject.
pub fn extract_regex(text: &str) -> TripleSet {
    let mut subject: Option<String> = None;
    let mut orphaned = false;
    let mut statements: Vec<Statement> = Vec::new();

    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty()
            || trimmed.starts_with('#')
            || trimmed.starts_with('@')
            || trimmed.to_ascii_uppercase().starts_with("PREFIX ")
        {
            continue;
        }
        let tokens = recovery_tokens(trimmed);
        if tokens.is_empty() {
            continue;
        }

        let mut idx = 0;
        if subject_like(&tokens[0]) {
            let takes_subject = match tokens.get(1) {
                None => true,
                Some(next) => predicate_like(next).is_some() && tokens.get(2).is_some(),
            };
            if takes_subject {
                if subject.is_none() && !orphaned {
                    subject = Some(subject_text(&tokens[0]));
                }
                idx = 1;
            }
        }

        while idx + 1 < tokens.len() {
            let pred = &tokens[idx];
            let obj = &tokens[idx + 1];
            let accept = match predicate_like(pred) {
                Some(PredicateStrength::Strong) => true,
                Some(PredicateStrength::Weak) => object_strong(obj),
                None => false,
            };
            if accept {
                if subject.is_none() {
                    orphaned = true;
                }
                statements.push(Statement::new(predicate_text(pred), object_term(obj)));
                idx += 2;
            } else {
                idx += 1;
            }
        }
    }

    let subject = if orphaned || subject.is_none() {
        SYNTHETIC_SUBJECT.to_string()
    } else {
        subject.expect("checked above")
    };
    let mut set = TripleSet::new(subject);
    for statement in statements {
        set.push_unique(statement);
    }
    set
}

// ---------------------------------------------------------------------------
// Validation cascade
// ---------------------------------------------------------------------------

/// Four-way classification of a model output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeTag {
    Valid,
    Regex,
    Invalid,
    Empty,
}

impl OutcomeTag {
    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeTag::Valid => "valid",
            OutcomeTag::Regex => "regex",
            OutcomeTag::Invalid => "invalid",
            OutcomeTag::Empty => "empty",
        }
    }
}

impl fmt::Display for OutcomeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OutcomeTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "valid" => Ok(OutcomeTag::Valid),
            "regex" => Ok(OutcomeTag::Regex),
            "invalid" => Ok(OutcomeTag::Invalid),
            "empty" => Ok(OutcomeTag::Empty),
            other => Err(format!("unknown outcome tag {other:?}")),
        }
    }
}

/// Cascade result: the tag plus recovered triples for Valid/Regex outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationOutcome {
    pub tag: OutcomeTag,
    pub triples: Option<TripleSet>,
}

/// Runs the full cascade: clean, then strict parse, then regex recovery.
/// Exactly one tag applies to every input.
pub fn classify(raw: &str) -> ValidationOutcome {
    let cleaned = clean_output(raw);
    if cleaned.trim().is_empty() {
        return ValidationOutcome { tag: OutcomeTag::Empty, triples: None };
    }
    match parse_strict(&cleaned) {
        Ok(triples) => ValidationOutcome { tag: OutcomeTag::Valid, triples: Some(triples) },
        Err(_) => {
            let recovered = extract_regex(&cleaned);
            if recovered.is_empty() {
                ValidationOutcome { tag: OutcomeTag::Invalid, triples: None }
            } else {
                ValidationOutcome { tag: OutcomeTag::Regex, triples: Some(recovered) }
            }
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("validity percentage over an empty result set")]
pub struct ZeroTotal;

/// Percentage of fully valid outputs over the total result count.
pub fn validity_percentage(outcomes: &[OutcomeTag], total: usize) -> Result<f64, ZeroTotal> {
    if total == 0 {
        return Err(ZeroTotal);
    }
    let valid = outcomes.iter().filter(|t| **t == OutcomeTag::Valid).count();
    Ok(100.0 * valid as f64 / total as f64)
}
