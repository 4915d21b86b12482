//! Surface syntax for concepts and knowledge-base files.
//!
//! ```text
//! concept := disj ;  disj := conj ("|" conj)* ;  conj := unary ("&" unary)* ;
//! unary   := "!" unary | "some" ROLE "." unary | "only" ROLE "." unary | atom ;
//! atom    := ATOMNAME | "top" | "bot" | "(" concept ")" .
//! ```
//!
//! Atom names match `[A-Z][A-Za-z0-9_]*`. Role names match `[a-z][A-Za-z0-9_]*`,
//! and after `some`/`only` an upper-case name is read as a role too.
//! `#` starts a comment that runs to the end of the line.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::concept::Concept;
use crate::kb::{check_acyclic, KnowledgeBase};

const KEYWORDS: [&str; 6] = ["top", "bot", "some", "only", "def", "gci"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    SyntaxError,
    DuplicateDefinition,
    CyclicDefinition,
    UnknownToken,
}

impl fmt::Display for DiagnosticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagnosticKind::SyntaxError => "syntax-error",
            DiagnosticKind::DuplicateDefinition => "duplicate-definition",
            DiagnosticKind::CyclicDefinition => "cyclic-definition",
            DiagnosticKind::UnknownToken => "unknown-token",
        })
    }
}

/// A positioned parse or well-formedness error. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[error("{line}:{column}: {kind}: {message}")]
pub struct ParseDiagnostic {
    pub kind: DiagnosticKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub cycle_path: Option<Vec<String>>,
}

impl ParseDiagnostic {
    fn new(kind: DiagnosticKind, pos: Pos, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            kind,
            line: pos.line,
            column: pos.column,
            message: message.into(),
            cycle_path: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Bang,
    Amp,
    Pipe,
    LParen,
    RParen,
    Dot,
    Eq,
    Leq,
    AtomName(String),
    RoleName(String),
    Keyword(&'static str),
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Bang => f.write_str("`!`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Leq => f.write_str("`<=`"),
            Tok::AtomName(n) | Tok::RoleName(n) => write!(f, "`{n}`"),
            Tok::Keyword(k) => write!(f, "keyword `{k}`"),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, Pos)>, ParseDiagnostic> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, column };
        match ch {
            '\n' => {
                chars.next();
                out.push((Tok::Newline, pos));
                line += 1;
                column = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                column += 1;
                continue;
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    column += 1;
                }
                continue;
            }
            _ => {}
        }
        let simple = match ch {
            '!' => Some(Tok::Bang),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '.' => Some(Tok::Dot),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(tok) = simple {
            chars.next();
            column += 1;
            out.push((tok, pos));
            continue;
        }
        if ch == '<' {
            chars.next();
            column += 1;
            if chars.peek() == Some(&'=') {
                chars.next();
                column += 1;
                out.push((Tok::Leq, pos));
                continue;
            }
            return Err(ParseDiagnostic::new(
                DiagnosticKind::UnknownToken,
                pos,
                "unknown token `<` (did you mean `<=`?)",
            ));
        }
        if ch.is_ascii_alphabetic() {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                    column += 1;
                } else {
                    break;
                }
            }
            let tok = if ch.is_ascii_uppercase() {
                Tok::AtomName(word)
            } else if let Some(k) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Keyword(k)
            } else {
                Tok::RoleName(word)
            };
            out.push((tok, pos));
            continue;
        }
        return Err(ParseDiagnostic::new(
            DiagnosticKind::UnknownToken,
            pos,
            format!("unknown token `{}`", ch.escape_debug()),
        ));
    }
    out.push((Tok::Eof, Pos { line, column }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseDiagnostic {
        ParseDiagnostic::new(
            DiagnosticKind::SyntaxError,
            self.pos(),
            format!("expected {expected}, found {}", self.peek()),
        )
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Pos, ParseDiagnostic> {
        if *self.peek() == tok {
            Ok(self.bump().1)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn concept(&mut self) -> Result<Concept, ParseDiagnostic> {
        let mut parts = vec![self.conj()?];
        while *self.peek() == Tok::Pipe {
            self.bump();
            parts.push(self.conj()?);
        }
        Ok(Concept::disjunction(parts))
    }

    fn conj(&mut self) -> Result<Concept, ParseDiagnostic> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(Concept::conjunction(parts))
    }

    fn unary(&mut self) -> Result<Concept, ParseDiagnostic> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Concept::not(self.unary()?))
            }
            Tok::Keyword(q @ ("some" | "only")) => {
                self.bump();
                let role = match self.peek().clone() {
                    Tok::RoleName(r) | Tok::AtomName(r) => {
                        self.bump();
                        r
                    }
                    _ => return Err(self.unexpected("a role name")),
                };
                self.expect(Tok::Dot, "`.`")?;
                let filler = self.unary()?;
                Ok(if q == "some" {
                    Concept::exists(role, filler)
                } else {
                    Concept::forall(role, filler)
                })
            }
            Tok::Keyword("top") => {
                self.bump();
                Ok(Concept::Top)
            }
            Tok::Keyword("bot") => {
                self.bump();
                Ok(Concept::Bot)
            }
            Tok::AtomName(name) => {
                self.bump();
                Ok(Concept::Atom(name))
            }
            Tok::LParen => {
                self.bump();
                let c = self.concept()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            _ => Err(self.unexpected("a concept")),
        }
    }
}

/// Parse a single concept. Line breaks count as whitespace.
pub fn parse_concept(src: &str) -> Result<Concept, ParseDiagnostic> {
    let toks = lex(src)?
        .into_iter()
        .filter(|(t, _)| *t != Tok::Newline)
        .collect();
    let mut p = Parser { toks, at: 0 };
    let c = p.concept()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("an operator or end of input"));
    }
    Ok(c)
}

/// Parse a knowledge-base file: one `def ATOM = concept` or
/// `gci concept <= concept` statement per line.
pub fn parse_knowledge_base(src: &str) -> Result<KnowledgeBase, ParseDiagnostic> {
    let toks = lex(src)?;
    let mut p = Parser { toks, at: 0 };
    let mut definitions: Vec<(String, Concept)> = Vec::new();
    let mut def_pos: Vec<Pos> = Vec::new();
    let mut gcis = Vec::new();
    loop {
        match p.peek().clone() {
            Tok::Eof => break,
            Tok::Newline => {
                p.bump();
                continue;
            }
            Tok::Keyword("def") => {
                let start = p.bump().1;
                let (name, name_pos) = match p.peek().clone() {
                    Tok::AtomName(n) => (n, p.bump().1),
                    _ => return Err(p.unexpected("an atomic concept name")),
                };
                p.expect(Tok::Eq, "`=`")?;
                let body = p.concept()?;
                if definitions.iter().any(|(n, _)| *n == name) {
                    return Err(ParseDiagnostic::new(
                        DiagnosticKind::DuplicateDefinition,
                        name_pos,
                        format!("`{name}` is defined more than once"),
                    ));
                }
                definitions.push((name, body));
                def_pos.push(start);
            }
            Tok::Keyword("gci") => {
                p.bump();
                let lhs = p.concept()?;
                p.expect(Tok::Leq, "`<=`")?;
                let rhs = p.concept()?;
                gcis.push((lhs, rhs));
            }
            _ => return Err(p.unexpected("`def`, `gci`, a comment or a blank line")),
        }
        match p.peek() {
            Tok::Newline | Tok::Eof => {}
            _ => return Err(p.unexpected("end of line")),
        }
    }
    if let Err(cycle) = check_acyclic(&definitions) {
        let first = &cycle[0];
        let idx = definitions
            .iter()
            .position(|(n, _)| n == first)
            .unwrap_or(0);
        let mut diag = ParseDiagnostic::new(
            DiagnosticKind::CyclicDefinition,
            def_pos[idx],
            format!("cyclic definitions: {}", cycle.join(" -> ")),
        );
        diag.cycle_path = Some(cycle);
        return Err(diag);
    }
    KnowledgeBase::new(definitions, gcis).map_err(|e| ParseDiagnostic {
        kind: DiagnosticKind::SyntaxError,
        line: 1,
        column: 1,
        message: e.to_string(),
        cycle_path: None,
    })
}

/// Canonical text with minimal parentheses; `parse_concept` inverts it.
pub fn print_concept(c: &Concept) -> String {
    let mut out = String::new();
    write_concept(c, &mut out);
    out
}

fn write_concept(c: &Concept, out: &mut String) {
    match c {
        Concept::Atom(a) => out.push_str(a),
        Concept::Top => out.push_str("top"),
        Concept::Bot => out.push_str("bot"),
        Concept::Not(d) => {
            out.push('!');
            write_operand(d, out);
        }
        Concept::Exists(r, d) | Concept::Forall(r, d) => {
            out.push_str(if matches!(c, Concept::Exists(..)) {
                "some "
            } else {
                "only "
            });
            out.push_str(r);
            out.push_str(". ");
            write_operand(d, out);
        }
        Concept::And(a, b) => {
            // right-associated: a left operand that is itself binary needs parens
            write_wrapped(a, matches!(**a, Concept::And(..) | Concept::Or(..)), out);
            out.push_str(" & ");
            write_wrapped(b, matches!(**b, Concept::Or(..)), out);
        }
        Concept::Or(a, b) => {
            write_wrapped(a, matches!(**a, Concept::Or(..)), out);
            out.push_str(" | ");
            write_concept(b, out);
        }
    }
}

fn write_operand(c: &Concept, out: &mut String) {
    write_wrapped(c, matches!(c, Concept::And(..) | Concept::Or(..)), out);
}

fn write_wrapped(c: &Concept, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_concept(c, out);
        out.push(')');
    } else {
        write_concept(c, out);
    }
}

/// Serialize a knowledge base in the file format read by
/// [`parse_knowledge_base`].
pub fn print_knowledge_base(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    for (name, body) in &kb.definitions {
        out.push_str(&format!("def {name} = {}\n", print_concept(body)));
    }
    for (lhs, rhs) in &kb.gcis {
        out.push_str(&format!(
            "gci {} <= {}\n",
            print_concept(lhs),
            print_concept(rhs)
        ));
    }
    out
}
