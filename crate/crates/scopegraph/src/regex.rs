//! Regular expressions over edge labels.
//!
//! Matching works on residual languages: [`LabelRegex::step`] returns the
//! expression accepting every `w` such that `l · w` was accepted before. All
//! constructors canonicalize (flattened concatenation and alternation, sorted
//! and deduplicated alternatives, absorbed empty languages), so the set of
//! residuals reachable from one expression is finite and can be used as part
//! of a traversal's visited key.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use thiserror::Error;

use crate::EdgeLabel;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelRegex<L> {
    /// The empty language.
    Empty,
    /// The language containing only the empty word.
    Epsilon,
    Label(L),
    Concat(Vec<LabelRegex<L>>),
    Alt(Vec<LabelRegex<L>>),
    Star(Box<LabelRegex<L>>),
    Optional(Box<LabelRegex<L>>),
}

impl<L: EdgeLabel> LabelRegex<L> {
    pub fn label(l: L) -> Self {
        LabelRegex::Label(l)
    }

    pub fn concat<I: IntoIterator<Item = Self>>(parts: I) -> Self {
        let mut items = Vec::new();
        for part in parts {
            match part {
                LabelRegex::Empty => return LabelRegex::Empty,
                LabelRegex::Epsilon => {}
                LabelRegex::Concat(inner) => items.extend(inner),
                other => items.push(other),
            }
        }
        match items.len() {
            0 => LabelRegex::Epsilon,
            1 => items.pop().unwrap(),
            _ => LabelRegex::Concat(items),
        }
    }

    pub fn alt<I: IntoIterator<Item = Self>>(choices: I) -> Self {
        let mut items = Vec::new();
        for choice in choices {
            match choice {
                LabelRegex::Empty => {}
                LabelRegex::Alt(inner) => items.extend(inner),
                other => items.push(other),
            }
        }
        items.sort();
        items.dedup();
        match items.len() {
            0 => LabelRegex::Empty,
            1 => items.pop().unwrap(),
            _ => LabelRegex::Alt(items),
        }
    }

    pub fn star(inner: Self) -> Self {
        match inner {
            LabelRegex::Empty | LabelRegex::Epsilon => LabelRegex::Epsilon,
            LabelRegex::Star(_) => inner,
            LabelRegex::Optional(r) => LabelRegex::Star(r),
            other => LabelRegex::Star(Box::new(other)),
        }
    }

    pub fn optional(inner: Self) -> Self {
        match inner {
            LabelRegex::Empty | LabelRegex::Epsilon => LabelRegex::Epsilon,
            r if r.nullable() => r,
            r => LabelRegex::Optional(Box::new(r)),
        }
    }

    /// Whether the empty word is in the language.
    pub fn nullable(&self) -> bool {
        match self {
            LabelRegex::Empty | LabelRegex::Label(_) => false,
            LabelRegex::Epsilon | LabelRegex::Star(_) | LabelRegex::Optional(_) => true,
            LabelRegex::Concat(items) => items.iter().all(LabelRegex::nullable),
            LabelRegex::Alt(items) => items.iter().any(LabelRegex::nullable),
        }
    }

    /// Whether the language contains at least one word.
    pub fn nonempty_continuation(&self) -> bool {
        match self {
            LabelRegex::Empty => false,
            LabelRegex::Epsilon
            | LabelRegex::Label(_)
            | LabelRegex::Star(_)
            | LabelRegex::Optional(_) => true,
            LabelRegex::Concat(items) => items.iter().all(LabelRegex::nonempty_continuation),
            LabelRegex::Alt(items) => items.iter().any(LabelRegex::nonempty_continuation),
        }
    }

    /// Residual after consuming `l`.
    pub fn step(&self, l: L) -> Self {
        match self {
            LabelRegex::Empty | LabelRegex::Epsilon => LabelRegex::Empty,
            LabelRegex::Label(m) => {
                if *m == l {
                    LabelRegex::Epsilon
                } else {
                    LabelRegex::Empty
                }
            }
            LabelRegex::Concat(items) => {
                let (head, rest) = items.split_first().expect("canonical concat is non-empty");
                let rest_regex = LabelRegex::concat(rest.iter().cloned());
                let through_head =
                    LabelRegex::concat(std::iter::once(head.step(l)).chain(rest.iter().cloned()));
                if head.nullable() {
                    LabelRegex::alt([through_head, rest_regex.step(l)])
                } else {
                    through_head
                }
            }
            LabelRegex::Alt(items) => LabelRegex::alt(items.iter().map(|r| r.step(l))),
            LabelRegex::Star(inner) => LabelRegex::concat([inner.step(l), self.clone()]),
            LabelRegex::Optional(inner) => inner.step(l),
        }
    }

    pub fn matches(&self, word: &[L]) -> bool {
        let mut current = self.clone();
        for &l in word {
            current = current.step(l);
            if current == LabelRegex::Empty {
                return false;
            }
        }
        current.nullable()
    }

    /// Labels occurring anywhere in the expression.
    pub fn alphabet(&self) -> Vec<L> {
        fn collect<L: EdgeLabel>(r: &LabelRegex<L>, out: &mut Vec<L>) {
            match r {
                LabelRegex::Empty | LabelRegex::Epsilon => {}
                LabelRegex::Label(l) => out.push(*l),
                LabelRegex::Concat(items) | LabelRegex::Alt(items) => {
                    items.iter().for_each(|i| collect(i, out))
                }
                LabelRegex::Star(inner) | LabelRegex::Optional(inner) => collect(inner, out),
            }
        }
        let mut out = Vec::new();
        collect(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            LabelRegex::Alt(_) => 0,
            LabelRegex::Concat(_) => 1,
            LabelRegex::Star(_) | LabelRegex::Optional(_) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            f.write_str("(")?;
        }
        match self {
            LabelRegex::Empty => f.write_str("∅")?,
            LabelRegex::Epsilon => f.write_str("ε")?,
            LabelRegex::Label(l) => write!(f, "{l}")?,
            LabelRegex::Concat(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    item.fmt_at(f, 2)?;
                }
            }
            LabelRegex::Alt(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    item.fmt_at(f, 1)?;
                }
            }
            LabelRegex::Star(inner) => {
                inner.fmt_at(f, 3)?;
                f.write_str("*")?;
            }
            LabelRegex::Optional(inner) => {
                inner.fmt_at(f, 3)?;
                f.write_str("?")?;
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl<L: EdgeLabel> fmt::Display for LabelRegex<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

/// Interns residuals of one expression and memoizes their transitions.
///
/// Used by graph traversal so that each `(residual, label)` derivative is
/// computed once per query.
#[derive(Debug)]
pub struct ResidualCache<L> {
    states: Vec<LabelRegex<L>>,
    index: HashMap<LabelRegex<L>, usize>,
    transitions: HashMap<(usize, L), usize>,
}

impl<L: EdgeLabel> ResidualCache<L> {
    pub fn new(start: &LabelRegex<L>) -> Self {
        let mut cache = ResidualCache {
            states: Vec::new(),
            index: HashMap::new(),
            transitions: HashMap::new(),
        };
        cache.intern(start.clone());
        cache
    }

    /// State id of the starting expression.
    pub fn start(&self) -> usize {
        0
    }

    fn intern(&mut self, r: LabelRegex<L>) -> usize {
        if let Some(&id) = self.index.get(&r) {
            return id;
        }
        let id = self.states.len();
        self.states.push(r.clone());
        self.index.insert(r, id);
        id
    }

    pub fn step(&mut self, state: usize, l: L) -> usize {
        if let Some(&next) = self.transitions.get(&(state, l)) {
            return next;
        }
        let residual = self.states[state].step(l);
        let next = self.intern(residual);
        self.transitions.insert((state, l), next);
        next
    }

    pub fn regex(&self, state: usize) -> &LabelRegex<L> {
        &self.states[state]
    }

    pub fn nullable(&self, state: usize) -> bool {
        self.states[state].nullable()
    }

    pub fn is_live(&self, state: usize) -> bool {
        self.states[state].nonempty_continuation()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("regex syntax error at offset {position}: {message}")]
pub struct RegexParseError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    Star,
    Question,
    Bar,
    LParen,
    RParen,
    Epsilon,
    Empty,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, RegexParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '*' | '?' | '|' | '(' | ')' | 'ε' | '∅' => {
                chars.next();
                let tok = match c {
                    '*' => Token::Star,
                    '?' => Token::Question,
                    '|' => Token::Bar,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    'ε' => Token::Epsilon,
                    _ => Token::Empty,
                };
                tokens.push((pos, tok));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut ident = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        ident.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push((pos, Token::Ident(ident)));
            }
            other => {
                return Err(RegexParseError {
                    position: pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser<L> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    _label: std::marker::PhantomData<L>,
}

impl<L: EdgeLabel + FromStr> Parser<L> {
    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn error(&self, message: impl Into<String>) -> RegexParseError {
        RegexParseError {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn alternation(&mut self) -> Result<LabelRegex<L>, RegexParseError> {
        let mut choices = vec![self.concatenation()?];
        while self.peek() == Some(&Token::Bar) {
            self.pos += 1;
            choices.push(self.concatenation()?);
        }
        Ok(LabelRegex::alt(choices))
    }

    fn concatenation(&mut self) -> Result<LabelRegex<L>, RegexParseError> {
        let mut parts = Vec::new();
        while matches!(
            self.peek(),
            Some(Token::Ident(_) | Token::LParen | Token::Epsilon | Token::Empty)
        ) {
            parts.push(self.postfix()?);
        }
        if parts.is_empty() {
            return Err(self.error("expected a label, `(`, `ε` or `∅`"));
        }
        Ok(LabelRegex::concat(parts))
    }

    fn postfix(&mut self) -> Result<LabelRegex<L>, RegexParseError> {
        let mut r = self.atom()?;
        loop {
            match self.peek() {
                Some(Token::Star) => r = LabelRegex::star(r),
                Some(Token::Question) => r = LabelRegex::optional(r),
                _ => break,
            }
            self.pos += 1;
        }
        Ok(r)
    }

    fn atom(&mut self) -> Result<LabelRegex<L>, RegexParseError> {
        let start = self.offset();
        match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Token::Ident(name)) => {
                self.pos += 1;
                name.parse::<L>()
                    .map(LabelRegex::Label)
                    .map_err(|_| RegexParseError {
                        position: start,
                        message: format!("unknown label `{name}`"),
                    })
            }
            Some(Token::Epsilon) => {
                self.pos += 1;
                Ok(LabelRegex::Epsilon)
            }
            Some(Token::Empty) => {
                self.pos += 1;
                Ok(LabelRegex::Empty)
            }
            Some(Token::LParen) => {
                self.pos += 1;
                if self.peek() == Some(&Token::RParen) {
                    self.pos += 1;
                    return Ok(LabelRegex::Epsilon);
                }
                let inner = self.alternation()?;
                if self.peek() != Some(&Token::RParen) {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.error("expected a label, `(`, `ε` or `∅`")),
        }
    }
}

/// Parses the textual notation: label names, postfix `*` and `?`, infix `|`,
/// juxtaposition for concatenation, parentheses, `ε` and `∅`.
pub fn parse_regex<L: EdgeLabel + FromStr>(text: &str) -> Result<LabelRegex<L>, RegexParseError> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
        _label: std::marker::PhantomData,
    };
    let r = parser.alternation()?;
    if parser.pos != parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(r)
}

impl<L: EdgeLabel + FromStr> FromStr for LabelRegex<L> {
    type Err = RegexParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_regex(s)
    }
}
