//! Lexer and recursive-descent parser for `.aml` sources.

use std::fmt;

use thiserror::Error;

use crate::ast::*;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Kw(&'static str),
    Punct(char),
    Pragma(String, String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(x) => write!(f, "identifier `{x}`"),
            Tok::Int(n) => write!(f, "integer `{n}`"),
            Tok::Kw(k) => write!(f, "`{k}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Pragma(..) => f.write_str("pragma"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

const KEYWORDS: &[&str] = &[
    "module", "import", "class", "public", "protected", "private", "internal", "var", "new",
];

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{col}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub expected: Vec<String>,
    pub found: String,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek_char()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek_char() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.src[self.pos..].starts_with("//") => {
                    while !matches!(self.peek_char(), None | Some('\n')) {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    fn error(&self, expected: &str, found: String) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            expected: vec![expected.to_string()],
            found,
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Span)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let (start, line, col) = (self.pos, self.line, self.col);
            let span = |end: usize| Span { start, end, line, col };
            let Some(c) = self.peek_char() else {
                out.push((Tok::Eof, span(start)));
                return Ok(out);
            };
            let tok = if c == '#' {
                let end = self.src[start..].find('\n').map_or(self.src.len(), |i| start + i);
                let text = &self.src[start..end];
                let body = text
                    .strip_prefix("#pragma")
                    .filter(|rest| rest.starts_with(char::is_whitespace))
                    .ok_or_else(|| self.error("`#pragma`", format!("`{}`", text.trim())))?;
                let (key, value) = body
                    .split_once('=')
                    .ok_or_else(|| self.error("`key=value`", format!("`{}`", body.trim())))?;
                while self.pos < end {
                    self.bump();
                }
                Tok::Pragma(key.trim().to_string(), value.trim().to_string())
            } else if c.is_ascii_digit() {
                while self.peek_char().is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
                let text = &self.src[start..self.pos];
                let n = text
                    .parse()
                    .map_err(|_| self.error("integer literal", format!("`{text}`")))?;
                Tok::Int(n)
            } else if c.is_ascii_alphabetic() || c == '_' {
                while self
                    .peek_char()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
                {
                    self.bump();
                }
                let text = &self.src[start..self.pos];
                match KEYWORDS.iter().find(|k| **k == text) {
                    Some(k) => Tok::Kw(k),
                    None => Tok::Ident(text.to_string()),
                }
            } else if "{}():,.+=?".contains(c) {
                self.bump();
                Tok::Punct(c)
            } else {
                return Err(self.error("token", format!("`{c}`")));
            };
            out.push((tok, span(self.pos)));
        }
    }
}

struct Parser {
    toks: Vec<(Tok, Span)>,
    pos: usize,
    next_id: u32,
    allow_holes: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn span(&self) -> Span {
        self.toks[self.pos].1
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].1.end
        }
    }

    fn advance(&mut self) -> (Tok, Span) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fresh(&mut self) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        id
    }

    fn fail<T>(&self, expected: &[&str]) -> PResult<T> {
        let sp = self.span();
        Err(ParseError {
            line: sp.line,
            col: sp.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        })
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Kw(x) if *x == k)
    }

    fn punct(&mut self, c: char) -> PResult<()> {
        if self.is_punct(c) {
            self.advance();
            Ok(())
        } else {
            self.fail(&[&format!("`{c}`")])
        }
    }

    fn kw(&mut self, k: &str) -> PResult<()> {
        if self.is_kw(k) {
            self.advance();
            Ok(())
        } else {
            self.fail(&[&format!("`{k}`")])
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let (_, span) = self.advance();
                Ok(Ident { name, span })
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn qname(&mut self) -> PResult<QName> {
        let start = self.span();
        let mut segments = vec![self.ident()?.name];
        while self.is_punct('.') {
            self.advance();
            segments.push(self.ident()?.name);
        }
        Ok(QName {
            segments,
            span: Span { end: self.prev_end(), ..start },
        })
    }

    fn program(&mut self) -> PResult<Program> {
        let mut pragmas = Vec::new();
        while let Tok::Pragma(key, value) = self.peek().clone() {
            let (_, span) = self.advance();
            pragmas.push(Pragma { key, value, span });
        }
        let mut members = Vec::new();
        while *self.peek() != Tok::Eof {
            members.push(self.member()?);
        }
        Ok(Program { pragmas, members })
    }

    fn member(&mut self) -> PResult<Member> {
        match self.peek() {
            Tok::Kw("module") => self.module().map(Member::Module),
            Tok::Kw("import") => {
                let start = self.span();
                let id = self.fresh();
                self.advance();
                let target = self.qname()?;
                Ok(Member::Import(Import {
                    id,
                    span: Span { end: self.prev_end(), ..start },
                    target,
                }))
            }
            Tok::Kw("class") => self.class().map(Member::Class),
            _ => self.fail(&["`module`", "`import`", "`class`"]),
        }
    }

    fn module(&mut self) -> PResult<ModuleDef> {
        let start = self.span();
        let id = self.fresh();
        self.kw("module")?;
        let name = self.ident()?;
        self.punct('{')?;
        let mut members = Vec::new();
        while !self.is_punct('}') {
            if *self.peek() == Tok::Eof {
                return self.fail(&["`module`", "`import`", "`class`", "`}`"]);
            }
            members.push(self.member()?);
        }
        self.advance();
        Ok(ModuleDef {
            id,
            span: Span { end: self.prev_end(), ..start },
            name,
            members,
        })
    }

    fn class(&mut self) -> PResult<ClassDef> {
        let start = self.span();
        let id = self.fresh();
        self.kw("class")?;
        let name = self.ident()?;
        let extends = if self.is_punct(':') {
            self.advance();
            let ext_start = self.span();
            let acc = match self.peek() {
                Tok::Kw("public") => ExtAcc::Public,
                Tok::Kw("protected") => ExtAcc::Protected,
                Tok::Kw("private") => ExtAcc::Private,
                _ => return self.fail(&["`public`", "`protected`", "`private`"]),
            };
            self.advance();
            let sup = self.ident()?;
            Some(Extends {
                acc,
                name: sup,
                span: Span { end: self.prev_end(), ..ext_start },
            })
        } else {
            None
        };
        self.punct('{')?;
        let mut members = Vec::new();
        while !self.is_punct('}') {
            if self.is_kw("class") {
                members.push(ClassMember::Class(self.class()?));
            } else {
                members.push(ClassMember::Field(self.field()?));
            }
        }
        self.advance();
        Ok(ClassDef {
            id,
            span: Span { end: self.prev_end(), ..start },
            name,
            extends,
            members,
        })
    }

    fn module_args(&mut self) -> PResult<Vec<QNameKey>> {
        self.punct('(')?;
        let mut args = Vec::new();
        if !self.is_punct(')') {
            args.push(QNameKey(self.qname()?.segments));
            while self.is_punct(',') {
                self.advance();
                args.push(QNameKey(self.qname()?.segments));
            }
        }
        self.punct(')')?;
        Ok(args)
    }

    fn modifier(&mut self) -> PResult<Modifier> {
        let start = self.span();
        let keyword = match self.peek() {
            Tok::Kw("public") => {
                self.advance();
                Some(AccKeyword::Public)
            }
            Tok::Kw("internal") => {
                self.advance();
                Some(AccKeyword::Internal(self.module_args()?))
            }
            Tok::Kw("protected") => {
                self.advance();
                if self.is_kw("internal") {
                    self.advance();
                    Some(AccKeyword::ProtectedInternal(self.module_args()?))
                } else {
                    Some(AccKeyword::Protected)
                }
            }
            Tok::Kw("private") => {
                self.advance();
                if self.is_kw("protected") {
                    self.advance();
                    Some(AccKeyword::PrivateProtected(self.module_args()?))
                } else {
                    Some(AccKeyword::Private)
                }
            }
            Tok::Punct('?') if self.allow_holes => {
                self.advance();
                None
            }
            _ => {
                let mut expected = vec!["`public`", "`protected`", "`private`", "`internal`"];
                if self.allow_holes {
                    expected.push("`?`");
                }
                expected.extend(["`class`", "`}`"]);
                return self.fail(&expected);
            }
        };
        Ok(Modifier {
            keyword,
            span: Span { end: self.prev_end(), ..start },
        })
    }

    fn field(&mut self) -> PResult<Field> {
        let start = self.span();
        let id = self.fresh();
        let modifier = self.modifier()?;
        self.kw("var")?;
        let name = self.ident()?;
        self.punct('=')?;
        let init = self.expr()?;
        Ok(Field {
            id,
            span: Span { end: self.prev_end(), ..start },
            modifier,
            name,
            init,
        })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let start = self.span();
        let mut lhs = self.postfix()?;
        while self.is_punct('+') {
            self.advance();
            let rhs = self.postfix()?;
            lhs = Expr {
                id: self.fresh(),
                span: Span { end: self.prev_end(), ..start },
                kind: ExprKind::Add(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let start = self.span();
        let mut e = self.atom()?;
        while self.is_punct('.') {
            self.advance();
            let name = self.ident()?;
            e = Expr {
                id: self.fresh(),
                span: Span { end: self.prev_end(), ..start },
                kind: ExprKind::Field(Box::new(e), name),
            };
        }
        Ok(e)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let start = self.span();
        let kind = match self.peek().clone() {
            Tok::Int(n) => {
                self.advance();
                ExprKind::Int(n)
            }
            Tok::Ident(_) => ExprKind::Ref(self.ident()?),
            Tok::Kw("new") => {
                self.advance();
                let name = self.ident()?;
                self.punct('(')?;
                self.punct(')')?;
                ExprKind::New(name)
            }
            Tok::Punct('(') => {
                self.advance();
                let inner = self.expr()?;
                self.punct(')')?;
                return Ok(inner);
            }
            _ => return self.fail(&["integer", "identifier", "`new`", "`(`"]),
        };
        Ok(Expr {
            id: self.fresh(),
            span: Span { end: self.prev_end(), ..start },
            kind,
        })
    }
}

fn parse(text: &str, allow_holes: bool) -> Result<Program, ParseError> {
    let toks = Lexer { src: text, pos: 0, line: 1, col: 1 }.tokens()?;
    let mut p = Parser { toks, pos: 0, next_id: 0, allow_holes };
    p.program()
}

/// Parses a complete program. Modifier holes are rejected.
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    parse(text, false)
}

/// Parses a program that may contain `?` modifier holes.
pub fn parse_program_with_holes(text: &str) -> Result<Program, ParseError> {
    parse(text, true)
}
