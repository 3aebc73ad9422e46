//! AML abstract syntax.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Byte range plus the 1-based line and column of its start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ident {
    pub name: String,
    pub span: Span,
}

impl Ident {
    pub fn new(name: impl Into<String>) -> Self {
        Ident {
            name: name.into(),
            span: Span::default(),
        }
    }
}

/// Dotted module name such as `M.N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QName {
    pub segments: Vec<String>,
    pub span: Span,
}

impl QName {
    pub fn new<S: Into<String>>(segments: impl IntoIterator<Item = S>) -> Self {
        QName {
            segments: segments.into_iter().map(Into::into).collect(),
            span: Span::default(),
        }
    }
}

impl fmt::Display for QName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.segments.join("."))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pragma {
    pub key: String,
    pub value: String,
    pub span: Span,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub pragmas: Vec<Pragma>,
    pub members: Vec<Member>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Member {
    Module(ModuleDef),
    Import(Import),
    Class(ClassDef),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleDef {
    pub id: NodeId,
    pub span: Span,
    pub name: Ident,
    pub members: Vec<Member>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Import {
    pub id: NodeId,
    pub span: Span,
    pub target: QName,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtAcc {
    Public,
    Protected,
    Private,
}

impl ExtAcc {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtAcc::Public => "public",
            ExtAcc::Protected => "protected",
            ExtAcc::Private => "private",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extends {
    pub acc: ExtAcc,
    pub name: Ident,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassDef {
    pub id: NodeId,
    pub span: Span,
    pub name: Ident,
    pub extends: Option<Extends>,
    pub members: Vec<ClassMember>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClassMember {
    Field(Field),
    Class(ClassDef),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AccKeyword {
    Public,
    Internal(Vec<QNameKey>),
    Protected,
    ProtectedInternal(Vec<QNameKey>),
    Private,
    PrivateProtected(Vec<QNameKey>),
}

/// Span-free module name used inside keywords so keywords compare by text.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QNameKey(pub Vec<String>);

impl fmt::Display for QNameKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

impl AccKeyword {
    pub fn args(&self) -> &[QNameKey] {
        match self {
            AccKeyword::Internal(xs)
            | AccKeyword::ProtectedInternal(xs)
            | AccKeyword::PrivateProtected(xs) => xs,
            _ => &[],
        }
    }

    pub fn kind(&self) -> KeywordKind {
        match self {
            AccKeyword::Public => KeywordKind::Public,
            AccKeyword::Internal(_) => KeywordKind::Internal,
            AccKeyword::Protected => KeywordKind::Protected,
            AccKeyword::ProtectedInternal(_) => KeywordKind::ProtectedInternal,
            AccKeyword::Private => KeywordKind::Private,
            AccKeyword::PrivateProtected(_) => KeywordKind::PrivateProtected,
        }
    }
}

impl fmt::Display for AccKeyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let args = |xs: &[QNameKey]| {
            xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        };
        match self {
            AccKeyword::Public => f.write_str("public"),
            AccKeyword::Protected => f.write_str("protected"),
            AccKeyword::Private => f.write_str("private"),
            AccKeyword::Internal(xs) => write!(f, "internal({})", args(xs)),
            AccKeyword::ProtectedInternal(xs) => write!(f, "protected internal({})", args(xs)),
            AccKeyword::PrivateProtected(xs) => write!(f, "private protected({})", args(xs)),
        }
    }
}

/// Keyword without its module arguments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KeywordKind {
    Public,
    Internal,
    Protected,
    ProtectedInternal,
    Private,
    PrivateProtected,
}

/// A field modifier: a keyword, or a hole (`?`) awaiting synthesis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modifier {
    pub keyword: Option<AccKeyword>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Field {
    pub id: NodeId,
    pub span: Span,
    pub modifier: Modifier,
    pub name: Ident,
    pub init: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub id: NodeId,
    pub span: Span,
    pub kind: ExprKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Int(i64),
    Ref(Ident),
    New(Ident),
    Field(Box<Expr>, Ident),
    Add(Box<Expr>, Box<Expr>),
}

impl Program {
    /// Copy with all spans cleared and node ids renumbered in preorder, for
    /// comparing programs structurally.
    pub fn shape(&self) -> Program {
        let mut p = self.clone();
        let mut next = 0u32;
        let mut fresh = || {
            let id = NodeId(next);
            next += 1;
            id
        };
        for pragma in &mut p.pragmas {
            pragma.span = Span::default();
        }
        fn members(ms: &mut [Member], fresh: &mut dyn FnMut() -> NodeId) {
            for m in ms {
                match m {
                    Member::Module(md) => {
                        md.id = fresh();
                        md.span = Span::default();
                        md.name.span = Span::default();
                        members(&mut md.members, fresh);
                    }
                    Member::Import(i) => {
                        i.id = fresh();
                        i.span = Span::default();
                        i.target.span = Span::default();
                    }
                    Member::Class(c) => class(c, fresh),
                }
            }
        }
        fn class(c: &mut ClassDef, fresh: &mut dyn FnMut() -> NodeId) {
            c.id = fresh();
            c.span = Span::default();
            c.name.span = Span::default();
            if let Some(e) = &mut c.extends {
                e.span = Span::default();
                e.name.span = Span::default();
            }
            for m in &mut c.members {
                match m {
                    ClassMember::Field(f) => {
                        f.id = fresh();
                        f.span = Span::default();
                        f.modifier.span = Span::default();
                        f.name.span = Span::default();
                        expr(&mut f.init, fresh);
                    }
                    ClassMember::Class(inner) => class(inner, fresh),
                }
            }
        }
        fn expr(e: &mut Expr, fresh: &mut dyn FnMut() -> NodeId) {
            e.id = fresh();
            e.span = Span::default();
            match &mut e.kind {
                ExprKind::Int(_) => {}
                ExprKind::Ref(x) | ExprKind::New(x) => x.span = Span::default(),
                ExprKind::Field(inner, x) => {
                    expr(inner, fresh);
                    x.span = Span::default();
                }
                ExprKind::Add(a, b) => {
                    expr(a, fresh);
                    expr(b, fresh);
                }
            }
        }
        members(&mut p.members, &mut fresh);
        p
    }

    pub fn classes(&self) -> Vec<&ClassDef> {
        let mut out = Vec::new();
        fn in_class<'a>(c: &'a ClassDef, out: &mut Vec<&'a ClassDef>) {
            out.push(c);
            for m in &c.members {
                if let ClassMember::Class(inner) = m {
                    in_class(inner, out);
                }
            }
        }
        fn in_members<'a>(ms: &'a [Member], out: &mut Vec<&'a ClassDef>) {
            for m in ms {
                match m {
                    Member::Module(md) => in_members(&md.members, out),
                    Member::Class(c) => in_class(c, out),
                    Member::Import(_) => {}
                }
            }
        }
        in_members(&self.members, &mut out);
        out
    }

    pub fn fields(&self) -> Vec<&Field> {
        self.classes()
            .into_iter()
            .flat_map(|c| {
                c.members.iter().filter_map(|m| match m {
                    ClassMember::Field(f) => Some(f),
                    ClassMember::Class(_) => None,
                })
            })
            .collect()
    }

    pub fn field(&self, id: NodeId) -> Option<&Field> {
        self.fields().into_iter().find(|f| f.id == id)
    }

    pub fn field_mut(&mut self, id: NodeId) -> Option<&mut Field> {
        fn in_class(c: &mut ClassDef, id: NodeId) -> Option<&mut Field> {
            for m in &mut c.members {
                let found = match m {
                    ClassMember::Field(f) if f.id == id => Some(f),
                    ClassMember::Field(_) => None,
                    ClassMember::Class(inner) => in_class(inner, id),
                };
                if found.is_some() {
                    return found;
                }
            }
            None
        }
        fn in_members(ms: &mut [Member], id: NodeId) -> Option<&mut Field> {
            for m in ms {
                let found = match m {
                    Member::Module(md) => in_members(&mut md.members, id),
                    Member::Class(c) => in_class(c, id),
                    Member::Import(_) => None,
                };
                if found.is_some() {
                    return found;
                }
            }
            None
        }
        in_members(&mut self.members, id)
    }

    /// Fields whose modifier is a hole.
    pub fn holes(&self) -> Vec<NodeId> {
        self.fields()
            .into_iter()
            .filter(|f| f.modifier.keyword.is_none())
            .map(|f| f.id)
            .collect()
    }

    /// Every node id in the program, in preorder.
    pub fn node_ids(&self) -> Vec<NodeId> {
        let mut out = Vec::new();
        fn expr(e: &Expr, out: &mut Vec<NodeId>) {
            out.push(e.id);
            match &e.kind {
                ExprKind::Field(inner, _) => expr(inner, out),
                ExprKind::Add(a, b) => {
                    expr(a, out);
                    expr(b, out);
                }
                _ => {}
            }
        }
        fn class(c: &ClassDef, out: &mut Vec<NodeId>) {
            out.push(c.id);
            for m in &c.members {
                match m {
                    ClassMember::Field(f) => {
                        out.push(f.id);
                        expr(&f.init, out);
                    }
                    ClassMember::Class(inner) => class(inner, out),
                }
            }
        }
        fn members(ms: &[Member], out: &mut Vec<NodeId>) {
            for m in ms {
                match m {
                    Member::Module(md) => {
                        out.push(md.id);
                        members(&md.members, out);
                    }
                    Member::Import(i) => out.push(i.id),
                    Member::Class(c) => class(c, out),
                }
            }
        }
        members(&self.members, &mut out);
        out
    }
}
