use std::fmt;

use scopegraph::{Label, ScopeGraph, ScopeId};

use crate::ast::NodeId;
use crate::policy::Policy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Type {
    Int,
    Inst(ScopeId),
    /// Stands in for a type that could not be computed; never reported twice.
    Error,
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Int => f.write_str("int"),
            Type::Inst(s) => write!(f, "inst {s}"),
            Type::Error => f.write_str("<error>"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VarDecl {
    pub name: String,
    pub ty: Type,
    pub policy: Policy,
    /// The field that introduced this declaration.
    pub field: NodeId,
}

/// Declaration payloads of AML scope graphs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Decl {
    Mod { name: String, scope: ScopeId },
    Cls { name: String, scope: ScopeId },
    Var(VarDecl),
    /// Carried by THIS_M and THIS_C declarations: the owning scope.
    Scope(ScopeId),
}

impl Decl {
    pub fn is_mod(&self, x: &str) -> bool {
        matches!(self, Decl::Mod { name, .. } if name == x)
    }

    pub fn is_cls(&self, x: &str) -> bool {
        matches!(self, Decl::Cls { name, .. } if name == x)
    }

    pub fn is_var(&self, x: &str) -> bool {
        matches!(self, Decl::Var(v) if v.name == x)
    }

    pub fn as_var(&self) -> Option<&VarDecl> {
        match self {
            Decl::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Scope introduced by a module or class declaration, or carried by a
    /// THIS declaration.
    pub fn body(&self) -> Option<ScopeId> {
        match self {
            Decl::Mod { scope, .. } | Decl::Cls { scope, .. } | Decl::Scope(scope) => Some(*scope),
            Decl::Var(_) => None,
        }
    }
}

pub type AmlGraph = ScopeGraph<Label, Decl>;
pub type AmlPath = scopegraph::Path<Label>;

/// One-line description used for DOT boxes and debug output.
pub fn describe(g: &AmlGraph, d: &Decl) -> String {
    match d {
        Decl::Mod { name, .. } => format!("mod {name}"),
        Decl::Cls { name, .. } => format!("class {name}"),
        Decl::Var(v) => format!("var {} : {} @ {}", v.name, v.ty, v.policy.display(g)),
        Decl::Scope(s) => g.name(*s).to_string(),
    }
}

/// DOT rendering. THIS declarations are omitted since they point back at
/// their own scope.
pub fn graph_to_dot(g: &AmlGraph) -> String {
    scopegraph::dot::to_dot(g, |l, d| match l {
        Label::ThisM | Label::ThisC => None,
        _ => Some(describe(g, d)),
    })
}
