//! Executable soundness checks for private, protected and internal access.
//!
//! These re-derive the consequents straight from the graph by walking LEX
//! and inheritance edges, without going through [`crate::access`].

use std::collections::BTreeSet;
use std::fmt;

use scopegraph::{Label, ScopeId};
use serde::Serialize;

use crate::ast::{KeywordKind, NodeId};
use crate::checker::{Binding, Code, Elaboration};
use crate::config::{ReferenceRule, VariantConfig};
use crate::decl::{AmlGraph, Decl};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    Private,
    Protected,
    Internal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub theorem: Theorem,
    pub reference: NodeId,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} soundness violated at {}: {}", self.theorem, self.reference, self.message)
    }
}

/// `s` followed by its lexical ancestors, innermost first.
fn lexical_chain(g: &AmlGraph, s: ScopeId) -> Vec<ScopeId> {
    let mut out = vec![s];
    let mut cur = s;
    while let Some((_, parent)) = g.edges(cur).find(|(l, _)| *l == Label::Lex) {
        if out.contains(&parent) {
            break;
        }
        out.push(parent);
        cur = parent;
    }
    out
}

fn has_this(g: &AmlGraph, s: ScopeId, label: Label) -> bool {
    g.decls(s).any(|(l, d)| l == label && *d == Decl::Scope(s))
}

fn classes_around(g: &AmlGraph, s: ScopeId) -> Vec<ScopeId> {
    lexical_chain(g, s).into_iter().filter(|x| has_this(g, *x, Label::ThisC)).collect()
}

fn modules_around(g: &AmlGraph, s: ScopeId) -> Vec<ScopeId> {
    lexical_chain(g, s).into_iter().filter(|x| has_this(g, *x, Label::ThisM)).collect()
}

/// `c` reaches `d` over zero or more inheritance edges of any kind.
pub fn sub_class(g: &AmlGraph, c: ScopeId, d: ScopeId) -> bool {
    let mut seen = BTreeSet::new();
    let mut stack = vec![c];
    while let Some(x) = stack.pop() {
        if x == d {
            return true;
        }
        if seen.insert(x) {
            stack.extend(g.edges(x).filter(|(l, _)| l.is_extension()).map(|(_, t)| t));
        }
    }
    false
}

struct Ctx<'a> {
    g: &'a AmlGraph,
    cfg: &'a VariantConfig,
}

impl Ctx<'_> {
    fn private_clause(&self, r: ScopeId, def: ScopeId) -> bool {
        let around = classes_around(self.g, r);
        around.contains(&def)
            || (self.cfg.private_shared_enclosing
                && classes_around(self.g, def).iter().any(|c| around.contains(c)))
    }

    fn protected_clause(&self, r: ScopeId, def: ScopeId) -> bool {
        classes_around(self.g, r).into_iter().any(|c| sub_class(self.g, c, def))
    }

    fn internal_clause(&self, r: ScopeId, mods: &BTreeSet<ScopeId>) -> bool {
        let around = modules_around(self.g, r);
        match self.cfg.internal_reference_rule {
            ReferenceRule::Innermost => around.first().is_some_and(|m| mods.contains(m)),
            ReferenceRule::AnyEnclosing => around.iter().any(|m| mods.contains(m)),
        }
    }
}

fn check_binding(ctx: &Ctx<'_>, kind: KeywordKind, b: &Binding) -> Option<(Theorem, String)> {
    let def = b.path.tgt();
    let r = b.scope;
    let theorem = match kind {
        KeywordKind::Public => return None,
        KeywordKind::Private => Theorem::Private,
        KeywordKind::Protected => Theorem::Protected,
        _ => Theorem::Internal,
    };
    if !ctx.g.has_decl(def, Label::Var, &Decl::Var(b.decl.clone())) {
        return Some((theorem, format!("`{}` is not declared in {}", b.decl.name, ctx.g.name(def))));
    }
    let empty = BTreeSet::new();
    let mods = b.decl.policy.module_set().unwrap_or(&empty);
    let private = ctx.private_clause(r, def);
    let ok = match kind {
        KeywordKind::Public => true,
        KeywordKind::Private => private,
        KeywordKind::Protected => private || ctx.protected_clause(r, def),
        KeywordKind::Internal => private || ctx.internal_clause(r, mods),
        KeywordKind::ProtectedInternal => {
            private || ctx.protected_clause(r, def) || ctx.internal_clause(r, mods)
        }
        KeywordKind::PrivateProtected => {
            private || (ctx.protected_clause(r, def) && ctx.internal_clause(r, mods))
        }
    };
    (!ok).then(|| {
        (
            theorem,
            format!(
                "`{}` defined in {} reached from {}",
                b.decl.name,
                ctx.g.name(def),
                ctx.g.name(r)
            ),
        )
    })
}

/// Only references the checker accepted are examined: a binding with an
/// access diagnostic at its span makes no claim.
fn verify(e: &Elaboration, cfg: &VariantConfig, only: Option<Theorem>) -> Vec<Violation> {
    let ctx = Ctx { g: &e.graph, cfg };
    let rejected = |b: &Binding| {
        e.diagnostics
            .iter()
            .any(|d| d.span == b.span && matches!(d.code, Code::Inaccessible | Code::PathHidden))
    };
    e.bindings
        .values()
        .filter(|b| !rejected(b))
        .filter_map(|b| {
            let kind = e.fields.get(&b.decl.field)?.keyword.as_ref()?.kind();
            let (theorem, message) = check_binding(&ctx, kind, b)?;
            (only.is_none() || only == Some(theorem)).then_some(Violation {
                theorem,
                reference: b.reference,
                message,
            })
        })
        .collect()
}

/// Private members are only reached from inside their defining class (or,
/// with shared-enclosing access, from a class sharing an enclosing class).
pub fn verify_private_soundness(e: &Elaboration, cfg: &VariantConfig) -> Vec<Violation> {
    verify(e, cfg, Some(Theorem::Private))
}

/// Protected members are only reached from a subclass of their definer, or
/// through the private clause.
pub fn verify_protected_soundness(e: &Elaboration, cfg: &VariantConfig) -> Vec<Violation> {
    verify(e, cfg, Some(Theorem::Protected))
}

/// Internal members (and both combinations) are only reached from inside a
/// named module under the configured rule, or through the other clauses.
pub fn verify_internal_soundness(e: &Elaboration, cfg: &VariantConfig) -> Vec<Violation> {
    verify(e, cfg, Some(Theorem::Internal))
}

pub fn verify_all(e: &Elaboration, cfg: &VariantConfig) -> Vec<Violation> {
    verify(e, cfg, None)
}
