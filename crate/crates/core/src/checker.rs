//! Staged elaboration of AML programs into scope graphs, typing and
//! reference checking.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use scopegraph::{
    minimize, reachable, resolve, Candidate, CandidateOrder, Comparison, Label, LabelOrder,
    LabelRegex, ScopeGraph, ScopeId,
};
use serde::Serialize;

use crate::access::{enclosing_modules, path_permits, permits};
use crate::ast::*;
use crate::config::{ResolutionMode, VariantConfig};
use crate::decl::{AmlGraph, AmlPath, Decl, Type, VarDecl};
use crate::policy::{Policy, ScopeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Code {
    #[serde(rename = "E_UNRESOLVED")]
    Unresolved,
    #[serde(rename = "E_AMBIGUOUS")]
    Ambiguous,
    #[serde(rename = "E_INACCESSIBLE")]
    Inaccessible,
    #[serde(rename = "E_PATH_HIDDEN")]
    PathHidden,
    #[serde(rename = "E_CYCLIC_TYPE")]
    CyclicType,
    #[serde(rename = "E_TYPE_MISMATCH")]
    TypeMismatch,
    #[serde(rename = "E_BAD_INTERNAL_ARG")]
    BadInternalArg,
    #[serde(rename = "E_UNSUPPORTED")]
    Unsupported,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Unresolved => "E_UNRESOLVED",
            Code::Ambiguous => "E_AMBIGUOUS",
            Code::Inaccessible => "E_INACCESSIBLE",
            Code::PathHidden => "E_PATH_HIDDEN",
            Code::CyclicType => "E_CYCLIC_TYPE",
            Code::TypeMismatch => "E_TYPE_MISMATCH",
            Code::BadInternalArg => "E_BAD_INTERNAL_ARG",
            Code::Unsupported => "E_UNSUPPORTED",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathInfo {
    pub scopes: Vec<String>,
    pub labels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub span: Span,
    pub code: Code,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathInfo>,
    /// Field whose declaration the diagnostic concerns: the binding target
    /// for access errors, the declaring field for modifier errors.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<NodeId>,
}

impl Diagnostic {
    fn new(span: Span, code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            span,
            code,
            message: message.into(),
            policy: None,
            path: None,
            field: None,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}:{}", self.span.line, self.span.col, self.code, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RefKind {
    /// A bare name, resolved lexically and through inheritance.
    Lexical,
    /// `e.x`, resolved in the receiver's class.
    Member,
}

/// A resolved variable reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Binding {
    pub reference: NodeId,
    pub span: Span,
    pub kind: RefKind,
    /// Scope the reference occurs in; accessibility is judged from here.
    pub scope: ScopeId,
    pub path: AmlPath,
    pub decl: VarDecl,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldInfo {
    pub name: String,
    pub class: ScopeId,
    pub keyword: Option<AccKeyword>,
    pub modifier_span: Span,
    pub policy: Policy,
    pub ty: Type,
}

/// Result of checking a program.
#[derive(Clone, Debug)]
pub struct Elaboration {
    pub graph: AmlGraph,
    pub root: ScopeId,
    pub bindings: BTreeMap<NodeId, Binding>,
    pub diagnostics: Vec<Diagnostic>,
    pub fields: BTreeMap<NodeId, FieldInfo>,
    /// Scope of each module and class definition.
    pub scopes: BTreeMap<NodeId, ScopeId>,
    /// Qualified names of module scopes (the root excluded).
    pub modules: BTreeMap<ScopeId, Vec<String>>,
}

impl Elaboration {
    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn path_info(&self, p: &AmlPath) -> PathInfo {
        path_info(&self.graph, p)
    }

    pub fn diagnostics_text(&self) -> String {
        self.diagnostics.iter().map(|d| format!("{d}\n")).collect()
    }
}

fn path_info(g: &AmlGraph, p: &AmlPath) -> PathInfo {
    PathInfo {
        scopes: p.scopes().iter().map(|s| g.name(*s).to_string()).collect(),
        labels: p.labels().iter().map(|l| l.to_string()).collect(),
    }
}

pub fn path_text(g: &AmlGraph, p: &AmlPath) -> String {
    let mut out = g.name(p.src()).to_string();
    for (l, s) in p.steps() {
        out.push_str(&format!(" -{l}-> {}", g.name(*s)));
    }
    out
}

struct Queries {
    q_mod: LabelRegex<Label>,
    q_mod_step: LabelRegex<Label>,
    q_cls: LabelRegex<Label>,
    t_var: LabelRegex<Label>,
    t_var_inh: LabelRegex<Label>,
    t_fld: LabelRegex<Label>,
    t_fld_inh: LabelRegex<Label>,
    mod_order: LabelOrder<Label>,
    cls_order: LabelOrder<Label>,
    var_order: LabelOrder<Label>,
    fld_order: LabelOrder<Label>,
}

fn queries() -> &'static Queries {
    static Q: OnceLock<Queries> = OnceLock::new();
    Q.get_or_init(|| {
        let p = |t: &str| scopegraph::parse_regex(t).expect("built-in regex");
        let o = |t: &str| t.parse::<LabelOrder<Label>>().expect("built-in order");
        Queries {
            q_mod: p("LEX* MOD"),
            q_mod_step: p("MOD"),
            q_cls: p("LEX* IMP? CLS"),
            t_var: p("LEX* EXT* VAR"),
            t_var_inh: p("LEX* (EXT|EXT_PRT|EXT_PRV)* VAR"),
            t_fld: p("EXT* VAR"),
            t_fld_inh: p("(EXT|EXT_PRT|EXT_PRV)* VAR"),
            mod_order: o("MOD < LEX"),
            cls_order: o("CLS < IMP < LEX"),
            var_order: o("VAR < EXT < LEX, VAR < EXT_PRT < LEX, VAR < EXT_PRV < LEX"),
            fld_order: o("VAR < EXT, VAR < EXT_PRT, VAR < EXT_PRV"),
        }
    })
}

pub type AmlCandidate = Candidate<Label, Decl>;

/// Resolves a possibly qualified module name from `s`: the first segment
/// lexically, later segments as direct submodules. Returns every match of
/// the final segment.
pub fn resolve_module(g: &AmlGraph, s: ScopeId, name: &[String]) -> Vec<ScopeId> {
    let q = queries();
    let Some((first, rest)) = name.split_first() else {
        return Vec::new();
    };
    let order = CandidateOrder::Labels(q.mod_order.clone());
    let mut current: Vec<ScopeId> = resolve(g, s, &q.q_mod, &|d: &Decl| d.is_mod(first), &order)
        .into_iter()
        .filter_map(|c| c.data.body())
        .collect();
    for seg in rest {
        if current.len() != 1 {
            break;
        }
        current = resolve(g, current[0], &q.q_mod_step, &|d: &Decl| d.is_mod(seg), &CandidateOrder::None)
            .into_iter()
            .filter_map(|c| c.data.body())
            .collect();
    }
    current
}

pub fn resolve_class(g: &AmlGraph, s: ScopeId, name: &str) -> Vec<ScopeId> {
    let q = queries();
    resolve(g, s, &q.q_cls, &|d: &Decl| d.is_cls(name), &CandidateOrder::Labels(q.cls_order.clone()))
        .into_iter()
        .filter_map(|c| c.data.body())
        .collect()
}

/// Every candidate a bare variable reference in `s` can reach, before
/// shadowing.
pub fn lexical_candidates(g: &AmlGraph, s: ScopeId, name: &str, cfg: &VariantConfig) -> Vec<AmlCandidate> {
    let q = queries();
    let regex = if cfg.inheritance_modifiers { &q.t_var_inh } else { &q.t_var };
    reachable(g, s, regex, &|d: &Decl| d.is_var(name))
}

/// Candidates for a bare variable reference in scope `s`.
pub fn resolve_var_lexical(g: &AmlGraph, s: ScopeId, name: &str, cfg: &VariantConfig) -> Vec<AmlCandidate> {
    let cands = lexical_candidates(g, s, name, cfg);
    match cfg.resolution_mode {
        ResolutionMode::LabelOrder => {
            minimize(cands, &CandidateOrder::Labels(queries().var_order.clone()))
        }
        ResolutionMode::FullPathOrder => {
            let cmp = |a: &AmlCandidate, b: &AmlCandidate| full_path_compare(g, s, a, b, cfg);
            minimize_by_prefix(cands, &cmp)
        }
    }
}

/// Candidates for `e.name` where `e` has type `inst receiver`.
pub fn resolve_var_member(g: &AmlGraph, receiver: ScopeId, name: &str, cfg: &VariantConfig) -> Vec<AmlCandidate> {
    let q = queries();
    let regex = if cfg.inheritance_modifiers { &q.t_fld_inh } else { &q.t_fld };
    resolve(g, receiver, regex, &|d: &Decl| d.is_var(name), &CandidateOrder::Labels(q.fld_order.clone()))
}

fn accessible_candidate(g: &AmlGraph, s_r: ScopeId, c: &AmlCandidate, cfg: &VariantConfig) -> bool {
    match &c.data {
        Decl::Var(v) => permits(g, s_r, &c.path, &v.policy, cfg) && path_permits(g, s_r, &c.path, cfg),
        _ => false,
    }
}

/// The accessibility-aware order on variable candidates from `s_r`.
///
/// Walks both paths in lockstep. A path that stops first wins; equal steps
/// recurse; an inheritance step beats a lexical step from the same scope
/// exactly when the inheriting candidate is accessible from `s_r` (policy
/// and path). Any other pair of first differing steps is incomparable.
pub fn full_path_compare(
    g: &AmlGraph,
    s_r: ScopeId,
    a: &AmlCandidate,
    b: &AmlCandidate,
    cfg: &VariantConfig,
) -> Comparison {
    let (sa, sb) = (a.path.steps(), b.path.steps());
    let mut i = 0;
    loop {
        match (sa.get(i), sb.get(i)) {
            (None, None) => return Comparison::Equivalent,
            (None, Some(_)) => return Comparison::Precedes,
            (Some(_), None) => return Comparison::Succeeds,
            (Some(x), Some(y)) if x == y => i += 1,
            (Some((la, _)), Some((lb, _))) => {
                return if la.is_extension() && *lb == Label::Lex {
                    if accessible_candidate(g, s_r, a, cfg) {
                        Comparison::Precedes
                    } else {
                        Comparison::Succeeds
                    }
                } else if *la == Label::Lex && lb.is_extension() {
                    if accessible_candidate(g, s_r, b, cfg) {
                        Comparison::Succeeds
                    } else {
                        Comparison::Precedes
                    }
                } else {
                    Comparison::Incomparable
                };
            }
        }
    }
}

/// Minimization that settles shadowing inside each branch of the candidate
/// path trie before comparing across branches.
///
/// Candidates ending at a scope shadow everything continuing past it; the
/// survivors of each outgoing step are then compared with `cmp`. When `cmp`
/// is transitive on the candidates this equals plain minimization; it also
/// stays meaningful when the accessibility order forms a cycle (a private
/// member hiding an accessible inherited one while an enclosing class offers
/// a third).
pub fn minimize_by_prefix(
    cands: Vec<AmlCandidate>,
    cmp: &dyn Fn(&AmlCandidate, &AmlCandidate) -> Comparison,
) -> Vec<AmlCandidate> {
    fn go(
        cands: Vec<AmlCandidate>,
        depth: usize,
        cmp: &dyn Fn(&AmlCandidate, &AmlCandidate) -> Comparison,
    ) -> Vec<AmlCandidate> {
        if cands.is_empty() {
            return cands;
        }
        let (here, deeper): (Vec<_>, Vec<_>) = cands.into_iter().partition(|c| c.path.len() == depth);
        if !here.is_empty() {
            return here;
        }
        let mut groups: Vec<((Label, ScopeId), Vec<AmlCandidate>)> = Vec::new();
        for c in deeper {
            let step = c.path.steps()[depth];
            match groups.iter_mut().find(|(k, _)| *k == step) {
                Some((_, g)) => g.push(c),
                None => groups.push((step, vec![c])),
            }
        }
        let winners: Vec<AmlCandidate> = groups
            .into_iter()
            .flat_map(|(_, g)| go(g, depth + 1, cmp))
            .collect();
        minimize(winners, &CandidateOrder::Custom(cmp))
    }
    go(cands, 0, cmp)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModifierError {
    Unresolved(QNameKey),
    Ambiguous(QNameKey),
    NotAncestor(QNameKey),
}

/// Translates a field modifier declared in scope `s` to its policy. Module
/// arguments that fail to resolve, or that violate the ancestor requirement,
/// are reported and left out of the set.
pub fn translate_modifier(
    g: &AmlGraph,
    s: ScopeId,
    kw: &AccKeyword,
    cfg: &VariantConfig,
) -> (Policy, Vec<ModifierError>) {
    let mut errors = Vec::new();
    let mut set = ScopeSet::new();
    let ancestors = enclosing_modules(g, s);
    for arg in kw.args() {
        match resolve_module(g, s, &arg.0).as_slice() {
            [] => errors.push(ModifierError::Unresolved(arg.clone())),
            [m] if cfg.internal_args_must_be_ancestors && !ancestors.contains(m) => {
                errors.push(ModifierError::NotAncestor(arg.clone()))
            }
            [m] => {
                set.insert(*m);
            }
            _ => errors.push(ModifierError::Ambiguous(arg.clone())),
        }
    }
    let policy = match kw {
        AccKeyword::Public => Policy::Pub,
        AccKeyword::Protected => Policy::Prt,
        AccKeyword::Private => Policy::Prv,
        AccKeyword::Internal(_) => Policy::Mod(set),
        AccKeyword::ProtectedInternal(_) => Policy::Smd(set),
        AccKeyword::PrivateProtected(_) => Policy::Smc(set),
    };
    (policy, errors)
}

/// Diagnoses a binding: the policy must grant access and the path must not
/// be hidden by an inheritance modifier.
pub fn check_reference(g: &AmlGraph, b: &Binding, cfg: &VariantConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    if !permits(g, b.scope, &b.path, &b.decl.policy, cfg) {
        let mut d = Diagnostic::new(
            b.span,
            Code::Inaccessible,
            format!(
                "`{}` is not accessible here: {} does not grant access along {}",
                b.decl.name,
                b.decl.policy.display(g),
                path_text(g, &b.path)
            ),
        );
        d.policy = Some(b.decl.policy.display(g).to_string());
        d.path = Some(path_info(g, &b.path));
        d.field = Some(b.decl.field);
        out.push(d);
    }
    if !path_permits(g, b.scope, &b.path, cfg) {
        let mut d = Diagnostic::new(
            b.span,
            Code::PathHidden,
            format!(
                "`{}` is hidden by an inheritance modifier along {}",
                b.decl.name,
                path_text(g, &b.path)
            ),
        );
        d.path = Some(path_info(g, &b.path));
        d.field = Some(b.decl.field);
        out.push(d);
    }
    out
}

struct Builder<'p> {
    cfg: VariantConfig,
    g: AmlGraph,
    diags: Vec<Diagnostic>,
    scopes: BTreeMap<NodeId, ScopeId>,
    modules: BTreeMap<ScopeId, Vec<String>>,
    imports: Vec<(ScopeId, &'p Import)>,
    classes: Vec<(ScopeId, ScopeId, &'p ClassDef)>,
    fields: Vec<(ScopeId, &'p Field)>,
}

impl<'p> Builder<'p> {
    fn scope(&mut self, name: String) -> ScopeId {
        self.g.add_scope(name).expect("graph is mutable during build")
    }

    fn edge(&mut self, a: ScopeId, l: Label, b: ScopeId) {
        self.g.add_edge(a, l, b).expect("graph is mutable during build");
    }

    fn decl(&mut self, s: ScopeId, l: Label, d: Decl) {
        self.g.add_decl(s, l, d).expect("graph is mutable during build");
    }

    fn members(&mut self, parent: ScopeId, prefix: &[String], members: &'p [Member]) {
        for m in members {
            match m {
                Member::Module(md) => {
                    let mut path = prefix.to_vec();
                    path.push(md.name.name.clone());
                    let s = self.scope(path.join("."));
                    self.edge(s, Label::Lex, parent);
                    self.decl(parent, Label::Mod, Decl::Mod { name: md.name.name.clone(), scope: s });
                    self.decl(s, Label::ThisM, Decl::Scope(s));
                    self.scopes.insert(md.id, s);
                    self.modules.insert(s, path.clone());
                    self.members(s, &path, &md.members);
                }
                Member::Import(i) => self.imports.push((parent, i)),
                Member::Class(c) => self.class(parent, prefix, c),
            }
        }
    }

    fn class(&mut self, parent: ScopeId, prefix: &[String], c: &'p ClassDef) {
        let mut path = prefix.to_vec();
        path.push(c.name.name.clone());
        let s = self.scope(path.join("."));
        self.edge(s, Label::Lex, parent);
        self.decl(parent, Label::Cls, Decl::Cls { name: c.name.name.clone(), scope: s });
        self.decl(s, Label::ThisC, Decl::Scope(s));
        self.scopes.insert(c.id, s);
        self.classes.push((parent, s, c));
        for m in &c.members {
            match m {
                ClassMember::Field(f) => self.fields.push((s, f)),
                ClassMember::Class(inner) => self.class(s, &path, inner),
            }
        }
    }

    fn imports(&mut self) {
        let mut edges = Vec::new();
        for (s, imp) in std::mem::take(&mut self.imports) {
            match resolve_module(&self.g, s, &imp.target.segments).as_slice() {
                [] => self.diags.push(Diagnostic::new(
                    imp.target.span,
                    Code::Unresolved,
                    format!("unresolved module `{}`", imp.target),
                )),
                [m] => edges.push((s, *m)),
                _ => self.diags.push(Diagnostic::new(
                    imp.target.span,
                    Code::Ambiguous,
                    format!("ambiguous module `{}`", imp.target),
                )),
            }
        }
        for (s, m) in edges {
            self.edge(s, Label::Imp, m);
        }
    }

    fn extends(&mut self) {
        let mut supers = Vec::new();
        for &(parent, s, c) in &self.classes {
            let Some(ext) = &c.extends else { continue };
            match resolve_class(&self.g, parent, &ext.name.name).as_slice() {
                [] => self.diags.push(Diagnostic::new(
                    ext.name.span,
                    Code::Unresolved,
                    format!("unresolved class `{}`", ext.name.name),
                )),
                [sup] => supers.push((s, *sup, ext)),
                _ => self.diags.push(Diagnostic::new(
                    ext.name.span,
                    Code::Ambiguous,
                    format!("ambiguous class `{}`", ext.name.name),
                )),
            }
        }
        for (s, sup, ext) in supers {
            let label = match ext.acc {
                ExtAcc::Public => Label::Ext,
                _ if !self.cfg.inheritance_modifiers => {
                    self.diags.push(Diagnostic::new(
                        ext.span,
                        Code::Unsupported,
                        format!(
                            "`{}` inheritance requires inheritance modifiers to be enabled",
                            ext.acc.as_str()
                        ),
                    ));
                    Label::Ext
                }
                ExtAcc::Protected => Label::ExtPrt,
                ExtAcc::Private => Label::ExtPrv,
            };
            if sup == s || self.inherits(sup, s) {
                self.diags.push(Diagnostic::new(
                    ext.name.span,
                    Code::CyclicType,
                    format!("cyclic inheritance through `{}`", ext.name.name),
                ));
                continue;
            }
            self.edge(s, label, sup);
        }
    }

    /// Whether `from` reaches `to` over inheritance edges added so far.
    fn inherits(&self, from: ScopeId, to: ScopeId) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.g.scope_count()];
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            if std::mem::replace(&mut seen[x.index()], true) {
                continue;
            }
            stack.extend(self.g.edges(x).filter(|(l, _)| l.is_extension()).map(|(_, t)| t));
        }
        false
    }

    fn declare_fields(&mut self) -> BTreeMap<NodeId, FieldInfo> {
        let mut infos = BTreeMap::new();
        let mut decls = Vec::new();
        for &(s, f) in &self.fields {
            let policy = match &f.modifier.keyword {
                None => {
                    let mut d = Diagnostic::new(
                        f.modifier.span,
                        Code::Unsupported,
                        "modifier hole outside synthesis; treated as `public`",
                    );
                    d.field = Some(f.id);
                    self.diags.push(d);
                    Policy::Pub
                }
                Some(kw) => {
                    let (policy, errors) = translate_modifier(&self.g, s, kw, &self.cfg);
                    for e in errors {
                        let (code, msg) = match e {
                            ModifierError::Unresolved(x) => {
                                (Code::Unresolved, format!("unresolved module `{x}`"))
                            }
                            ModifierError::Ambiguous(x) => {
                                (Code::Ambiguous, format!("ambiguous module `{x}`"))
                            }
                            ModifierError::NotAncestor(x) => (
                                Code::BadInternalArg,
                                format!("module `{x}` does not enclose the declaration"),
                            ),
                        };
                        let mut d = Diagnostic::new(f.modifier.span, code, msg);
                        d.field = Some(f.id);
                        self.diags.push(d);
                    }
                    policy
                }
            };
            decls.push((
                s,
                VarDecl { name: f.name.name.clone(), ty: Type::Error, policy: policy.clone(), field: f.id },
            ));
            infos.insert(
                f.id,
                FieldInfo {
                    name: f.name.name.clone(),
                    class: s,
                    keyword: f.modifier.keyword.clone(),
                    modifier_span: f.modifier.span,
                    policy,
                    ty: Type::Error,
                },
            );
        }
        for (s, v) in decls {
            self.decl(s, Label::Var, Decl::Var(v));
        }
        infos
    }
}

enum TyState {
    Busy,
    Done(Type),
}

struct Typer<'a> {
    g: &'a AmlGraph,
    cfg: &'a VariantConfig,
    fields: HashMap<NodeId, (ScopeId, &'a Field)>,
    state: HashMap<NodeId, TyState>,
    bindings: BTreeMap<NodeId, Binding>,
    diags: Vec<Diagnostic>,
}

impl Typer<'_> {
    /// `None` when the field is already being typed further up the stack.
    fn field_type(&mut self, id: NodeId) -> Option<Type> {
        match self.state.get(&id) {
            Some(TyState::Done(t)) => return Some(*t),
            Some(TyState::Busy) => return None,
            None => {}
        }
        let (s, f) = self.fields[&id];
        self.state.insert(id, TyState::Busy);
        let t = self.expr(s, &f.init);
        self.state.insert(id, TyState::Done(t));
        Some(t)
    }

    fn bind(&mut self, e: &Expr, name: &str, kind: RefKind, s: ScopeId, cands: Vec<AmlCandidate>, what: String) -> Type {
        match cands.len() {
            0 => {
                self.diags.push(Diagnostic::new(e.span, Code::Unresolved, what));
                Type::Error
            }
            1 => {
                let c = cands.into_iter().next().expect("one candidate");
                let Decl::Var(v) = c.data else { unreachable!("variable query returned non-variable") };
                let field = v.field;
                self.bindings.insert(
                    e.id,
                    Binding { reference: e.id, span: e.span, kind, scope: s, path: c.path, decl: v },
                );
                match self.field_type(field) {
                    Some(t) => t,
                    None => {
                        self.diags.push(Diagnostic::new(
                            e.span,
                            Code::CyclicType,
                            format!("type of `{name}` depends on itself"),
                        ));
                        Type::Error
                    }
                }
            }
            n => {
                self.diags.push(Diagnostic::new(
                    e.span,
                    Code::Ambiguous,
                    format!("ambiguous reference to `{name}` ({n} candidates)"),
                ));
                Type::Error
            }
        }
    }

    fn expr(&mut self, s: ScopeId, e: &Expr) -> Type {
        match &e.kind {
            ExprKind::Int(_) => Type::Int,
            ExprKind::Add(a, b) => {
                let (ta, tb) = (self.expr(s, a), self.expr(s, b));
                match (ta, tb) {
                    (Type::Int, Type::Int) => Type::Int,
                    (Type::Error, _) | (_, Type::Error) => Type::Error,
                    _ => {
                        self.diags.push(Diagnostic::new(
                            e.span,
                            Code::TypeMismatch,
                            format!("operands of `+` must be int, found {ta} and {tb}"),
                        ));
                        Type::Error
                    }
                }
            }
            ExprKind::New(x) => match resolve_class(self.g, s, &x.name).as_slice() {
                [c] => Type::Inst(*c),
                [] => {
                    self.diags.push(Diagnostic::new(
                        x.span,
                        Code::Unresolved,
                        format!("unresolved class `{}`", x.name),
                    ));
                    Type::Error
                }
                _ => {
                    self.diags.push(Diagnostic::new(
                        x.span,
                        Code::Ambiguous,
                        format!("ambiguous class `{}`", x.name),
                    ));
                    Type::Error
                }
            },
            ExprKind::Ref(x) => {
                let cands = resolve_var_lexical(self.g, s, &x.name, self.cfg);
                self.bind(e, &x.name, RefKind::Lexical, s, cands, format!("unresolved variable `{}`", x.name))
            }
            ExprKind::Field(recv, x) => match self.expr(s, recv) {
                Type::Inst(c) => {
                    let cands = resolve_var_member(self.g, c, &x.name, self.cfg);
                    let what = format!("class `{}` has no field `{}`", self.g.name(c), x.name);
                    self.bind(e, &x.name, RefKind::Member, s, cands, what)
                }
                Type::Int => {
                    self.diags.push(Diagnostic::new(
                        e.span,
                        Code::TypeMismatch,
                        format!("int has no field `{}`", x.name),
                    ));
                    Type::Error
                }
                Type::Error => Type::Error,
            },
        }
    }
}

/// Checks `prog` under `cfg`. Never stops at the first error.
pub fn elaborate(prog: &Program, cfg: &VariantConfig) -> Elaboration {
    let mut b = Builder {
        cfg: *cfg,
        g: ScopeGraph::new(),
        diags: Vec::new(),
        scopes: BTreeMap::new(),
        modules: BTreeMap::new(),
        imports: Vec::new(),
        classes: Vec::new(),
        fields: Vec::new(),
    };
    let root = b.scope("root".to_string());
    b.decl(root, Label::ThisM, Decl::Scope(root));
    b.members(root, &[], &prog.members);
    b.imports();
    b.extends();
    let mut infos = b.declare_fields();
    b.g.freeze();

    let mut typer = Typer {
        g: &b.g,
        cfg,
        fields: b.fields.iter().map(|&(s, f)| (f.id, (s, f))).collect(),
        state: HashMap::new(),
        bindings: BTreeMap::new(),
        diags: Vec::new(),
    };
    for &(_, f) in &b.fields {
        typer.field_type(f.id);
    }
    let types: HashMap<NodeId, Type> = typer
        .state
        .iter()
        .map(|(id, st)| match st {
            TyState::Done(t) => (*id, *t),
            TyState::Busy => (*id, Type::Error),
        })
        .collect();
    let mut bindings = typer.bindings;
    let mut diags = std::mem::take(&mut b.diags);
    diags.append(&mut typer.diags);

    let graph = b.g.map_decls(|_, _, d| match d {
        Decl::Var(v) => Decl::Var(VarDecl { ty: types[&v.field], ..v.clone() }),
        other => other.clone(),
    });
    for binding in bindings.values_mut() {
        binding.decl.ty = types[&binding.decl.field];
    }
    for (id, info) in infos.iter_mut() {
        info.ty = types[id];
    }
    for binding in bindings.values() {
        diags.extend(check_reference(&graph, binding, cfg));
    }
    diags.sort_by_key(|d| (d.span.start, d.code));

    Elaboration {
        graph,
        root,
        bindings,
        diagnostics: diags,
        fields: infos,
        scopes: b.scopes,
        modules: b.modules,
    }
}
