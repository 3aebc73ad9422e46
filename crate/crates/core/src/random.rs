//! Seeded random AML programs for property tests.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::ast::*;

#[derive(Clone, Debug)]
pub struct GenOptions {
    pub max_modules: usize,
    pub max_classes: usize,
    /// Emit `protected`/`private` extends clauses.
    pub extends_modifiers: bool,
    /// Probability that a field modifier is a hole.
    pub hole_rate: f64,
}

impl Default for GenOptions {
    fn default() -> Self {
        GenOptions { max_modules: 4, max_classes: 6, extends_modifiers: false, hole_rate: 0.0 }
    }
}

const FIELD_NAMES: [&str; 3] = ["x", "y", "z"];

struct Gen<'r, R> {
    rng: &'r mut R,
    opts: GenOptions,
    next_id: u32,
    modules: Vec<String>,
    classes: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn id(&mut self) -> NodeId {
        self.next_id += 1;
        NodeId(self.next_id - 1)
    }

    fn expr(&mut self, depth: u32) -> Expr {
        let pick = if depth >= 2 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..5) };
        let kind = match pick {
            0 => ExprKind::Int(self.rng.gen_range(0..100)),
            1 => ExprKind::Ref(Ident::new(*FIELD_NAMES.choose(self.rng).unwrap())),
            2 if !self.classes.is_empty() => {
                let c = self.classes.choose(self.rng).unwrap().clone();
                let recv = Expr { id: self.id(), span: Span::default(), kind: ExprKind::New(Ident::new(c)) };
                ExprKind::Field(Box::new(recv), Ident::new(*FIELD_NAMES.choose(self.rng).unwrap()))
            }
            2 => ExprKind::Int(0),
            3 => ExprKind::Add(Box::new(self.expr(depth + 1)), Box::new(self.expr(depth + 1))),
            _ => {
                let inner = self.expr(depth + 1);
                ExprKind::Field(Box::new(inner), Ident::new(*FIELD_NAMES.choose(self.rng).unwrap()))
            }
        };
        Expr { id: self.id(), span: Span::default(), kind }
    }

    fn module_args(&mut self) -> Vec<QNameKey> {
        let n = self.rng.gen_range(0..=2.min(self.modules.len()));
        self.modules
            .choose_multiple(self.rng, n)
            .map(|m| QNameKey(vec![m.clone()]))
            .collect()
    }

    fn modifier(&mut self) -> Modifier {
        let keyword = if self.rng.gen_bool(self.opts.hole_rate) {
            None
        } else {
            Some(match self.rng.gen_range(0..6) {
                0 => AccKeyword::Public,
                1 => AccKeyword::Protected,
                2 => AccKeyword::Private,
                3 => AccKeyword::Internal(self.module_args()),
                4 => AccKeyword::ProtectedInternal(self.module_args()),
                _ => AccKeyword::PrivateProtected(self.module_args()),
            })
        };
        Modifier { keyword, span: Span::default() }
    }

    fn class(&mut self, depth: u32) -> ClassDef {
        let name = format!("C{}", self.classes.len());
        let id = self.id();
        let extends = if !self.classes.is_empty() && self.rng.gen_bool(0.5) {
            let sup = self.classes.choose(self.rng).unwrap().clone();
            let acc = if self.opts.extends_modifiers {
                *[ExtAcc::Public, ExtAcc::Public, ExtAcc::Protected, ExtAcc::Private]
                    .choose(self.rng)
                    .unwrap()
            } else {
                ExtAcc::Public
            };
            Some(Extends { acc, name: Ident::new(sup), span: Span::default() })
        } else {
            None
        };
        self.classes.push(name.clone());
        let mut members = Vec::new();
        let mut names: Vec<&str> = FIELD_NAMES.to_vec();
        names.shuffle(self.rng);
        for field in names.into_iter().take(self.rng.gen_range(1..=2)) {
            let id = self.id();
            let modifier = self.modifier();
            let init = self.expr(0);
            members.push(ClassMember::Field(Field {
                id,
                span: Span::default(),
                modifier,
                name: Ident::new(field),
                init,
            }));
        }
        if depth < 2 && self.classes.len() < self.opts.max_classes && self.rng.gen_bool(0.3) {
            let inner = self.class(depth + 1);
            members.insert(self.rng.gen_range(0..=members.len()), ClassMember::Class(inner));
        }
        ClassDef { id, span: Span::default(), name: Ident::new(name), extends, members }
    }

    fn module(&mut self, depth: u32) -> ModuleDef {
        let name = format!("M{}", self.modules.len());
        self.modules.push(name.clone());
        let id = self.id();
        let mut members = Vec::new();
        if self.modules.len() > 1 && self.rng.gen_bool(0.4) {
            let target = self.modules.choose(self.rng).unwrap().clone();
            members.push(Member::Import(Import {
                id: self.id(),
                span: Span::default(),
                target: QName::new([target]),
            }));
        }
        for _ in 0..self.rng.gen_range(0..=2) {
            if self.classes.len() < self.opts.max_classes {
                members.push(Member::Class(self.class(0)));
            }
        }
        if depth < 1 && self.modules.len() < self.opts.max_modules && self.rng.gen_bool(0.4) {
            members.push(Member::Module(self.module(depth + 1)));
        }
        ModuleDef { id, span: Span::default(), name: Ident::new(name), members }
    }

    fn program(&mut self) -> Program {
        let mut members = Vec::new();
        for _ in 0..self.rng.gen_range(1..=4) {
            if self.rng.gen_bool(0.5) && self.modules.len() < self.opts.max_modules {
                members.push(Member::Module(self.module(0)));
            } else if self.classes.len() < self.opts.max_classes {
                members.push(Member::Class(self.class(0)));
            }
        }
        Program { pragmas: Vec::new(), members }
    }
}

/// A random program. Class names are unique; field and module references
/// may or may not resolve, so many programs carry diagnostics.
pub fn random_program<R: Rng>(rng: &mut R, opts: &GenOptions) -> Program {
    Gen { rng, opts: opts.clone(), next_id: 0, modules: Vec::new(), classes: Vec::new() }.program()
}

/// Removes whatever the checker complains about until the program is clean:
/// offending initializers become `0`, offending modifiers become `public`,
/// and unresolvable imports and extends clauses are dropped. The surviving
/// references are exactly those the checker accepts under `cfg`.
pub fn repair(prog: &Program, cfg: &crate::VariantConfig) -> Option<Program> {
    let mut p = crate::parse_program(&crate::pretty_print(prog)).ok()?;
    for _ in 0..64 {
        let e = crate::elaborate(&p, cfg);
        if e.is_clean() {
            return Some(p);
        }
        let mut changed = false;
        for d in &e.diagnostics {
            changed |= fix_at(&mut p.members, d.span.start);
        }
        if !changed {
            return None;
        }
        p = crate::parse_program(&crate::pretty_print(&p)).ok()?;
    }
    None
}

fn within(span: Span, pos: usize) -> bool {
    span.start <= pos && pos < span.end.max(span.start + 1)
}

fn fix_at(members: &mut Vec<Member>, pos: usize) -> bool {
    let mut drop = None;
    for (i, m) in members.iter_mut().enumerate() {
        match m {
            Member::Import(imp) if within(imp.span, pos) => drop = Some(i),
            Member::Module(md) if within(md.span, pos) => return fix_at(&mut md.members, pos),
            Member::Class(c) if within(c.span, pos) => return fix_class(c, pos),
            _ => {}
        }
    }
    if let Some(i) = drop {
        members.remove(i);
        return true;
    }
    false
}

fn fix_class(c: &mut ClassDef, pos: usize) -> bool {
    if c.extends.as_ref().is_some_and(|e| within(e.span, pos)) {
        c.extends = None;
        return true;
    }
    for m in &mut c.members {
        match m {
            ClassMember::Class(inner) if within(inner.span, pos) => return fix_class(inner, pos),
            ClassMember::Field(f) if within(f.modifier.span, pos) => {
                f.modifier.keyword = Some(AccKeyword::Public);
                return true;
            }
            ClassMember::Field(f) if within(f.span, pos) => {
                if matches!(f.init.kind, ExprKind::Int(_)) {
                    return false;
                }
                f.init = Expr { id: f.init.id, span: f.init.span, kind: ExprKind::Int(0) };
                return true;
            }
            _ => {}
        }
    }
    false
}

/// A random scope graph with a LEX forest, THIS declarations marking module
/// and class scopes (scope 0 is a module), and random IMP/EXT-family edges
/// between them. Returns the graph and its module scopes.
pub fn random_graph<R: Rng>(rng: &mut R, max_scopes: usize) -> (crate::AmlGraph, Vec<scopegraph::ScopeId>) {
    use scopegraph::Label;
    let n = rng.gen_range(2..=max_scopes.max(2));
    let mut g = crate::AmlGraph::new();
    let mut modules = Vec::new();
    let mut classes = Vec::new();
    for i in 0..n {
        let s = g.add_scope(format!("s{i}")).expect("fresh graph");
        if i > 0 {
            let parent = scopegraph::ScopeId::from_index(rng.gen_range(0..i));
            g.add_edge(s, Label::Lex, parent).expect("known scopes");
        }
        match (i, rng.gen_range(0..3)) {
            (0, _) | (_, 0) => {
                g.add_decl(s, Label::ThisM, crate::Decl::Scope(s)).expect("known scope");
                modules.push(s);
            }
            (_, 1) => {
                g.add_decl(s, Label::ThisC, crate::Decl::Scope(s)).expect("known scope");
                classes.push(s);
            }
            _ => {}
        }
    }
    let extension = [Label::Ext, Label::Ext, Label::ExtPrt, Label::ExtPrv];
    for _ in 0..rng.gen_range(0..=n) {
        if classes.len() >= 2 {
            let a = *classes.choose(rng).unwrap();
            let b = *classes.choose(rng).unwrap();
            if a != b {
                g.add_edge(a, *extension.choose(rng).unwrap(), b).expect("known scopes");
            }
        }
        if rng.gen_bool(0.3) && modules.len() >= 2 {
            let a = *modules.choose(rng).unwrap();
            let b = *modules.choose(rng).unwrap();
            if a != b {
                g.add_edge(a, Label::Imp, b).expect("known scopes");
            }
        }
    }
    g.freeze();
    (g, modules)
}

/// A cycle-free random walk of at most `max_len` steps from `start`.
pub fn random_path<R: Rng>(rng: &mut R, g: &crate::AmlGraph, start: scopegraph::ScopeId, max_len: usize) -> crate::AmlPath {
    let mut p = crate::AmlPath::empty(start);
    for _ in 0..rng.gen_range(0..=max_len) {
        let next: Vec<_> = g.edges(p.tgt()).filter(|(_, t)| !p.contains(*t)).collect();
        let Some(&(l, t)) = next.choose(rng) else { break };
        p.push(l, t);
    }
    p
}

/// A random policy whose module sets are drawn from `modules`.
pub fn random_policy<R: Rng>(rng: &mut R, modules: &[scopegraph::ScopeId]) -> crate::Policy {
    use crate::Policy;
    let kind = rng.gen_range(0..6);
    let set: std::collections::BTreeSet<_> =
        modules.iter().filter(|_| rng.gen_bool(0.4)).copied().collect();
    match kind {
        0 => Policy::Pub,
        1 => Policy::Prt,
        2 => Policy::Prv,
        3 => Policy::Mod(set),
        4 => Policy::Smd(set),
        _ => Policy::Smc(set),
    }
}
