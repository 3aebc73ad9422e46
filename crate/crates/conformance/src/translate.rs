//! Source-to-source translation of AML programs to Java, C# and Rust.
//!
//! A translation either reproduces the program's meaning directly or
//! refuses with [`TranslationResult::Unsupported`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};
use std::str::FromStr;

use aml_core::access::enclosing_module_innermost;
use aml_core::ast::{AccKeyword, ClassDef, ClassMember, Expr, ExprKind, ExtAcc, Field, Member, Program};
use aml_core::checker::resolve_class;
use aml_core::{elaborate, pretty_print, Elaboration, Policy, Type};
use scopegraph::{Label, ScopeId};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Java,
    Csharp,
    Rust,
    Aml,
}

impl Target {
    pub const ALL: [Target; 4] = [Target::Java, Target::Csharp, Target::Rust, Target::Aml];

    pub fn name(self) -> &'static str {
        match self {
            Target::Java => "java",
            Target::Csharp => "csharp",
            Target::Rust => "rust",
            Target::Aml => "aml",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown target `{s}` (expected java, csharp, rust or aml)"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslationResult {
    /// Relative file path to contents.
    Sources(BTreeMap<String, String>),
    Unsupported(String),
}

type Out<T> = Result<T, String>;

fn unsupported<T>(msg: impl Into<String>) -> Out<T> {
    Err(msg.into())
}

pub fn translate(prog: &Program, target: Target) -> TranslationResult {
    let mut cfg = target.preset().config();
    cfg.inheritance_modifiers = true;
    let e = elaborate(prog, &cfg);
    let cx = Cx { prog, e: &e };
    let result = match target {
        Target::Java => cx.java(),
        Target::Csharp => {
            let e = elaborate(prog, &target.preset().config());
            Cx { prog, e: &e }.csharp()
        }
        Target::Rust => cx.rust(),
        Target::Aml => Ok(BTreeMap::from([("case.aml".to_string(), pretty_print(prog))])),
    };
    match result {
        Ok(files) => TranslationResult::Sources(files),
        Err(reason) => TranslationResult::Unsupported(reason),
    }
}

struct Cx<'a> {
    prog: &'a Program,
    e: &'a Elaboration,
}

/// Classes grouped by the module they are declared in (top-level classes
/// only), modules in source order.
type ByModule<'a> = Vec<(Option<ScopeId>, Vec<&'a ClassDef>)>;

impl<'a> Cx<'a> {
    fn scope(&self, c: &ClassDef) -> ScopeId {
        self.e.scopes[&c.id]
    }

    fn module_of(&self, s: ScopeId) -> Option<ScopeId> {
        enclosing_module_innermost(&self.e.graph, s).filter(|m| *m != self.e.root)
    }

    fn module_name(&self, m: Option<ScopeId>) -> Vec<String> {
        m.and_then(|m| self.e.modules.get(&m).cloned()).unwrap_or_default()
    }

    fn top_level(&self) -> ByModule<'a> {
        fn walk<'a>(cx: &Cx<'a>, members: &'a [Member], m: Option<ScopeId>, out: &mut ByModule<'a>) {
            let mut here = Vec::new();
            for member in members {
                match member {
                    Member::Class(c) => here.push(c),
                    Member::Module(md) => walk(cx, &md.members, Some(cx.e.scopes[&md.id]), out),
                    Member::Import(_) => {}
                }
            }
            if !here.is_empty() {
                out.push((m, here));
            }
        }
        let mut out = Vec::new();
        walk(self, &self.prog.members, None, &mut out);
        out.sort_by_key(|(m, _)| self.module_name(*m));
        out
    }

    fn field_policy(&self, f: &Field) -> (&Policy, Option<ScopeId>) {
        let info = &self.e.fields[&f.id];
        (&info.policy, self.module_of(info.class))
    }

    fn check_clean(&self) -> Out<()> {
        use aml_core::checker::Code;
        match self.e.diagnostics.iter().find(|d| !matches!(d.code, Code::Inaccessible | Code::PathHidden)) {
            Some(d) => unsupported(format!("program does not elaborate: {d}")),
            None => Ok(()),
        }
    }

    fn class_of_new(&self, scope: ScopeId, name: &str) -> Out<ScopeId> {
        match resolve_class(&self.e.graph, scope, name).as_slice() {
            [c] => Ok(*c),
            _ => unsupported(format!("class `{name}` does not resolve")),
        }
    }

    /// Modules (by scope) whose classes `c` mentions, other than its own.
    fn class_uses(&self, c: &ClassDef, parent: ScopeId, out: &mut BTreeSet<Option<ScopeId>>) -> Out<()> {
        let s = self.scope(c);
        if let Some(ext) = &c.extends {
            out.insert(self.module_of(self.class_of_new(parent, &ext.name.name)?));
        }
        for m in &c.members {
            match m {
                ClassMember::Field(f) => {
                    let mut stack = vec![&f.init];
                    while let Some(e) = stack.pop() {
                        match &e.kind {
                            ExprKind::New(n) => {
                                out.insert(self.module_of(self.class_of_new(s, &n.name)?));
                            }
                            ExprKind::Field(r, _) => stack.push(r),
                            ExprKind::Add(a, b) => stack.extend([a.as_ref(), b.as_ref()]),
                            ExprKind::Int(_) | ExprKind::Ref(_) => {}
                        }
                    }
                    if let Type::Inst(t) = self.e.fields[&f.id].ty {
                        out.insert(self.module_of(t));
                    }
                }
                ClassMember::Class(inner) => self.class_uses(inner, s, out)?,
            }
        }
        Ok(())
    }

    fn expr(&self, e: &Expr, new: &dyn Fn(&str) -> Out<String>) -> Out<String> {
        Ok(match &e.kind {
            ExprKind::Int(n) => n.to_string(),
            ExprKind::Ref(x) => x.name.clone(),
            ExprKind::New(c) => new(&c.name)?,
            ExprKind::Field(r, x) => format!("{}.{}", self.expr(r, new)?, x.name),
            ExprKind::Add(a, b) => format!("({} + {})", self.expr(a, new)?, self.expr(b, new)?),
        })
    }

    /// A module set naming exactly the field's own module.
    fn own_module(&self, set: &BTreeSet<ScopeId>, decl: Option<ScopeId>) -> bool {
        set.len() == 1 && decl.is_some_and(|m| set.contains(&m))
    }

    // ---- Java --------------------------------------------------------

    fn java(&self) -> Out<BTreeMap<String, String>> {
        self.check_clean()?;
        let with_classes: BTreeSet<Option<ScopeId>> = self.top_level().iter().map(|(m, _)| *m).collect();
        let mut files = BTreeMap::new();
        for (m, classes) in self.top_level() {
            // Classes outside any module go to the unnamed package.
            let pkg = self.module_name(m).join(".");
            // Packages reachable by class lookup: every enclosing module and
            // everything those modules import.
            let mut visible = BTreeSet::new();
            let mut cur = Some(m.unwrap_or(self.e.root));
            while let Some(s) = cur {
                visible.insert(s);
                visible.extend(self.e.graph.edges(s).filter(|(l, _)| *l == Label::Imp).map(|(_, t)| t));
                cur = self.e.graph.edges(s).find(|(l, _)| *l == Label::Lex).map(|(_, t)| t);
            }
            let imports: BTreeSet<String> = visible
                .into_iter()
                .filter(|s| Some(*s) != m && *s != self.e.root && with_classes.contains(&Some(*s)))
                .map(|s| self.module_name(Some(s)).join("."))
                .collect();
            for c in classes {
                let mut out = String::new();
                if !pkg.is_empty() {
                    writeln!(out, "package {pkg};\n").unwrap();
                }
                for i in &imports {
                    writeln!(out, "import {i}.*;").unwrap();
                }
                if !imports.is_empty() {
                    out.push('\n');
                }
                self.java_class(c, 0, &mut out)?;
                let dir = if pkg.is_empty() { String::new() } else { format!("{}/", pkg.replace('.', "/")) };
                files.insert(format!("{dir}{}.java", c.name.name), out);
            }
        }
        Ok(files)
    }

    fn java_class(&self, c: &ClassDef, depth: usize, out: &mut String) -> Out<()> {
        let pad = "    ".repeat(depth);
        write!(out, "{pad}public class {}", c.name.name).unwrap();
        if let Some(ext) = &c.extends {
            if ext.acc != ExtAcc::Public {
                return unsupported(format!("{} inheritance", ext.acc.as_str()));
            }
            write!(out, " extends {}", ext.name.name).unwrap();
        }
        out.push_str(" {\n");
        for m in &c.members {
            match m {
                ClassMember::Field(f) => {
                    let (policy, decl) = self.field_policy(f);
                    let kw = f.modifier.keyword.as_ref().ok_or("modifier hole")?;
                    let modifier = match (kw, policy) {
                        (AccKeyword::Public, _) => "public ",
                        (AccKeyword::Private, _) => "private ",
                        (AccKeyword::Internal(_), Policy::Mod(s)) if self.own_module(s, decl) => "",
                        (AccKeyword::ProtectedInternal(_), Policy::Smd(s)) if self.own_module(s, decl) => {
                            "protected "
                        }
                        _ => return unsupported(format!("`{kw}` has no Java counterpart")),
                    };
                    let ty = self.java_type(&self.e.fields[&f.id].ty)?;
                    let init = self.expr(&f.init, &|n| Ok(format!("new {n}()")))?;
                    writeln!(out, "{pad}    {modifier}{ty} {} = {init};", f.name.name).unwrap();
                }
                ClassMember::Class(inner) => self.java_class(inner, depth + 1, out)?,
            }
        }
        writeln!(out, "{pad}}}").unwrap();
        Ok(())
    }

    fn java_type(&self, t: &Type) -> Out<String> {
        match t {
            Type::Int => Ok("int".into()),
            Type::Inst(s) => Ok(self.e.graph.name(*s).rsplit('.').next().unwrap_or_default().to_string()),
            Type::Error => unsupported("ill-typed field"),
        }
    }

    // ---- C# ----------------------------------------------------------

    fn csharp(&self) -> Out<BTreeMap<String, String>> {
        self.check_clean()?;
        if self.e.bindings.values().any(|b| b.path.labels().contains(&Label::Lex)) {
            return unsupported("lexical access to a field of an enclosing class instance");
        }
        let groups = self.top_level();
        // Classes outside any module form an assembly of their own, keyed by
        // the root scope.
        let root = self.e.root;
        let mut deps: BTreeMap<ScopeId, BTreeSet<ScopeId>> = BTreeMap::new();
        for (m, classes) in &groups {
            let m = m.unwrap_or(root);
            let mut used = BTreeSet::new();
            for c in classes {
                self.class_uses(c, m, &mut used)?;
            }
            deps.insert(m, used.into_iter().map(|u| u.unwrap_or(root)).filter(|u| *u != m).collect());
        }
        // Assemblies may not reference each other cyclically.
        let mut state: BTreeMap<ScopeId, bool> = BTreeMap::new();
        fn cyclic(m: ScopeId, deps: &BTreeMap<ScopeId, BTreeSet<ScopeId>>, state: &mut BTreeMap<ScopeId, bool>) -> bool {
            match state.get(&m) {
                Some(done) => return !done,
                None => state.insert(m, false),
            };
            let found = deps.get(&m).into_iter().flatten().any(|d| cyclic(*d, deps, state));
            state.insert(m, true);
            found
        }
        if deps.keys().any(|m| cyclic(*m, &deps, &mut state)) {
            return unsupported("cyclic assembly references");
        }
        let mut files = BTreeMap::new();
        let assembly = |m: ScopeId| {
            if m == root {
                "Root".to_string()
            } else {
                self.module_name(Some(m)).join(".")
            }
        };
        for (m, classes) in groups {
            let m = m.unwrap_or(root);
            let name = assembly(m);
            let mut project = String::from(
                "<Project Sdk=\"Microsoft.NET.Sdk\">\n  <PropertyGroup>\n    <TargetFramework>net7.0</TargetFramework>\n    <OutputType>Library</OutputType>\n  </PropertyGroup>\n",
            );
            let my_deps = &deps[&m];
            if !my_deps.is_empty() {
                project.push_str("  <ItemGroup>\n");
                for d in my_deps {
                    let dn = assembly(*d);
                    writeln!(project, "    <ProjectReference Include=\"../{dn}/{dn}.csproj\" />").unwrap();
                }
                project.push_str("  </ItemGroup>\n");
            }
            project.push_str("</Project>\n");
            let mut src = String::new();
            let usings: Vec<&ScopeId> = my_deps.iter().filter(|d| **d != root).collect();
            for d in &usings {
                writeln!(src, "using {};", self.module_name(Some(**d)).join(".")).unwrap();
            }
            if !usings.is_empty() {
                src.push('\n');
            }
            if m == root {
                for c in classes {
                    self.csharp_class(c, 0, &mut src)?;
                }
            } else {
                writeln!(src, "namespace {name}\n{{").unwrap();
                for c in classes {
                    self.csharp_class(c, 1, &mut src)?;
                }
                src.push_str("}\n");
            }
            files.insert(format!("{name}/{name}.csproj"), project);
            files.insert(format!("{name}/{name}.cs"), src);
        }
        Ok(files)
    }

    fn csharp_class(&self, c: &ClassDef, depth: usize, out: &mut String) -> Out<()> {
        let pad = "    ".repeat(depth);
        write!(out, "{pad}public class {}", c.name.name).unwrap();
        if let Some(ext) = &c.extends {
            if ext.acc != ExtAcc::Public {
                return unsupported(format!("{} inheritance", ext.acc.as_str()));
            }
            write!(out, " : {}", ext.name.name).unwrap();
        }
        writeln!(out, "\n{pad}{{").unwrap();
        for m in &c.members {
            match m {
                ClassMember::Field(f) => {
                    let (policy, decl) = self.field_policy(f);
                    let kw = f.modifier.keyword.as_ref().ok_or("modifier hole")?;
                    let own = policy.module_set().is_some_and(|s| self.own_module(s, decl));
                    let modifier = match kw {
                        AccKeyword::Public => "public",
                        AccKeyword::Protected => "protected",
                        AccKeyword::Private => "private",
                        AccKeyword::Internal(_) if own => "internal",
                        AccKeyword::ProtectedInternal(_) if own => "protected internal",
                        AccKeyword::PrivateProtected(_) if own => "private protected",
                        _ => return unsupported(format!("`{kw}` names another assembly")),
                    };
                    let ty = self.java_type(&self.e.fields[&f.id].ty)?;
                    let init = self.expr(&f.init, &|n| Ok(format!("new {n}()")))?;
                    // Field initializers cannot read instance members in C#;
                    // computed fields become read-only properties.
                    let sep = if matches!(f.init.kind, ExprKind::Int(_)) { "=" } else { "=>" };
                    writeln!(out, "{pad}    {modifier} {ty} {} {sep} {init};", f.name.name).unwrap();
                }
                ClassMember::Class(inner) => self.csharp_class(inner, depth + 1, out)?,
            }
        }
        writeln!(out, "{pad}}}").unwrap();
        Ok(())
    }

    // ---- Rust --------------------------------------------------------

    fn rust_path(&self, class: ScopeId) -> String {
        let mut parts = vec!["crate".to_string()];
        parts.extend(self.module_name(self.module_of(class)));
        parts.push(self.e.graph.name(class).rsplit('.').next().unwrap_or_default().to_string());
        parts.join("::")
    }

    fn rust(&self) -> Out<BTreeMap<String, String>> {
        self.check_clean()?;
        let mut out = String::from("#![allow(dead_code, unconditional_recursion)]\n");
        self.rust_members(&self.prog.members, 0, &mut out)?;
        Ok(BTreeMap::from([("lib.rs".to_string(), out)]))
    }

    fn rust_members(&self, members: &[Member], depth: usize, out: &mut String) -> Out<()> {
        let pad = "    ".repeat(depth);
        for m in members {
            match m {
                Member::Import(_) => {}
                Member::Module(md) => {
                    writeln!(out, "{pad}pub mod {} {{", md.name.name).unwrap();
                    self.rust_members(&md.members, depth + 1, out)?;
                    writeln!(out, "{pad}}}").unwrap();
                }
                Member::Class(c) => self.rust_struct(c, depth, out)?,
            }
        }
        Ok(())
    }

    fn rust_struct(&self, c: &ClassDef, depth: usize, out: &mut String) -> Out<()> {
        let pad = "    ".repeat(depth);
        if c.extends.is_some() {
            return unsupported("inheritance");
        }
        let s = self.scope(c);
        let mut fields = Vec::new();
        for m in &c.members {
            match m {
                ClassMember::Class(_) => return unsupported("nested classes"),
                ClassMember::Field(f) => fields.push(f),
            }
        }
        writeln!(out, "{pad}pub struct {} {{", c.name.name).unwrap();
        let mut inits = Vec::new();
        for f in &fields {
            let (policy, decl) = self.field_policy(f);
            let kw = f.modifier.keyword.as_ref().ok_or("modifier hole")?;
            let ancestors: Vec<ScopeId> = {
                let mut v = Vec::new();
                let mut cur = decl;
                while let Some(m) = cur {
                    v.push(m);
                    cur = self.e.graph.edges(m).find(|(l, _)| *l == Label::Lex).and_then(|(_, t)| self.module_of(t));
                }
                v
            };
            let vis = match (kw, policy) {
                (AccKeyword::Public, _) => "pub".to_string(),
                (AccKeyword::Internal(_), Policy::Mod(set)) if set.len() == 1 => {
                    let m = *set.iter().next().unwrap();
                    if !ancestors.contains(&m) {
                        return unsupported("pub(in ...) needs an ancestor module");
                    }
                    format!("pub(in crate::{})", self.module_name(Some(m)).join("::"))
                }
                _ => return unsupported(format!("`{kw}` has no Rust counterpart")),
            };
            let ty = match &self.e.fields[&f.id].ty {
                Type::Int => "i32".to_string(),
                Type::Inst(t) => self.rust_path(*t),
                Type::Error => return unsupported("ill-typed field"),
            };
            if matches!(f.init.kind, ExprKind::Ref(_)) || contains_bare_ref(&f.init) {
                return unsupported("bare field references (no class scope)");
            }
            let init = self.expr(&f.init, &|n| Ok(format!("{}::new()", self.rust_path(self.class_of_new(s, n)?))))?;
            writeln!(out, "{pad}    {vis} {}: {ty},", f.name.name).unwrap();
            inits.push(format!("{}: {init}", f.name.name));
        }
        writeln!(out, "{pad}}}").unwrap();
        writeln!(out, "{pad}impl {} {{", c.name.name).unwrap();
        writeln!(out, "{pad}    pub fn new() -> Self {{").unwrap();
        writeln!(out, "{pad}        {} {{ {} }}", c.name.name, inits.join(", ")).unwrap();
        writeln!(out, "{pad}    }}").unwrap();
        writeln!(out, "{pad}}}").unwrap();
        Ok(())
    }
}

fn contains_bare_ref(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Ref(_) => true,
        ExprKind::Field(r, _) => contains_bare_ref(r),
        ExprKind::Add(a, b) => contains_bare_ref(a) || contains_bare_ref(b),
        ExprKind::Int(_) | ExprKind::New(_) => false,
    }
}
