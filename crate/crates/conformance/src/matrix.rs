//! The systematic test matrix: one class `Def` declaring `x`, one class
//! `Ref` reading it, related along four dimensions.

use std::collections::BTreeMap;
use std::fmt;

use aml_core::ast::{AccKeyword, Program, QNameKey};
use aml_core::checker::Code;
use aml_core::{elaborate, parse_program, pretty_print, Elaboration, Preset};
use serde::Serialize;

use crate::translate::{translate, Target, TranslationResult};

macro_rules! dimension {
    ($name:ident { $($variant:ident => $text:literal),* $(,)? }) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
        #[serde(rename_all = "snake_case")]
        pub enum $name { $($variant),* }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),*];
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $text),* }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

dimension!(Inheritance {
    Same => "same",
    Unrelated => "unrelated",
    RefInheritsDef => "ref_inherits_def",
    DefInheritsRef => "def_inherits_ref",
});

dimension!(ModulePos {
    Same => "same",
    Parent => "parent",
    Sibling => "sibling",
    Child => "child",
});

dimension!(Nesting {
    Toplevel => "toplevel",
    RefInDef => "ref_in_def",
    DefInRef => "def_in_ref",
    SharedEnclosing => "shared_enclosing",
});

dimension!(Receiver {
    Lexical => "lexical",
    DefInstance => "def_instance",
    SubclassInstance => "subclass_instance",
});

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Dimensions {
    pub inheritance: Inheritance,
    pub module_pos: ModulePos,
    pub nesting: Nesting,
    pub receiver: Receiver,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Expected {
    Accept,
    Reject,
}

#[derive(Clone, Debug)]
pub struct TestCase {
    pub id: String,
    pub target: Target,
    pub dimensions: Dimensions,
    pub modifier: AccKeyword,
    pub program: Program,
    pub expected: Expected,
}

impl TestCase {
    /// Source text, with the preset the verdict was computed under.
    pub fn source(&self) -> String {
        format!("#pragma preset={}\n{}", self.target.preset().name(), pretty_print(&self.program))
    }
}

/// Why a point of the product space is not a test case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exclusion {
    /// The relations contradict each other.
    Impossible,
    /// The target cannot express the program.
    Unsupported,
    /// The program is ill-formed for another reason (cyclic inheritance).
    Invalid,
    /// The reference does not bind to `Def.x`.
    DoesNotBind,
    /// Pruned: nested classes use one module and a reduced modifier set.
    Pruned,
}

#[derive(Clone, Debug, Default)]
pub struct Matrix {
    pub cases: Vec<TestCase>,
    pub excluded: BTreeMap<Exclusion, usize>,
}

fn module_path(pos: ModulePos) -> (Vec<&'static str>, Vec<&'static str>) {
    match pos {
        ModulePos::Same => (vec!["p"], vec!["p"]),
        ModulePos::Parent => (vec!["p", "q"], vec!["p"]),
        ModulePos::Child => (vec!["p"], vec!["p", "q"]),
        ModulePos::Sibling => (vec!["p"], vec!["q"]),
    }
}

fn structural_exclusion(d: &Dimensions) -> Option<Exclusion> {
    use Inheritance as I;
    use Nesting as N;
    if d.inheritance == I::Same && (d.nesting != N::Toplevel || d.module_pos != ModulePos::Same) {
        return Some(Exclusion::Impossible);
    }
    if matches!(d.nesting, N::RefInDef | N::DefInRef) && d.module_pos != ModulePos::Same {
        return Some(Exclusion::Impossible);
    }
    if d.nesting == N::SharedEnclosing && d.module_pos != ModulePos::Same {
        return Some(Exclusion::Pruned);
    }
    if matches!((d.nesting, d.inheritance), (N::RefInDef, I::DefInheritsRef) | (N::DefInRef, I::RefInheritsDef)) {
        return Some(Exclusion::Invalid);
    }
    let lexically_visible =
        matches!(d.inheritance, I::Same | I::RefInheritsDef) || d.nesting == N::RefInDef;
    if d.receiver == Receiver::Lexical && !lexically_visible {
        return Some(Exclusion::DoesNotBind);
    }
    None
}

struct Class {
    name: &'static str,
    extends: Option<&'static str>,
    fields: Vec<String>,
    inner: Vec<Class>,
}

impl Class {
    fn new(name: &'static str) -> Self {
        Class { name, extends: None, fields: Vec::new(), inner: Vec::new() }
    }

    fn write(&self, out: &mut String) {
        out.push_str(&format!("class {}", self.name));
        if let Some(e) = self.extends {
            out.push_str(&format!(" : public {e}"));
        }
        out.push_str(" { ");
        for f in &self.fields {
            out.push_str(f);
            out.push(' ');
        }
        for c in &self.inner {
            c.write(out);
            out.push(' ');
        }
        out.push('}');
    }
}

/// The AML program for one point of the matrix.
pub fn build_program(d: &Dimensions, modifier: &AccKeyword) -> Program {
    use Inheritance as I;
    let (def_mod, ref_mod) = module_path(d.module_pos);
    let mut def = Class::new("Def");
    let mut rf = Class::new("Ref");
    def.fields.push(format!("{modifier} var x = 42"));
    let receiver = match d.receiver {
        Receiver::Lexical => "x",
        Receiver::DefInstance => "new Def().x",
        Receiver::SubclassInstance => "new Sub().x",
    };
    let y = format!("public var y = {receiver}");
    match d.inheritance {
        I::RefInheritsDef => rf.extends = Some("Def"),
        I::DefInheritsRef => def.extends = Some("Ref"),
        _ => {}
    }
    let mut sub = (d.receiver == Receiver::SubclassInstance).then(|| {
        let mut s = Class::new("Sub");
        s.extends = Some("Def");
        s
    });

    // Top-level classes per module path, in emission order.
    let mut placed: Vec<(Vec<&str>, Class)> = Vec::new();
    if d.inheritance == I::Same {
        def.fields.push(y);
        placed.push((def_mod.clone(), def));
        if let Some(s) = sub.take() {
            placed.push((def_mod.clone(), s));
        }
    } else {
        rf.fields.push(y);
        match d.nesting {
            Nesting::Toplevel => {
                placed.push((def_mod.clone(), def));
                if let Some(s) = sub.take() {
                    placed.push((def_mod.clone(), s));
                }
                placed.push((ref_mod.clone(), rf));
            }
            Nesting::RefInDef => {
                def.inner.push(rf);
                placed.push((def_mod.clone(), def));
                if let Some(s) = sub.take() {
                    placed.push((def_mod.clone(), s));
                }
            }
            Nesting::DefInRef => {
                rf.inner.push(def);
                if let Some(s) = sub.take() {
                    rf.inner.push(s);
                }
                placed.push((ref_mod.clone(), rf));
            }
            Nesting::SharedEnclosing => {
                let mut o = Class::new("O");
                o.inner.push(def);
                if let Some(s) = sub.take() {
                    o.inner.push(s);
                }
                o.inner.push(rf);
                placed.push((def_mod.clone(), o));
            }
        }
    }

    // Imports, only in the direction a class name is actually needed.
    let ref_needs_def = d.inheritance != I::Same
        && (d.inheritance == I::RefInheritsDef || d.receiver != Receiver::Lexical);
    let def_needs_ref = d.inheritance == I::DefInheritsRef;
    let mut imports: Vec<(Vec<&str>, Vec<&str>)> = Vec::new();
    let visible = |from: &[&str], to: &[&str]| to.len() <= from.len() && from[..to.len()] == *to;
    if d.nesting == Nesting::Toplevel {
        if ref_needs_def && !visible(&ref_mod, &def_mod) {
            imports.push((ref_mod.clone(), def_mod.clone()));
        }
        if def_needs_ref && !visible(&def_mod, &ref_mod) {
            imports.push((def_mod.clone(), ref_mod.clone()));
        }
    }

    let mut text = String::new();
    write_modules(&mut text, &[], &mut placed, &imports);
    parse_program(&text).unwrap_or_else(|e| panic!("generated program does not parse: {e}\n{text}"))
}

fn write_modules(
    out: &mut String,
    prefix: &[&str],
    placed: &mut Vec<(Vec<&str>, Class)>,
    imports: &[(Vec<&str>, Vec<&str>)],
) {
    for (from, to) in imports {
        if from == prefix {
            out.push_str(&format!("import {} ", to.join(".")));
        }
    }
    let here: Vec<Class> = {
        let (mine, rest): (Vec<_>, Vec<_>) = placed.drain(..).partition(|(m, _)| m == prefix);
        *placed = rest;
        mine.into_iter().map(|(_, c)| c).collect()
    };
    for c in &here {
        c.write(out);
        out.push(' ');
    }
    let mut children: Vec<&str> = Vec::new();
    for (m, _) in placed.iter() {
        if m.len() > prefix.len() && m[..prefix.len()] == *prefix && !children.contains(&m[prefix.len()]) {
            children.push(m[prefix.len()]);
        }
    }
    for (from, _) in imports {
        if from.len() > prefix.len() && from[..prefix.len()] == *prefix && !children.contains(&from[prefix.len()]) {
            children.push(from[prefix.len()]);
        }
    }
    for child in children {
        let mut path = prefix.to_vec();
        path.push(child);
        out.push_str(&format!("module {child} {{ "));
        write_modules(out, &path, placed, imports);
        out.push_str("} ");
    }
}

fn args(path: &[&str]) -> Vec<QNameKey> {
    vec![QNameKey(path.iter().map(|s| s.to_string()).collect())]
}

/// Modifiers exercised for a target at one point of the matrix.
pub fn modifiers(target: Target, d: &Dimensions) -> Vec<AccKeyword> {
    let (def_mod, ref_mod) = module_path(d.module_pos);
    let here = args(&def_mod);
    let nested = d.nesting != Nesting::Toplevel;
    match target {
        Target::Java if nested => vec![AccKeyword::Private, AccKeyword::ProtectedInternal(here)],
        Target::Java => vec![
            AccKeyword::Public,
            AccKeyword::ProtectedInternal(here.clone()),
            AccKeyword::Internal(here),
            AccKeyword::Private,
        ],
        Target::Csharp if nested => vec![
            AccKeyword::Private,
            AccKeyword::Protected,
            AccKeyword::ProtectedInternal(here),
        ],
        Target::Csharp => vec![
            AccKeyword::Public,
            AccKeyword::ProtectedInternal(here.clone()),
            AccKeyword::Internal(here.clone()),
            AccKeyword::Private,
            AccKeyword::Protected,
            AccKeyword::PrivateProtected(here),
        ],
        Target::Rust => {
            let mut out = vec![AccKeyword::Public];
            for i in 1..=def_mod.len() {
                out.push(AccKeyword::Internal(args(&def_mod[..i])));
            }
            out
        }
        Target::Aml => {
            let mut sets = vec![here];
            if ref_mod != def_mod {
                sets.push(args(&ref_mod));
            }
            let mut out = vec![AccKeyword::Public, AccKeyword::Protected, AccKeyword::Private];
            for s in sets {
                out.push(AccKeyword::Internal(s.clone()));
                out.push(AccKeyword::ProtectedInternal(s.clone()));
                out.push(AccKeyword::PrivateProtected(s));
            }
            out
        }
    }
}

/// Dimension values a target can express at all.
pub fn applicable(target: Target) -> Vec<Dimensions> {
    let mut out = Vec::new();
    for &inheritance in Inheritance::ALL {
        for &module_pos in ModulePos::ALL {
            for &nesting in Nesting::ALL {
                for &receiver in Receiver::ALL {
                    let d = Dimensions { inheritance, module_pos, nesting, receiver };
                    if target == Target::Rust {
                        // Structs and modules only: no inheritance, nesting
                        // or class-lexical scope.
                        let ok = matches!(inheritance, Inheritance::Same | Inheritance::Unrelated)
                            && nesting == Nesting::Toplevel
                            && receiver == Receiver::DefInstance;
                        if !ok {
                            continue;
                        }
                    }
                    out.push(d);
                }
            }
        }
    }
    out
}

/// The program's only reference binds to `Def.x`, and nothing but access
/// rules can fail.
fn binds_properly(e: &Elaboration) -> bool {
    let benign = e.diagnostics.iter().all(|d| matches!(d.code, Code::Inaccessible | Code::PathHidden));
    let def = e.graph.scopes().find(|s| e.graph.name(*s).ends_with("Def"));
    benign
        && e.bindings.len() == 1
        && e.bindings.values().all(|b| Some(b.path.tgt()) == def && b.decl.name == "x")
}

fn slug(m: &AccKeyword) -> String {
    m.to_string().replace(['(', ')', ',', ' '], "_").replace("__", "_").trim_end_matches('_').to_string()
}

/// Generates the matrix for `target` with verdicts from the checker under
/// the target's preset.
pub fn generate_matrix(target: Target) -> Matrix {
    let mut m = Matrix::default();
    let cfg = target.preset().config();
    let all = Inheritance::ALL.len() * ModulePos::ALL.len() * Nesting::ALL.len() * Receiver::ALL.len();
    let dims = applicable(target);
    *m.excluded.entry(Exclusion::Unsupported).or_default() += all - dims.len();
    for d in dims {
        if let Some(why) = structural_exclusion(&d) {
            *m.excluded.entry(why).or_default() += 1;
            continue;
        }
        for modifier in modifiers(target, &d) {
            let program = build_program(&d, &modifier);
            if let TranslationResult::Unsupported(_) = translate(&program, target) {
                *m.excluded.entry(Exclusion::Unsupported).or_default() += 1;
                continue;
            }
            let e = elaborate(&program, &cfg);
            if !binds_properly(&e) {
                *m.excluded.entry(Exclusion::DoesNotBind).or_default() += 1;
                continue;
            }
            let expected = if e.is_clean() { Expected::Accept } else { Expected::Reject };
            let id = format!(
                "{}.{}.{}.{}.{}.{}",
                target, d.inheritance, d.module_pos, d.nesting, d.receiver, slug(&modifier)
            );
            m.cases.push(TestCase { id, target, dimensions: d, modifier, program, expected });
        }
    }
    m
}

/// Presets are fixed per target.
impl Target {
    pub fn preset(self) -> Preset {
        match self {
            Target::Java => Preset::Java,
            Target::Csharp => Preset::Csharp,
            Target::Rust => Preset::RustModules,
            Target::Aml => Preset::Base,
        }
    }
}
