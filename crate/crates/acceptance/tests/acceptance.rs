//! Acceptance criteria, one line each. Exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use aml_conformance::{compiler_command, generate_matrix, run_differential, Expected, Matrix, Target, TestCase};
use aml_core::access::permits;
use aml_core::ast::{NodeId, Program};
use aml_core::checker::Code;
use aml_core::config::{Preset, ReferenceRule};
use aml_core::metatheory::verify_all;
use aml_core::policy::{equivalent, ScopeSet};
use aml_core::random::{random_graph, random_path, random_policy, random_program, repair, GenOptions};
use aml_core::synthesis::{render_keyword, synthesize};
use aml_core::{elaborate, normalize, parse_program, policy_lt, pretty_print, Elaboration, Policy, VariantConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scopegraph::oracle::{brute_force_resolve, OracleOrder};
use scopegraph::{parse_regex, resolve, CandidateOrder, Label, LabelOrder, LabelRegex, ScopeGraph, ScopeId};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn program(name: &str) -> Program {
    let path = format!("{}/../core/tests/programs/{name}.aml", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_program(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn check_cfg(name: &str, base: VariantConfig) -> Elaboration {
    let p = program(name);
    let cfg = VariantConfig::with_pragmas(base, &p.pragmas).expect("valid pragmas");
    elaborate(&p, &cfg)
}

fn check(name: &str, preset: Preset) -> Elaboration {
    check_cfg(name, preset.config())
}

fn codes(e: &Elaboration) -> Vec<Code> {
    e.diagnostics.iter().map(|d| d.code).collect()
}

/// Declaring class of what `x` in the initializer of `field` binds to.
fn bound_class(e: &Elaboration, field: &str, x: &str) -> Option<String> {
    let class = e.fields.values().find(|f| f.name == field)?.class;
    let hits: Vec<_> = e.bindings.values().filter(|b| b.decl.name == x && b.scope == class).collect();
    (hits.len() == 1).then(|| e.graph.name(hits[0].path.tgt()).to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Data {
    Mod(&'static str, ScopeId),
    Var(&'static str, u32),
}

type G = ScopeGraph<Label, Data>;

/// Two modules D and F both declare x; E is nested in D and imports F.
fn import_vs_enclosing_graph() -> (G, ScopeId, ScopeId, ScopeId) {
    let mut g = G::new();
    let s0 = g.add_scope("s_0").unwrap();
    let d = g.add_scope("s_D").unwrap();
    let f = g.add_scope("s_F").unwrap();
    let e = g.add_scope("s_E").unwrap();
    g.add_decl(s0, Label::Mod, Data::Mod("D", d)).unwrap();
    g.add_decl(s0, Label::Mod, Data::Mod("F", f)).unwrap();
    g.add_decl(d, Label::Mod, Data::Mod("E", e)).unwrap();
    g.add_edge(d, Label::Lex, s0).unwrap();
    g.add_edge(f, Label::Lex, s0).unwrap();
    g.add_edge(e, Label::Lex, d).unwrap();
    g.add_edge(e, Label::Imp, f).unwrap();
    g.add_decl(d, Label::Var, Data::Var("x", 3)).unwrap();
    g.add_decl(f, Label::Var, Data::Var("x", 4)).unwrap();
    g.freeze();
    (g, e, d, f)
}

fn criterion_known_programs() -> Outcome {
    let timed = |name: &str, f: &dyn Fn() -> Result<(), String>| -> Result<(), String> {
        let t = Instant::now();
        f().map_err(|e| format!("{name}: {e}"))?;
        ensure!(t.elapsed().as_secs_f64() < 1.0, "{name}: took {:?}", t.elapsed());
        Ok(())
    };
    timed("import_not_transitive", &|| {
        ensure!(codes(&check("import_not_transitive", Preset::Base)) == [Code::Unresolved], "not unresolved");
        Ok(())
    })?;
    timed("import_shadows_enclosing", &|| {
        let (g, e, d, f) = import_vs_enclosing_graph();
        let r = parse_regex("LEX* IMP? VAR").unwrap();
        let is_x = |d: &Data| matches!(d, Data::Var("x", _));
        let run = |order: CandidateOrder<'_, Label, Data>| resolve(&g, e, &r, &is_x, &order);
        let imp_first = run(CandidateOrder::Labels("VAR < IMP < LEX".parse().unwrap()));
        ensure!(imp_first.len() == 1 && imp_first[0].path.tgt() == f, "IMP<LEX: {imp_first:?}");
        let lex_first = run(CandidateOrder::Labels("VAR < LEX < IMP".parse().unwrap()));
        ensure!(lex_first.len() == 1 && lex_first[0].path.tgt() == d, "LEX<IMP: {lex_first:?}");
        ensure!(run(CandidateOrder::None).len() == 2, "no order should be ambiguous");
        ensure!(check("import_shadows_enclosing", Preset::Base).is_clean(), "program not clean");
        Ok(())
    })?;
    timed("inherited_field", &|| {
        ensure!(check("inherited_field", Preset::Base).is_clean(), "not clean");
        Ok(())
    })?;
    timed("private_via_subclass_instance", &|| {
        ensure!(codes(&check("private_via_subclass_instance", Preset::Java)) == [Code::Inaccessible], "java");
        ensure!(check("private_via_subclass_instance", Preset::Csharp).is_clean(), "csharp");
        Ok(())
    })?;
    timed("private_from_enclosing", &|| {
        ensure!(check("private_from_enclosing", Preset::Java).is_clean(), "java");
        ensure!(codes(&check("private_from_enclosing", Preset::Csharp)) == [Code::Inaccessible], "csharp");
        Ok(())
    })?;
    timed("internal_outer_module", &|| {
        ensure!(check("internal_outer_module", Preset::Base).is_clean(), "base");
        let mut ancestors = Preset::Base.config();
        ancestors.internal_args_must_be_ancestors = true;
        let e = check_cfg("internal_outer_module", ancestors);
        ensure!(codes(&e).contains(&Code::BadInternalArg), "ancestor variant: {:?}", codes(&e));
        let mut innermost = Preset::Base.config();
        innermost.internal_reference_rule = ReferenceRule::Innermost;
        let e = check_cfg("internal_outer_module", innermost);
        ensure!(codes(&e) == [Code::Inaccessible], "innermost variant: {:?}", codes(&e));
        Ok(())
    })?;
    timed("protected_via_subclass_instance", &|| {
        ensure!(check("protected_via_subclass_instance", Preset::Base).is_clean(), "subclass instance");
        let e = check("protected_via_base_instance", Preset::Base);
        ensure!(codes(&e) == [Code::Inaccessible], "base instance: {:?}", codes(&e));
        Ok(())
    })?;
    timed("private_extends", &|| {
        ensure!(check("private_extends", Preset::CppInheritance).is_clean(), "private extends");
        let e = check("protected_extends", Preset::CppInheritance);
        ensure!(!e.is_clean(), "protected extends accepted");
        Ok(())
    })?;
    timed("private_hides_inherited", &|| {
        let e = check("private_hides_inherited", Preset::Java);
        ensure!(codes(&e) == [Code::Inaccessible], "{:?}", codes(&e));
        ensure!(bound_class(&e, "y", "x").as_deref() == Some("p.B"), "binds elsewhere");
        Ok(())
    })?;
    timed("accessible_shadowing", &|| {
        let e = check("accessible_shadowing", Preset::Java);
        ensure!(e.is_clean(), "{}", e.diagnostics_text());
        ensure!(bound_class(&e, "z", "x").as_deref() == Some("p.B"), "x");
        ensure!(bound_class(&e, "z", "y").as_deref() == Some("p.A"), "y");
        Ok(())
    })?;
    Ok("12 programs, each under 1 s".into())
}

const NAMES: [&str; 3] = ["x", "y", "z"];
const REGEXES: [&str; 6] = [
    "LEX* IMP? VAR",
    "LEX* EXT* VAR",
    "LEX* (EXT|EXT_PRT|EXT_PRV)* VAR",
    "(LEX|IMP|EXT)* (VAR|CLS)",
    "EXT* VAR",
    "(LEX IMP?)* VAR",
];
const ORDERS: [&str; 5] = [
    "VAR < IMP < LEX",
    "VAR < EXT < LEX",
    "VAR < LEX < IMP",
    "VAR < IMP, VAR < LEX",
    "CLS < VAR < EXT_PRV < LEX",
];

fn oracle_graph(rng: &mut ChaCha8Rng) -> G {
    let mut g = G::new();
    let n = rng.gen_range(1..=8);
    let scopes: Vec<ScopeId> = (0..n).map(|i| g.add_scope(format!("s{i}")).unwrap()).collect();
    let labels = [Label::Lex, Label::Imp, Label::Ext, Label::ExtPrt, Label::ExtPrv];
    for _ in 0..rng.gen_range(0..=16) {
        let l = labels[rng.gen_range(0..labels.len())];
        g.add_edge(scopes[rng.gen_range(0..n)], l, scopes[rng.gen_range(0..n)]).unwrap();
    }
    for _ in 0..rng.gen_range(0..=6) {
        let l = if rng.gen_bool(0.8) { Label::Var } else { Label::Cls };
        let data = Data::Var(NAMES[rng.gen_range(0..NAMES.len())], rng.gen_range(0..3));
        g.add_decl(scopes[rng.gen_range(0..n)], l, data).unwrap();
    }
    g.freeze();
    g
}

fn criterion_oracle() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_5c09e);
    let mut nonempty = 0;
    for trial in 0..1000 {
        let g = oracle_graph(&mut rng);
        let start = ScopeId::from_index(rng.gen_range(0..g.scope_count()));
        let regex: LabelRegex<Label> = parse_regex(REGEXES[rng.gen_range(0..REGEXES.len())]).unwrap();
        let name = NAMES[rng.gen_range(0..NAMES.len())];
        let pred = |d: &Data| matches!(d, Data::Var(x, _) if *x == name);
        let choice = rng.gen_range(0..=ORDERS.len());
        let (mine, theirs) = if choice == ORDERS.len() {
            (
                resolve(&g, start, &regex, &pred, &CandidateOrder::None),
                brute_force_resolve(&g, start, &regex, &pred, OracleOrder::None),
            )
        } else {
            let order: LabelOrder<Label> = ORDERS[choice].parse().unwrap();
            (
                resolve(&g, start, &regex, &pred, &CandidateOrder::Labels(order.clone())),
                brute_force_resolve(&g, start, &regex, &pred, OracleOrder::Labels(&order)),
            )
        };
        let set = |cs: &[scopegraph::Candidate<Label, Data>]| -> BTreeSet<_> {
            cs.iter().map(|c| (c.path.clone(), c.label, c.data.clone())).collect()
        };
        ensure!(set(&mine) == set(&theirs), "graph {trial}: resolver and oracle differ");
        nonempty += usize::from(!mine.is_empty());
    }
    let secs = t.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "took {secs:.1} s");
    Ok(format!("1000 graphs, {nonempty} with answers, {secs:.2} s"))
}

fn universe_policies() -> Vec<Policy> {
    let universe: Vec<ScopeId> = (0..3).map(ScopeId::from_index).collect();
    let mut out = vec![Policy::Pub, Policy::Prt, Policy::Prv];
    for mask in 0..8u32 {
        let s: ScopeSet = universe.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, x)| *x).collect();
        out.extend([Policy::Mod(s.clone()), Policy::Smd(s.clone()), Policy::Smc(s)]);
    }
    out
}

fn criterion_metatheory() -> Outcome {
    let all = universe_policies();
    for a in &all {
        ensure!(!policy_lt(a, a), "{a} < {a}");
        for b in &all {
            ensure!(!(policy_lt(a, b) && policy_lt(b, a)), "{a} and {b} both ways");
            for c in &all {
                ensure!(!(policy_lt(a, b) && policy_lt(b, c)) || policy_lt(a, c), "{a} < {b} < {c}");
            }
        }
    }
    let empty = ScopeSet::new();
    let mut informative = 0usize;
    let mut trials = 0usize;
    for preset in Preset::ALL {
        let cfg = preset.config();
        let mut rng = ChaCha8Rng::seed_from_u64(0xacce55);
        for trial in 0..10_000 {
            let (g, modules) = random_graph(&mut rng, 8);
            let s = ScopeId::from_index(rng.gen_range(0..g.scope_count()));
            let start = ScopeId::from_index(rng.gen_range(0..g.scope_count()));
            let p = random_path(&mut rng, &g, start, 4);
            let a = random_policy(&mut rng, &modules);
            let b = random_policy(&mut rng, &modules);
            let ok = |x: &Policy| permits(&g, s, &p, x, &cfg);
            trials += 1;
            for (lo, hi) in [(&a, &b), (&b, &a)] {
                if policy_lt(lo, hi) && ok(lo) {
                    informative += 1;
                    ensure!(ok(hi), "{preset} trial {trial}: well-behavedness, {lo} < {hi}");
                }
            }
            ensure!(ok(&Policy::Prt) == ok(&Policy::Smd(empty.clone())), "{preset} trial {trial}: PRT vs SMD{{}}");
            ensure!(ok(&Policy::Prv) == ok(&Policy::Smc(empty.clone())), "{preset} trial {trial}: PRV vs SMC{{}}");
            ensure!(ok(&Policy::Prv) == ok(&Policy::Mod(empty.clone())), "{preset} trial {trial}: PRV vs MOD{{}}");
            ensure!(!ok(&Policy::Prv) || ok(&a), "{preset} trial {trial}: PRV permits, {a} does not");
            if let Some(set) = a.module_set() {
                let mut bigger = set.clone();
                bigger.insert(modules[rng.gen_range(0..modules.len())]);
                let widened = match &a {
                    Policy::Mod(_) => Policy::Mod(bigger),
                    Policy::Smd(_) => Policy::Smd(bigger),
                    _ => Policy::Smc(bigger),
                };
                ensure!(!ok(&a) || ok(&widened), "{preset} trial {trial}: {a} permits, {widened} does not");
            }
            ensure!(ok(&a) == ok(&normalize(&a)), "{preset} trial {trial}: normal form of {a}");
        }
    }
    ensure!(equivalent(&Policy::Prt, &Policy::Smd(empty.clone())), "PRT and SMD{{}} not identified");
    Ok(format!("{trials} trials over {} presets, {informative} ordered pairs exercised", Preset::ALL.len()))
}

fn matrices() -> Vec<(Target, Matrix)> {
    Target::ALL.into_iter().map(|t| (t, generate_matrix(t))).collect()
}

fn criterion_soundness(corpora: &[(Target, Matrix)]) -> Outcome {
    let mut checked = 0;
    for (target, m) in corpora {
        let cfg = target.preset().config();
        for c in m.cases.iter().filter(|c| c.expected == Expected::Accept) {
            let v = verify_all(&elaborate(&c.program, &cfg), &cfg);
            ensure!(v.is_empty(), "{}: {}", c.id, v[0]);
            checked += 1;
        }
    }
    let per_preset = 10_000 / Preset::ALL.len();
    let mut random_clean = 0;
    for (i, preset) in Preset::ALL.into_iter().enumerate() {
        let cfg = preset.config();
        let opts = GenOptions { extends_modifiers: cfg.inheritance_modifiers, ..GenOptions::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(0x50_0000 + i as u64);
        for n in 0..per_preset {
            let raw = random_program(&mut rng, &opts);
            let Some(p) = repair(&raw, &cfg) else { continue };
            let e = elaborate(&p, &cfg);
            if !e.is_clean() {
                continue;
            }
            let v = verify_all(&e, &cfg);
            ensure!(v.is_empty(), "{preset} program {n}: {}\n{}", v[0], pretty_print(&p));
            random_clean += 1;
        }
    }
    ensure!(random_clean >= 9_000, "only {random_clean} of 10000 random programs came out clean");

    // Injected fault: accepted under the any-enclosing rule, verified under
    // the innermost one.
    let e = elaborate(&program("internal_outer_module"), &Preset::Base.config());
    let mut innermost = Preset::Base.config();
    innermost.internal_reference_rule = ReferenceRule::Innermost;
    let faults = verify_all(&e, &innermost).len();
    ensure!(e.is_clean() && faults >= 1, "injected fault not detected");
    Ok(format!("{checked} corpus cases, {random_clean} random programs clean and verified, injected fault caught ({faults})"))
}

fn criterion_golden(corpora: &[(Target, Matrix)]) -> Outcome {
    use aml_conformance::golden::golden_files;
    use aml_conformance::matrix::applicable;
    let dir = format!("{}/../conformance/tests/golden", env!("CARGO_MANIFEST_DIR"));
    let mut counts = Vec::new();
    for (target, m) in corpora {
        for (name, text) in golden_files(*target, m) {
            let stored = std::fs::read_to_string(format!("{dir}/{name}")).map_err(|e| format!("{name}: {e}"))?;
            ensure!(stored == text, "{name} does not regenerate byte-identically");
        }
        let wanted: BTreeSet<String> = applicable(*target)
            .iter()
            .flat_map(|d| [d.inheritance.to_string(), d.module_pos.to_string(), d.nesting.to_string(), d.receiver.to_string()])
            .collect();
        let seen: BTreeSet<String> = m
            .cases
            .iter()
            .flat_map(|c| {
                let d = c.dimensions;
                [d.inheritance.to_string(), d.module_pos.to_string(), d.nesting.to_string(), d.receiver.to_string()]
            })
            .collect();
        ensure!(seen == wanted, "{target}: dimension values not covered: {:?}", wanted.difference(&seen).collect::<Vec<_>>());
        for c in &m.cases {
            let d = c.dimensions;
            use aml_conformance::matrix::{Inheritance, ModulePos, Nesting};
            ensure!(
                d.nesting == Nesting::Toplevel && d.inheritance != Inheritance::Same || d.module_pos == ModulePos::Same,
                "{}: nested or same-class case spans modules",
                c.id
            );
            ensure!(
                !matches!(
                    (d.nesting, d.inheritance),
                    (Nesting::RefInDef, Inheritance::DefInheritsRef) | (Nesting::DefInRef, Inheritance::RefInheritsDef)
                ),
                "{}: cyclic inheritance",
                c.id
            );
            ensure!(
                matches!(aml_conformance::translate(&c.program, *target), aml_conformance::TranslationResult::Sources(_)),
                "{}: untranslatable case kept",
                c.id
            );
            let e = elaborate(&c.program, &target.preset().config());
            ensure!(e.bindings.len() == 1, "{}: does not bind once", c.id);
        }
        counts.push(format!("{target} {}", m.cases.len()));
    }
    Ok(format!("cases: {}", counts.join(", ")))
}

fn criterion_differential(corpora: &[(Target, Matrix)]) -> Outcome {
    let mut lines = Vec::new();
    for (target, m) in corpora.iter().filter(|(t, _)| *t != Target::Aml) {
        match compiler_command(*target) {
            None => lines.push(format!("{target}: no compiler, not run")),
            Some(cmd) => {
                let r = run_differential(&m.cases, *target, Some(&cmd));
                ensure!(r.failures() == 0, "{target}: {} FAIL", r.failures());
                let skipped = r.count(|o| matches!(o, aml_conformance::Outcome::Skip { .. }));
                lines.push(format!("{target}: {} pass, 0 fail, {skipped} skip", r.passes()));
            }
        }
    }
    Ok(lines.join("; "))
}

fn holed(c: &TestCase) -> (Program, NodeId) {
    let mut p = c.program.clone();
    let x = p.fields().into_iter().find(|f| f.name.name == "x").map(|f| f.id).expect("Def.x");
    p.field_mut(x).unwrap().modifier.keyword = None;
    (p, x)
}

fn criterion_synthesis(corpora: &[(Target, Matrix)]) -> Outcome {
    // Cases that differ only in the modifier collapse to one holed program.
    let mut groups: BTreeMap<(&str, String), (Preset, Vec<&TestCase>)> = BTreeMap::new();
    for (target, m) in corpora {
        let preset = target.preset();
        for c in &m.cases {
            groups.entry((preset.name(), pretty_print(&holed(c).0))).or_insert((preset, Vec::new())).1.push(c);
        }
    }
    let mut proposals = 0;
    for (preset, cases) in groups.values() {
        let cfg = preset.config();
        let (p, x) = holed(cases[0]);
        let r = synthesize(&p, &cfg);
        let h = &r.holes[&x];
        let mut public = p.clone();
        public.field_mut(x).unwrap().modifier.keyword = Some(aml_core::ast::AccKeyword::Public);
        let base = elaborate(&public, &cfg);
        for prop in &h.valid {
            let mut filled = p.clone();
            let kw = render_keyword(&base, base.fields[&x].class, &prop.policy).ok_or("proposal without keyword")?;
            ensure!(kw.to_string() == prop.keyword, "{}: keyword {} rendered as {kw}", cases[0].id, prop.keyword);
            filled.field_mut(x).unwrap().modifier.keyword = Some(kw);
            let e = elaborate(&filled, &cfg);
            ensure!(e.is_clean(), "{}: proposal {} does not re-check: {}", cases[0].id, prop.keyword, e.diagnostics_text());
            proposals += 1;
        }
        for m in &h.minimal {
            ensure!(!h.valid.iter().any(|v| policy_lt(&v.policy, &m.policy)), "{}: {} not minimal", cases[0].id, m.keyword);
        }
        for v in &h.valid {
            let below = h.valid.iter().any(|w| policy_lt(&w.policy, &v.policy));
            ensure!(below != h.minimal.contains(v), "{}: minimal set is not the minimal elements", cases[0].id);
        }
        for c in cases {
            let original = normalize(&elaborate(&c.program, &cfg).fields[&x].policy);
            let proposed = h.valid.iter().any(|v| v.policy == original);
            ensure!(
                proposed == (c.expected == Expected::Accept),
                "{}: original proposed = {proposed}, expected {:?}",
                c.id,
                c.expected
            );
        }
    }
    Ok(format!("{} holed programs, {proposals} proposals re-checked", groups.len()))
}

fn main() {
    let corpora = matrices();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 known programs", Box::new(criterion_known_programs)),
        ("2 oracle equivalence", Box::new(criterion_oracle)),
        ("3 order properties", Box::new(criterion_metatheory)),
        ("4 soundness verifiers", Box::new(|| criterion_soundness(&corpora))),
        ("5 conformance golden suite", Box::new(|| criterion_golden(&corpora))),
        ("6 differential lane", Box::new(|| criterion_differential(&corpora))),
        ("7 modifier synthesis", Box::new(|| criterion_synthesis(&corpora))),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(e.downcast_ref::<String>().cloned().unwrap_or_else(|| "panicked".into())));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}) [{secs:.2} s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
