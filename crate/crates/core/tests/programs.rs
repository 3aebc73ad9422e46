use aml_core::checker::Code;
use aml_core::config::{Preset, ReferenceRule, VariantConfig};
use aml_core::{elaborate, parse_program, pretty_print, Elaboration};
use scopegraph::Label;

fn source(name: &str) -> String {
    let path = format!("{}/tests/programs/{name}.aml", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn check_with(name: &str, base: VariantConfig) -> Elaboration {
    let prog = parse_program(&source(name)).unwrap();
    let cfg = VariantConfig::with_pragmas(base, &prog.pragmas).unwrap();
    elaborate(&prog, &cfg)
}

fn check(name: &str, preset: Preset) -> Elaboration {
    check_with(name, preset.config())
}

fn codes(e: &Elaboration) -> Vec<Code> {
    e.diagnostics.iter().map(|d| d.code).collect()
}

/// The single binding of the reference named `x` (bare or member) found in
/// the initializer of field `field`.
fn target_of(e: &Elaboration, field: &str, x: &str) -> String {
    let hits: Vec<_> = e
        .bindings
        .values()
        .filter(|b| b.decl.name == x)
        .filter(|b| {
            e.fields
                .values()
                .any(|f| f.name == field && e.graph.name(f.class) == e.graph.name(b.scope))
        })
        .collect();
    assert_eq!(hits.len(), 1, "{field}/{x}: {hits:?}");
    e.graph.name(hits[0].path.tgt()).to_string()
}

#[test]
fn all_programs_round_trip() {
    for name in [
        "private_hides_inherited", "accessible_shadowing", "import_not_transitive", "import_shadows_enclosing", "inherited_field", "private_via_subclass_instance", "private_from_enclosing", "internal_outer_module", "protected_via_subclass_instance",
        "protected_via_base_instance", "private_extends", "protected_extends",
    ] {
        let p = parse_program(&source(name)).unwrap();
        let again = parse_program(&pretty_print(&p)).unwrap();
        assert_eq!(again.shape(), p.shape(), "{name}");
    }
}

#[test]
fn import_not_transitive_unresolved() {
    let e = check("import_not_transitive", Preset::Base);
    assert_eq!(codes(&e), vec![Code::Unresolved]);
}

#[test]
fn import_shadows_enclosing_class() {
    let e = check("import_shadows_enclosing", Preset::Base);
    assert!(e.is_clean(), "{}", e.diagnostics_text());
    let r = e.fields.values().find(|f| f.name == "r").unwrap();
    assert_eq!(r.ty.to_string(), format!("inst {}", find_scope(&e, "F.X")));
}

fn find_scope(e: &Elaboration, name: &str) -> scopegraph::ScopeId {
    e.graph.scopes().find(|s| e.graph.name(*s) == name).unwrap()
}

#[test]
fn inherited_field_is_clean() {
    let e = check("inherited_field", Preset::Base);
    assert!(e.is_clean());
    let b = e.bindings.values().next().unwrap();
    assert_eq!(b.path.labels(), vec![Label::Ext]);
    assert_eq!(e.graph.name(b.path.tgt()), "A");
    assert_eq!(e.fields.values().find(|f| f.name == "j").unwrap().ty.to_string(), "int");
}

#[test]
fn private_via_subclass_instance_java_rejects_csharp_accepts() {
    assert_eq!(codes(&check("private_via_subclass_instance", Preset::Java)), vec![Code::Inaccessible]);
    assert!(check("private_via_subclass_instance", Preset::Csharp).is_clean());
}

#[test]
fn private_from_enclosing_java_accepts_csharp_rejects() {
    assert!(check("private_from_enclosing", Preset::Java).is_clean());
    assert_eq!(codes(&check("private_from_enclosing", Preset::Csharp)), vec![Code::Inaccessible]);
}

#[test]
fn internal_outer_module_variants() {
    assert!(check("internal_outer_module", Preset::Base).is_clean());

    let mut ancestors = Preset::Base.config();
    ancestors.internal_args_must_be_ancestors = true;
    let e = check_with("internal_outer_module", ancestors);
    assert!(codes(&e).contains(&Code::BadInternalArg));

    let mut innermost = Preset::Base.config();
    innermost.internal_reference_rule = ReferenceRule::Innermost;
    assert_eq!(codes(&check_with("internal_outer_module", innermost)), vec![Code::Inaccessible]);
}

#[test]
fn protected_through_subclass_instance() {
    for preset in Preset::ALL {
        assert!(check("protected_via_subclass_instance", preset).is_clean(), "{preset}");
        assert_eq!(
            codes(&check("protected_via_base_instance", preset)),
            vec![Code::Inaccessible],
            "{preset}"
        );
    }
}

#[test]
fn extends_modifiers() {
    let e = check("private_extends", Preset::CppInheritance);
    assert!(e.is_clean(), "{}", e.diagnostics_text());
    let b = e.bindings.values().next().unwrap();
    assert_eq!(b.path.labels(), vec![Label::Ext, Label::ExtPrv]);
    assert_eq!(codes(&check("protected_extends", Preset::CppInheritance)), vec![Code::PathHidden]);
}

#[test]
fn private_field_hides_inherited() {
    let e = check("private_hides_inherited", Preset::Java);
    assert_eq!(codes(&e), vec![Code::Inaccessible]);
    assert_eq!(target_of(&e, "y", "x"), "p.B");
}

#[test]
fn accessibility_aware_shadowing() {
    let e = check("accessible_shadowing", Preset::Java);
    assert!(e.is_clean(), "{}", e.diagnostics_text());
    assert_eq!(target_of(&e, "z", "x"), "p.B");
    assert_eq!(target_of(&e, "z", "y"), "p.A");
}

#[test]
fn label_order_prefers_inherited() {
    let mut cfg = Preset::Java.config();
    cfg.resolution_mode = aml_core::config::ResolutionMode::LabelOrder;
    let prog = parse_program(&source("accessible_shadowing")).unwrap();
    let e = elaborate(&prog, &cfg);
    assert_eq!(target_of(&e, "z", "x"), "p.A");
    assert_eq!(codes(&e), vec![Code::Inaccessible]);
}

#[test]
fn cyclic_field_types() {
    let p = parse_program("class A { public var a = b public var b = a }").unwrap();
    let e = elaborate(&p, &VariantConfig::default());
    assert_eq!(codes(&e), vec![Code::CyclicType]);
    let p = parse_program("class A { public var a = a }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::CyclicType]);
}

#[test]
fn new_gives_instance_type() {
    let p = parse_program("class A { public var p = new A() }").unwrap();
    let e = elaborate(&p, &VariantConfig::default());
    assert!(e.is_clean());
    let f = e.fields.values().next().unwrap();
    assert_eq!(f.ty, aml_core::Type::Inst(f.class));
}

#[test]
fn local_field_zero_step_path() {
    let p = parse_program("class A { private var x = 1 private var y = x }").unwrap();
    let e = elaborate(&p, &Preset::Java.config());
    assert!(e.is_clean());
    assert!(e.bindings.values().next().unwrap().path.is_empty());
}

#[test]
fn missing_member_is_unresolved() {
    let p = parse_program("class A { } class B { public var y = new A().x }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::Unresolved]);
}

#[test]
fn type_mismatch_on_addition() {
    let p = parse_program("class A { public var y = 1 + new A() }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::TypeMismatch]);
    let p = parse_program("class A { public var y = 1 public var z = y.q }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::TypeMismatch]);
}

#[test]
fn extends_modifier_needs_feature() {
    let p = parse_program("class A { } class B : private A { }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::Unsupported]);
}

#[test]
fn cyclic_inheritance() {
    let p = parse_program("class A : public B { } class B : public A { }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::CyclicType]);
}

#[test]
fn duplicate_fields_are_ambiguous() {
    let p = parse_program("class A { public var x = 1 public var x = 2 public var y = x }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::Ambiguous]);
}

#[test]
fn unresolved_internal_argument() {
    let p = parse_program("class A { internal(Q) var x = 1 }").unwrap();
    assert_eq!(codes(&elaborate(&p, &VariantConfig::default())), vec![Code::Unresolved]);
}

#[test]
fn qualified_module_names() {
    let p = parse_program(
        "module M { module N { class C { internal(M.N) var x = 1 } } }
         module K { import M.N class D { public var y = new C().x } }",
    )
    .unwrap();
    let e = elaborate(&p, &VariantConfig::default());
    assert_eq!(codes(&e), vec![Code::Inaccessible]);
    let f = e.fields.values().find(|f| f.name == "x").unwrap();
    assert_eq!(f.policy.display(&e.graph).to_string(), "MOD{M.N}");
}

#[test]
fn diagnostics_render_line_col_code() {
    let e = check("private_via_subclass_instance", Preset::Java);
    let text = e.diagnostics_text();
    assert!(text.starts_with("4:18:E_INACCESSIBLE:"), "{text}");
    let json = serde_json::to_value(&e.diagnostics).unwrap();
    assert_eq!(json[0]["code"], "E_INACCESSIBLE");
    assert_eq!(json[0]["policy"], "PRV");
    assert_eq!(json[0]["path"]["labels"][0], "EXT");
}

#[test]
fn elaboration_is_deterministic() {
    for name in ["accessible_shadowing", "internal_outer_module", "private_extends"] {
        let a = check(name, Preset::Base);
        let b = check(name, Preset::Base);
        assert_eq!(a.diagnostics, b.diagnostics);
        assert_eq!(a.bindings, b.bindings);
        assert_eq!(aml_core::decl::graph_to_dot(&a.graph), aml_core::decl::graph_to_dot(&b.graph));
    }
}
