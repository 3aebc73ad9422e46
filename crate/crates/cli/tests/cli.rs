use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn programs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/programs")
}

fn program(name: &str) -> String {
    programs().join(format!("{name}.aml")).display().to_string()
}

fn amlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amlc")).args(args).output().expect("amlc runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn structured(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "structured"];
    all.extend_from_slice(args);
    let o = amlc(&all);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stderr(&o)));
    assert_valid(&v);
    (code(&o), v)
}

fn assert_valid(v: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/amlc-output.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    let msgs: Vec<String> = match compiled.validate(v) {
        Ok(()) => Vec::new(),
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    assert!(msgs.is_empty(), "output violates schema: {msgs:#?}\n{v:#}");
}

#[test]
fn check_exit_codes_follow_verdicts() {
    let o = amlc(&["check", "--preset", "java", &program("private_hides_inherited")]);
    assert_eq!(code(&o), 1);
    let err = stderr(&o);
    assert_eq!(err.matches("E_INACCESSIBLE").count(), 1, "{err}");
    assert!(o.stdout.is_empty());

    let o = amlc(&["check", "--preset", "csharp", &program("private_via_subclass_instance")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = amlc(&["check", "--preset", "java", &program("private_via_subclass_instance")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn command_line_overrides_pragmas() {
    // The file asks for the C++ preset, whose extends modifiers make it clean.
    let f = program("private_extends");
    assert_eq!(code(&amlc(&["check", &f])), 0);
    let o = amlc(&["check", "--preset", "base", &f]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("E_UNSUPPORTED"));
    assert_eq!(code(&amlc(&["check", "--preset", "base", "--inheritance-modifiers", &f])), 0);
}

#[test]
fn variant_flags() {
    let f = program("internal_outer_module");
    assert_eq!(code(&amlc(&["check", &f])), 0);
    let o = amlc(&["check", "--internal-variant", "innermost", &f]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("E_INACCESSIBLE"));
    let o = amlc(&["check", "--internal-variant=ancestor", &f]);
    assert!(stderr(&o).contains("E_BAD_INTERNAL_ARG"));
    // A later `base` resets earlier variants.
    let o = amlc(&["check", "--internal-variant", "innermost", "--internal-variant", "base", &f]);
    assert_eq!(code(&o), 0);

    let f = program("private_from_enclosing");
    assert_eq!(code(&amlc(&["check", "--private", "java", &f])), 0);
    assert_eq!(code(&amlc(&["check", "--private", "csharp", &f])), 1);

    let f = program("accessible_shadowing");
    assert_eq!(code(&amlc(&["check", "--preset", "java", &f])), 0);
    assert_eq!(code(&amlc(&["check", "--preset", "java", "--resolution", "label-order", &f])), 1);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["check", "--bogus", "x.aml"][..],
        &["check"],
        &["frobnicate"],
        &["check", "--preset", "cobol", "x.aml"],
        &["check", "--internal-variant", "outermost", "x.aml"],
        &["check", "/nonexistent/file.aml"],
        &["gen-tests", "--target", "fortran", "--out", "x"],
    ] {
        let o = amlc(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    assert_eq!(code(&amlc(&["--help"])), 0);
}

#[test]
fn syntax_errors_are_findings() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.aml");
    std::fs::write(&f, "class A { public var }").unwrap();
    let o = amlc(&["check", f.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("E_SYNTAX"));
    let (c, v) = structured(&["check", f.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert!(v["files"][0]["error"].as_str().unwrap().contains("expected"));

    std::fs::write(&f, "#pragma preset=cobol\nclass A { }").unwrap();
    let o = amlc(&["check", f.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("pragma"));
}

#[test]
fn structured_check_output() {
    let (c, v) = structured(&["check", "--preset", "java", &program("private_via_subclass_instance")]);
    assert_eq!(c, 1);
    let d = &v["files"][0]["diagnostics"][0];
    assert_eq!(d["code"], "E_INACCESSIBLE");
    assert_eq!(d["policy"], "PRV");
    assert_eq!(v["files"][0]["config"]["resolution_mode"], "full_path_order");
    let (c, v) = structured(&["check", &program("inherited_field"), &program("import_not_transitive")]);
    assert_eq!(c, 1);
    assert_eq!(v["files"].as_array().unwrap().len(), 2);
    assert_eq!(v["files"][1]["diagnostics"][0]["code"], "E_UNRESOLVED");
}

#[test]
fn synth_proposes_minimal_modifiers() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("holes.aml");
    std::fs::write(&f, "class A { ? var i = 42 ? var k = 1 } class B : public A { public var j = i }").unwrap();
    let f = f.to_str().unwrap();
    let o = amlc(&["synth", "--preset", "java", f]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("A.i: protected (PRT)"), "{text}");
    assert!(text.contains("A.k: private (PRV)"), "{text}");
    assert!(!text.contains("valid:"));
    let o = amlc(&["synth", "-v", "--preset", "java", f]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("valid: "));

    let (c, v) = structured(&["synth", "--preset", "java", f]);
    assert_eq!(c, 0);
    let holes = v["files"][0]["holes"].as_array().unwrap();
    assert_eq!(holes.len(), 2);
    assert_eq!(holes[0]["minimal"][0]["keyword"], "protected");
    assert!(holes[0].get("valid").is_none());
    let (_, v) = structured(&["synth", "--verbose", "--preset", "java", f]);
    assert!(v["files"][0]["holes"][0]["valid"].as_array().unwrap().len() > 1);

    let o = amlc(&["synth", &program("inherited_field")]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("no holes"));
}

#[test]
fn graph_prints_dot() {
    let o = amlc(&["graph", &program("inherited_field")]);
    assert_eq!(code(&o), 0);
    let dot = String::from_utf8(o.stdout).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("[label=\"EXT\"]"));
    assert_eq!(dot.matches("label=\"VAR\"").count(), 2);
    assert!(dot.trim_end().ends_with('}'));
}

#[test]
fn verify_reports_no_violations_on_known_programs() {
    let files: Vec<String> = std::fs::read_dir(programs())
        .unwrap()
        .map(|e| e.unwrap().path().display().to_string())
        .collect();
    let mut args = vec!["verify"];
    args.extend(files.iter().map(String::as_str));
    let o = amlc(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let (c, v) = structured(&args);
    assert_eq!(c, 0);
    assert_eq!(v["files"].as_array().unwrap().len(), files.len());
}

#[test]
fn gen_tests_writes_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suite");
    let (c, v) = structured(&["gen-tests", "--target", "rust", "--out", out.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["cases"], 11);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join("rust.json")).unwrap()).unwrap();
    for case in manifest["cases"].as_array().unwrap() {
        for f in case["files"].as_array().unwrap() {
            assert!(out.join(f.as_str().unwrap()).is_file(), "{f}");
        }
    }
    assert!(out.join("rust.spt").is_file());
}

#[test]
fn diff_without_compiler_is_golden_only() {
    let o = Command::new(env!("CARGO_BIN_EXE_amlc"))
        .args(["diff", "--target", "java"])
        .env("AMLC_JAVAC", "definitely-not-javac-amlc")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("compiler not found"));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("0 pass, 0 fail, 158 skip"), "{text}");

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = Command::new(env!("CARGO_BIN_EXE_amlc"))
        .args(["--format", "structured", "diff", "--target", "csharp", "--out", report.to_str().unwrap()])
        .env("AMLC_DOTNET", "definitely-not-dotnet-amlc")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_valid(&v);
    assert_eq!(v["report"]["compiler"], Value::Null);
    assert!(report.is_file());
}
