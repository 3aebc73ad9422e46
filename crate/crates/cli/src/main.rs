//! `amlc`: check, synthesize, graph and test AML programs.
//!
//! Exit codes: 0 ok, 1 findings, 2 usage error, 3 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aml_conformance::golden::write_suite;
use aml_conformance::{compiler_command, generate_matrix, run_differential, Target};
use aml_core::config::{Preset, ReferenceRule, ResolutionMode};
use aml_core::decl::graph_to_dot;
use aml_core::metatheory::{verify_all, Violation};
use aml_core::synthesis::{synthesize, HoleResult, Proposal};
use aml_core::{elaborate, parse_program_with_holes, Diagnostic, Elaboration, VariantConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "amlc", version, about = "Access-modifier checker for AML")]
struct Cli {
    #[command(flatten)]
    variant: VariantFlags,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct VariantFlags {
    /// Start from a preset; applied after in-file pragmas.
    #[arg(long, global = true, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// Module-accessibility variant; may be repeated.
    #[arg(long = "internal-variant", global = true, value_enum)]
    internal_variant: Vec<InternalVariant>,
    /// Private-member rule.
    #[arg(long, global = true, value_enum)]
    private: Option<PrivateRule>,
    #[arg(long, global = true, value_enum)]
    resolution: Option<Resolution>,
    /// Allow `protected`/`private` on extends clauses.
    #[arg(long = "inheritance-modifiers", global = true)]
    inheritance_modifiers: bool,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|_| format!("expected one of base, java, csharp, rust-modules, cpp-inheritance, custom; got `{s}`"))
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InternalVariant {
    Base,
    Ancestor,
    Innermost,
    WholePath,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PrivateRule {
    Java,
    Csharp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Resolution {
    LabelOrder,
    FullPathOrder,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TargetArg {
    Java,
    Csharp,
    Rust,
    Aml,
}

impl From<TargetArg> for Target {
    fn from(t: TargetArg) -> Target {
        match t {
            TargetArg::Java => Target::Java,
            TargetArg::Csharp => Target::Csharp,
            TargetArg::Rust => Target::Rust,
            TargetArg::Aml => Target::Aml,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report diagnostics; exit 1 if there are any.
    Check { #[arg(required = true)] files: Vec<PathBuf> },
    /// Propose modifiers for `?` holes.
    Synth {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Also list every valid policy, not only the minimal ones.
        #[arg(short, long)]
        verbose: bool,
    },
    /// Print the scope graph in DOT.
    Graph { file: PathBuf },
    /// Write a conformance suite (manifest, SPT file, sources).
    GenTests {
        #[arg(long, value_enum)]
        target: TargetArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compile the conformance suite with the target's compiler.
    Diff {
        #[arg(long, value_enum)]
        target: TargetArg,
        /// Also write the report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the soundness verifiers over each program's bindings.
    Verify { #[arg(required = true)] files: Vec<PathBuf> },
}

enum Failure {
    Usage(String),
    Internal(String),
}

impl VariantFlags {
    /// Pragmas first, then the command line.
    fn resolve(&self, pragmas: &[aml_core::ast::Pragma]) -> Result<VariantConfig, String> {
        let mut cfg = VariantConfig::with_pragmas(VariantConfig::default(), pragmas).map_err(|e| e.to_string())?;
        if let Some(p) = self.preset {
            cfg = p.config();
        }
        for v in &self.internal_variant {
            match v {
                InternalVariant::Base => {
                    cfg.internal_args_must_be_ancestors = false;
                    cfg.internal_reference_rule = ReferenceRule::AnyEnclosing;
                    cfg.internal_whole_path = false;
                }
                InternalVariant::Ancestor => cfg.internal_args_must_be_ancestors = true,
                InternalVariant::Innermost => cfg.internal_reference_rule = ReferenceRule::Innermost,
                InternalVariant::WholePath => cfg.internal_whole_path = true,
            }
        }
        if let Some(p) = self.private {
            let java = p == PrivateRule::Java;
            cfg.private_path_must_be_lexical = java;
            cfg.private_shared_enclosing = java;
        }
        match self.resolution {
            Some(Resolution::LabelOrder) => cfg.resolution_mode = ResolutionMode::LabelOrder,
            Some(Resolution::FullPathOrder) => cfg.resolution_mode = ResolutionMode::FullPathOrder,
            None => {}
        }
        if self.inheritance_modifiers {
            cfg.inheritance_modifiers = true;
        }
        Ok(cfg)
    }
}

/// A loaded input: either elaborated, or a file-level error (syntax or
/// pragma) reported as a finding.
struct Loaded {
    file: String,
    cfg: Option<VariantConfig>,
    program: Option<aml_core::ast::Program>,
    result: Result<Elaboration, String>,
}

fn load(path: &Path, flags: &VariantFlags) -> Result<Loaded, Failure> {
    let file = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{file}: {e}")))?;
    let program = match parse_program_with_holes(&text) {
        Ok(p) => p,
        Err(e) => return Ok(Loaded { file, cfg: None, program: None, result: Err(format!("{e} [E_SYNTAX]")) }),
    };
    let cfg = match flags.resolve(&program.pragmas) {
        Ok(c) => c,
        Err(e) => return Ok(Loaded { file, cfg: None, program: None, result: Err(format!("pragma: {e}")) }),
    };
    let e = elaborate(&program, &cfg);
    Ok(Loaded { file, cfg: Some(cfg), program: Some(program), result: Ok(e) })
}

fn print_json(v: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(v).map_err(|e| Failure::Internal(e.to_string()))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct FileReport<T: Serialize> {
    file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<VariantConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(flatten)]
    body: T,
}

#[derive(Serialize)]
struct CheckBody {
    diagnostics: Vec<Diagnostic>,
}

fn check(files: &[PathBuf], flags: &VariantFlags, format: Format) -> Result<bool, Failure> {
    let mut reports = Vec::new();
    let mut clean = true;
    for path in files {
        let l = load(path, flags)?;
        let (error, diagnostics) = match l.result {
            Ok(e) => (None, e.diagnostics),
            Err(msg) => (Some(msg), Vec::new()),
        };
        clean &= error.is_none() && diagnostics.is_empty();
        if format == Format::Text {
            if let Some(msg) = &error {
                eprintln!("{}:{msg}", l.file);
            }
            for d in &diagnostics {
                eprintln!("{}:{d}", l.file);
            }
        }
        reports.push(FileReport { file: l.file, config: l.cfg, error, body: CheckBody { diagnostics } });
    }
    if format == Format::Structured {
        print_json(&json!({ "command": "check", "files": reports }))?;
    }
    Ok(clean)
}

struct HoleReport<'a> {
    id: u32,
    hole: &'a HoleResult,
}

fn synth(files: &[PathBuf], verbose: bool, flags: &VariantFlags, format: Format) -> Result<bool, Failure> {
    let mut ok = true;
    let mut reports = Vec::new();
    for path in files {
        let l = load(path, flags)?;
        let (Some(program), Some(cfg)) = (&l.program, &l.cfg) else {
            let error = l.result.err();
            if format == Format::Text {
                eprintln!("{}:{}", l.file, error.as_deref().unwrap_or(""));
            }
            reports.push(json!({ "file": l.file, "error": error, "holes": [] }));
            ok = false;
            continue;
        };
        let r = synthesize(program, cfg);
        let holes: Vec<HoleReport> = r.holes.iter().map(|(id, h)| HoleReport { id: id.0, hole: h }).collect();
        ok &= holes.iter().all(|h| !h.hole.minimal.is_empty());
        match format {
            Format::Text => {
                if holes.is_empty() {
                    println!("{}: no holes", l.file);
                }
                for h in &holes {
                    let show = |ps: &[Proposal]| ps.iter().map(|p| format!("{} ({})", p.keyword, p.policy_text)).collect::<Vec<_>>().join(", ");
                    let s = h.hole.span;
                    let minimal = if h.hole.minimal.is_empty() { "none".into() } else { show(&h.hole.minimal) };
                    println!("{}:{}:{}: {}.{}: {minimal}", l.file, s.line, s.col, h.hole.class, h.hole.field);
                    if verbose {
                        println!("  valid: {}", show(&h.hole.valid));
                    }
                }
            }
            Format::Structured => {
                let holes: Vec<_> = holes
                    .iter()
                    .map(|h| {
                        let mut v = json!({
                            "id": h.id,
                            "field": h.hole.field,
                            "class": h.hole.class,
                            "span": h.hole.span,
                            "minimal": h.hole.minimal,
                        });
                        if verbose {
                            v["valid"] = json!(h.hole.valid);
                        }
                        v
                    })
                    .collect();
                reports.push(json!({ "file": l.file, "config": cfg, "holes": holes }));
            }
        }
    }
    if format == Format::Structured {
        print_json(&json!({ "command": "synth", "files": reports }))?;
    }
    Ok(ok)
}

fn graph(file: &Path, flags: &VariantFlags) -> Result<bool, Failure> {
    let l = load(file, flags)?;
    match l.result {
        Ok(e) => {
            print!("{}", graph_to_dot(&e.graph));
            Ok(true)
        }
        Err(msg) => {
            eprintln!("{}:{msg}", l.file);
            Ok(false)
        }
    }
}

fn gen_tests(target: Target, out: &Path, format: Format) -> Result<bool, Failure> {
    let m = generate_matrix(target);
    let written = write_suite(out, target, &m).map_err(|e| Failure::Internal(format!("{}: {e}", out.display())))?;
    match format {
        Format::Text => println!("{target}: {} cases, {written} files written to {}", m.cases.len(), out.display()),
        Format::Structured => print_json(&json!({
            "command": "gen-tests",
            "target": target,
            "out": out.display().to_string(),
            "cases": m.cases.len(),
            "files_written": written,
        }))?,
    }
    Ok(true)
}

fn diff(target: Target, out: Option<&Path>, format: Format) -> Result<bool, Failure> {
    let compiler = compiler_command(target);
    if compiler.is_none() && target != Target::Aml {
        eprintln!("{target}: compiler not found; comparing golden verdicts only");
    }
    let m = generate_matrix(target);
    let report = run_differential(&m.cases, target, compiler.as_deref());
    if let Some(path) = out {
        let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Internal(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Failure::Internal(format!("{}: {e}", path.display())))?;
    }
    let fails = report.failures();
    match format {
        Format::Text => {
            for e in &report.entries {
                if let aml_conformance::Outcome::Fail { detail } = &e.outcome {
                    println!("FAIL {}: {}", e.id, detail.trim_end());
                }
            }
            let skips = report.count(|o| matches!(o, aml_conformance::Outcome::Skip { .. }));
            println!("{target}: {} pass, {fails} fail, {skips} skip", report.passes());
        }
        Format::Structured => print_json(&json!({ "command": "diff", "report": report }))?,
    }
    Ok(fails == 0)
}

#[derive(Serialize)]
struct VerifyBody {
    diagnostics: usize,
    violations: Vec<Violation>,
}

fn verify(files: &[PathBuf], flags: &VariantFlags, format: Format) -> Result<bool, Failure> {
    let mut ok = true;
    let mut reports = Vec::new();
    for path in files {
        let l = load(path, flags)?;
        let (error, body) = match (&l.result, &l.cfg) {
            (Ok(e), Some(cfg)) => (None, VerifyBody { diagnostics: e.diagnostics.len(), violations: verify_all(e, cfg) }),
            (Err(msg), _) => (Some(msg.clone()), VerifyBody { diagnostics: 0, violations: Vec::new() }),
            (Ok(_), None) => return Err(Failure::Internal("elaborated without a configuration".into())),
        };
        ok &= error.is_none() && body.violations.is_empty();
        if format == Format::Text {
            match &error {
                Some(msg) => eprintln!("{}:{msg}", l.file),
                None if body.violations.is_empty() => println!("{}: no violations", l.file),
                None => {
                    for v in &body.violations {
                        println!("{}: {v}", l.file);
                    }
                }
            }
        }
        reports.push(FileReport { file: l.file, config: l.cfg, error, body });
    }
    if format == Format::Structured {
        print_json(&json!({ "command": "verify", "files": reports }))?;
    }
    Ok(ok)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    let f = cli.format;
    let v = &cli.variant;
    match &cli.command {
        Command::Check { files } => check(files, v, f),
        Command::Synth { files, verbose } => synth(files, *verbose, v, f),
        Command::Graph { file } => graph(file, v),
        Command::GenTests { target, out } => gen_tests((*target).into(), out, f),
        Command::Diff { target, out } => diff((*target).into(), out.as_deref(), f),
        Command::Verify { files } => verify(files, v, f),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(true)) => ExitCode::SUCCESS,
        Ok(Ok(false)) => ExitCode::from(1),
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("amlc: {msg}");
            ExitCode::from(2)
        }
        Ok(Err(Failure::Internal(msg))) => {
            eprintln!("amlc: internal error: {msg}");
            ExitCode::from(3)
        }
        Err(_) => ExitCode::from(3),
    }
}
