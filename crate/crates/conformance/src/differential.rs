//! Compiling translated cases with reference compilers and comparing the
//! outcome with the expected verdict.

use std::path::Path;
use std::process::Command;

use aml_core::elaborate;
use rayon::prelude::*;
use serde::Serialize;

use crate::matrix::{Expected, TestCase};
use crate::translate::{translate, Target, TranslationResult};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail { detail: String },
    Skip { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct Entry {
    pub id: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub target: Target,
    /// The compiler command used, or `None` in golden-only mode.
    pub compiler: Option<Vec<String>>,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn count(&self, f: impl Fn(&Outcome) -> bool) -> usize {
        self.entries.iter().filter(|e| f(&e.outcome)).count()
    }

    pub fn failures(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Fail { .. }))
    }

    pub fn passes(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Pass))
    }
}

fn env_var(target: Target) -> Option<&'static str> {
    match target {
        Target::Java => Some("AMLC_JAVAC"),
        Target::Csharp => Some("AMLC_DOTNET"),
        Target::Rust => Some("AMLC_RUSTC"),
        Target::Aml => None,
    }
}

/// The configured compiler command for `target`, from its environment
/// variable or the default, if it can be run at all.
pub fn compiler_command(target: Target) -> Option<Vec<String>> {
    let default = match target {
        Target::Java => "javac",
        Target::Csharp => "dotnet build",
        Target::Rust => "rustc --edition 2021",
        Target::Aml => return None,
    };
    let text = env_var(target).and_then(|v| std::env::var(v).ok()).unwrap_or_else(|| default.to_string());
    probe(&text)
}

/// Splits a command line and checks that its program answers `--version`.
pub fn probe(command: &str) -> Option<Vec<String>> {
    let cmd: Vec<String> = command.split_whitespace().map(String::from).collect();
    let program = cmd.first()?;
    let runs = Command::new(program).arg("--version").output().is_ok_and(|o| o.status.success());
    runs.then_some(cmd)
}

fn compile(target: Target, compiler: &[String], dir: &Path, files: &[String]) -> Result<(), String> {
    let run = |extra: Vec<String>| -> Result<(), String> {
        let out = Command::new(&compiler[0])
            .args(&compiler[1..])
            .args(extra)
            .current_dir(dir)
            .output()
            .map_err(|e| format!("cannot run {}: {e}", compiler[0]))?;
        if out.status.success() {
            Ok(())
        } else {
            Err(String::from_utf8_lossy(&out.stderr).into_owned() + &String::from_utf8_lossy(&out.stdout))
        }
    };
    match target {
        Target::Java => {
            let mut args = vec!["-d".to_string(), "out".to_string()];
            args.extend(files.iter().cloned());
            run(args)
        }
        Target::Csharp => {
            for f in files.iter().filter(|f| f.ends_with(".csproj")) {
                run(vec![f.clone()])?;
            }
            Ok(())
        }
        Target::Rust => run(
            ["--crate-type", "lib", "--crate-name", "aml_case", "--out-dir", "out", "lib.rs"]
                .map(String::from)
                .to_vec(),
        ),
        Target::Aml => Ok(()),
    }
}

fn run_case(case: &TestCase, target: Target, compiler: Option<&[String]>) -> Outcome {
    let files = match translate(&case.program, target) {
        TranslationResult::Unsupported(reason) => return Outcome::Skip { reason: format!("unsupported: {reason}") },
        TranslationResult::Sources(files) => files,
    };
    let Some(compiler) = compiler else {
        let verdict = if elaborate(&case.program, &target.preset().config()).is_clean() {
            Expected::Accept
        } else {
            Expected::Reject
        };
        return if verdict == case.expected {
            Outcome::Skip { reason: "golden".into() }
        } else {
            Outcome::Fail { detail: format!("checker now says {verdict:?}, golden says {:?}", case.expected) }
        };
    };
    let dir = match tempfile::tempdir() {
        Ok(d) => d,
        Err(e) => return Outcome::Fail { detail: format!("temporary directory: {e}") },
    };
    for (name, text) in &files {
        let path = dir.path().join(name);
        if let Err(e) = path.parent().map_or(Ok(()), std::fs::create_dir_all).and_then(|_| std::fs::write(&path, text)) {
            return Outcome::Fail { detail: format!("writing {name}: {e}") };
        }
    }
    let names: Vec<String> = files.keys().cloned().collect();
    let compiled = compile(target, compiler, dir.path(), &names);
    match (compiled, case.expected) {
        (Ok(()), Expected::Accept) | (Err(_), Expected::Reject) => Outcome::Pass,
        (Ok(()), Expected::Reject) => Outcome::Fail { detail: "compiler accepted a rejected case".into() },
        (Err(stderr), Expected::Accept) => Outcome::Fail { detail: stderr },
    }
}

/// Runs every case through the compiler, or only re-checks golden verdicts
/// when `compiler` is `None`. Entries are in case order.
pub fn run_differential(cases: &[TestCase], target: Target, compiler: Option<&[String]>) -> Report {
    let entries = cases
        .par_iter()
        .map(|c| Entry { id: c.id.clone(), outcome: run_case(c, target, compiler) })
        .collect();
    Report { target, compiler: compiler.map(|c| c.to_vec()), entries }
}
