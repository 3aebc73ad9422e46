//! Manifest and SPT-style renderings of a generated matrix.

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::Serialize;

use crate::matrix::{Dimensions, Exclusion, Expected, Matrix, TestCase};
use crate::translate::{translate, Target, TranslationResult};

#[derive(Serialize)]
struct ManifestCase<'a> {
    id: &'a str,
    #[serde(flatten)]
    dimensions: Dimensions,
    modifier: String,
    expected: Expected,
    /// Emitted files, relative to the suite directory.
    files: Vec<String>,
}

#[derive(Serialize)]
struct Counts<'a> {
    cases: usize,
    accept: usize,
    reject: usize,
    excluded: &'a BTreeMap<Exclusion, usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    target: Target,
    preset: &'static str,
    counts: Counts<'a>,
    cases: Vec<ManifestCase<'a>>,
}

/// Files emitted for one case: the AML source plus its translation.
pub fn case_files(case: &TestCase) -> BTreeMap<String, String> {
    let mut out = BTreeMap::from([(format!("{}/case.aml", case.id), case.source())]);
    if case.target != Target::Aml {
        if let TranslationResult::Sources(files) = translate(&case.program, case.target) {
            for (name, text) in files {
                out.insert(format!("{}/{}/{name}", case.id, case.target), text);
            }
        }
    }
    out
}

pub fn manifest_json(target: Target, m: &Matrix) -> String {
    let accept = m.cases.iter().filter(|c| c.expected == Expected::Accept).count();
    let manifest = Manifest {
        target,
        preset: target.preset().name(),
        counts: Counts { cases: m.cases.len(), accept, reject: m.cases.len() - accept, excluded: &m.excluded },
        cases: m
            .cases
            .iter()
            .map(|c| ManifestCase {
                id: &c.id,
                dimensions: c.dimensions,
                modifier: c.modifier.to_string(),
                expected: c.expected,
                files: case_files(c).into_keys().collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n"
}

/// One `test` block per case: the program, the checker's expectation and
/// the compatibility expectation for the target.
pub fn spt(target: Target, m: &Matrix) -> String {
    let mut out = format!("module {target}-conformance\n");
    for c in &m.cases {
        let verdict = match c.expected {
            Expected::Accept => "succeeds",
            Expected::Reject => "fails",
        };
        out.push_str(&format!("\ntest {} [[\n{}]]\nanalysis {verdict}\n", c.id, c.source()));
        if target != Target::Aml {
            out.push_str(&format!("{target}-compat to succeed\n"));
        }
    }
    out
}

/// The golden files for `target`, by file name.
pub fn golden_files(target: Target, m: &Matrix) -> Vec<(String, String)> {
    vec![
        (format!("{target}.json"), manifest_json(target, m)),
        (format!("{target}.spt"), spt(target, m)),
    ]
}

/// Writes the manifest, the SPT file and every case's sources under `dir`.
pub fn write_suite(dir: &Path, target: Target, m: &Matrix) -> io::Result<usize> {
    let mut written = 0;
    let mut emit = |name: &str, text: &str| -> io::Result<()> {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, text)?;
        written += 1;
        Ok(())
    };
    for (name, text) in golden_files(target, m) {
        emit(&name, &text)?;
    }
    for c in &m.cases {
        for (name, text) in case_files(c) {
            emit(&name, &text)?;
        }
    }
    Ok(written)
}
