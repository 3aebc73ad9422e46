//! Modifier synthesis: for each `?` modifier, the access policies that keep
//! the program free of new errors, and the most restrictive among them.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use scopegraph::ScopeId;
use serde::Serialize;

use crate::ast::{AccKeyword, NodeId, Program, QNameKey, Span};
use crate::checker::{elaborate, resolve_module, translate_modifier, Code, Diagnostic, Elaboration};
use crate::config::VariantConfig;
use crate::policy::{normalize, policy_lt, Policy, ScopeSet};

/// Keyword bases plus singleton-module forms over every named module of the
/// program, normalized and deduplicated.
pub fn candidate_policies(e: &Elaboration) -> Vec<Policy> {
    let mut out = BTreeSet::from([Policy::Prv, Policy::Prt, Policy::Pub]);
    let empty = ScopeSet::new();
    for set in std::iter::once(empty).chain(e.modules.keys().map(|m| ScopeSet::from([*m]))) {
        out.insert(normalize(&Policy::Mod(set.clone())));
        out.insert(normalize(&Policy::Smc(set.clone())));
        out.insert(normalize(&Policy::Smd(set)));
    }
    out.into_iter().collect()
}

/// Writes `policy` as a keyword for a field declared in scope `s`. Module
/// arguments use the shortest qualified-name suffix that resolves back to
/// the intended module; `None` if some module has no such name.
pub fn render_keyword(e: &Elaboration, s: ScopeId, policy: &Policy) -> Option<AccKeyword> {
    let args = |set: &ScopeSet| -> Option<Vec<QNameKey>> {
        set.iter()
            .map(|m| {
                let full = e.modules.get(m)?;
                (0..full.len()).rev().map(|i| full[i..].to_vec()).find_map(|name| {
                    (resolve_module(&e.graph, s, &name) == vec![*m]).then_some(QNameKey(name))
                })
            })
            .collect()
    };
    Some(match policy {
        Policy::Pub => AccKeyword::Public,
        Policy::Prt => AccKeyword::Protected,
        Policy::Prv => AccKeyword::Private,
        Policy::Mod(set) => AccKeyword::Internal(args(set)?),
        Policy::Smd(set) => AccKeyword::ProtectedInternal(args(set)?),
        Policy::Smc(set) => AccKeyword::PrivateProtected(args(set)?),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Proposal {
    #[serde(skip)]
    pub policy: Policy,
    /// Policy text with module names, e.g. `MOD{M.N}`.
    #[serde(rename = "policy")]
    pub policy_text: String,
    /// The AML keyword, e.g. `internal(N)`.
    pub keyword: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoleResult {
    pub field: String,
    pub class: String,
    pub span: Span,
    pub valid: Vec<Proposal>,
    pub minimal: Vec<Proposal>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SynthesisResult {
    pub holes: BTreeMap<NodeId, HoleResult>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SynthesisError {
    #[error("field {0} has no modifier hole")]
    NotAHole(NodeId),
}

fn fill(prog: &Program, hole: NodeId, kw: AccKeyword) -> Program {
    let mut p = prog.clone();
    for id in prog.holes() {
        let f = p.field_mut(id).expect("hole ids come from this program");
        f.modifier.keyword = Some(if id == hole { kw.clone() } else { AccKeyword::Public });
    }
    p
}

fn error_keys(ds: &[Diagnostic]) -> BTreeSet<(usize, Code)> {
    ds.iter().map(|d| (d.span.start, d.code)).collect()
}

/// A choice for `hole` is acceptable when no diagnostic concerns the hole's
/// field and every remaining diagnostic already occurs with the field made
/// `public` (the least restrictive choice).
fn acceptable(e: &Elaboration, hole: NodeId, baseline: &BTreeSet<(usize, Code)>) -> bool {
    e.diagnostics
        .iter()
        .all(|d| d.field != Some(hole) && baseline.contains(&(d.span.start, d.code)))
}

/// Synthesizes every hole in `prog`. Other holes are read as `public` while
/// one is being decided.
pub fn synthesize(prog: &Program, cfg: &VariantConfig) -> SynthesisResult {
    let holes = prog.holes();
    synthesize_holes(prog, &holes, cfg).expect("holes come from the program")
}

pub fn synthesize_holes(
    prog: &Program,
    holes: &[NodeId],
    cfg: &VariantConfig,
) -> Result<SynthesisResult, SynthesisError> {
    let all = prog.holes();
    if let Some(h) = holes.iter().find(|h| !all.contains(h)) {
        return Err(SynthesisError::NotAHole(*h));
    }
    let base_prog = fill(prog, NodeId(u32::MAX), AccKeyword::Public);
    let base = elaborate(&base_prog, cfg);
    let baseline = error_keys(&base.diagnostics);
    let candidates = candidate_policies(&base);

    let jobs: Vec<(NodeId, Policy, AccKeyword)> = holes
        .iter()
        .flat_map(|h| {
            let class = base.fields[h].class;
            candidates
                .iter()
                .filter_map(|c| Some((*h, c.clone(), render_keyword(&base, class, c)?)))
                .collect::<Vec<_>>()
        })
        .collect();
    let verdicts: Vec<bool> = jobs
        .par_iter()
        .map(|(h, _, kw)| acceptable(&elaborate(&fill(prog, *h, kw.clone()), cfg), *h, &baseline))
        .collect();

    let mut result = SynthesisResult::default();
    for h in holes {
        let info = &base.fields[h];
        let valid: Vec<Proposal> = jobs
            .iter()
            .zip(&verdicts)
            .filter(|((id, _, _), ok)| id == h && **ok)
            .map(|((_, policy, kw), _)| Proposal {
                policy: policy.clone(),
                policy_text: policy.display(&base.graph).to_string(),
                keyword: kw.to_string(),
            })
            .collect();
        let minimal = valid
            .iter()
            .filter(|a| !valid.iter().any(|b| policy_lt(&b.policy, &a.policy)))
            .cloned()
            .collect();
        result.holes.insert(
            *h,
            HoleResult {
                field: info.name.clone(),
                class: base.graph.name(info.class).to_string(),
                span: info.modifier_span,
                valid,
                minimal,
            },
        );
    }
    Ok(result)
}

/// Pairs `(a, b)` with `a` valid, `a < b`, `b` a candidate that can be
/// written at the hole, and `b` not valid. Restricting access never repairs
/// a program, so this is expected to be empty. Candidates whose module
/// arguments are rejected outright (the ancestor requirement) are skipped:
/// that rule is about the declaration, not about access.
pub fn monotone_violations(prog: &Program, cfg: &VariantConfig, r: &SynthesisResult) -> Vec<(NodeId, Policy, Policy)> {
    let base = elaborate(&fill(prog, NodeId(u32::MAX), AccKeyword::Public), cfg);
    let candidates = candidate_policies(&base);
    let mut out = Vec::new();
    for (h, hole) in &r.holes {
        let class = base.fields[h].class;
        let valid: BTreeSet<&Policy> = hole.valid.iter().map(|p| &p.policy).collect();
        for a in &valid {
            for b in &candidates {
                let writable = render_keyword(&base, class, b)
                    .is_some_and(|kw| translate_modifier(&base.graph, class, &kw, cfg).1.is_empty());
                if policy_lt(a, b) && !valid.contains(b) && writable {
                    out.push((*h, (*a).clone(), b.clone()));
                }
            }
        }
    }
    out
}
