//! Exhaustive reference implementations used to cross-check the resolver.
//!
//! Nothing here is fast. Word membership is decided by trying every split of
//! the word against the expression tree, and resolution enumerates every
//! cycle-free path before filtering.

use crate::graph::{ScopeGraph, ScopeId};
use crate::order::{Comparison, LabelOrder};
use crate::path::Path;
use crate::regex::LabelRegex;
use crate::resolve::Candidate;
use crate::EdgeLabel;

/// Language membership by structural recursion over all word splits.
pub fn naive_matches<L: EdgeLabel>(r: &LabelRegex<L>, w: &[L]) -> bool {
    match r {
        LabelRegex::Empty => false,
        LabelRegex::Epsilon => w.is_empty(),
        LabelRegex::Label(l) => w.len() == 1 && w[0] == *l,
        LabelRegex::Concat(parts) => concat_matches(parts, w),
        LabelRegex::Alt(choices) => choices.iter().any(|c| naive_matches(c, w)),
        LabelRegex::Optional(inner) => w.is_empty() || naive_matches(inner, w),
        LabelRegex::Star(inner) => {
            w.is_empty()
                || (1..=w.len()).any(|i| naive_matches(inner, &w[..i]) && naive_matches(r, &w[i..]))
        }
    }
}

fn concat_matches<L: EdgeLabel>(parts: &[LabelRegex<L>], w: &[L]) -> bool {
    match parts.split_first() {
        None => w.is_empty(),
        Some((head, rest)) => {
            (0..=w.len()).any(|i| naive_matches(head, &w[..i]) && concat_matches(rest, &w[i..]))
        }
    }
}

/// Every cycle-free path starting at `start`, shortest first.
pub fn all_simple_paths<L: EdgeLabel, D>(graph: &ScopeGraph<L, D>, start: ScopeId) -> Vec<Path<L>> {
    let mut done = Vec::new();
    let mut frontier = vec![Path::empty(start)];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for p in &frontier {
            for (l, t) in graph.edges(p.tgt()) {
                if !p.contains(t) {
                    next.push(p.extended(l, t));
                }
            }
        }
        done.append(&mut frontier);
        frontier = next;
    }
    done
}

/// Word order: `a` precedes `b` when they share a prefix followed by labels
/// `x`, `y` with `x < y`.
fn word_precedes<L: EdgeLabel>(order: &LabelOrder<L>, a: &[L], b: &[L]) -> bool {
    let mut i = 0;
    while i < a.len() && i < b.len() {
        if a[i] != b[i] {
            return order.lt(a[i], b[i]);
        }
        i += 1;
    }
    false
}

/// Order parameter for [`brute_force_resolve`].
pub enum OracleOrder<'a, L, D> {
    None,
    Labels(&'a LabelOrder<L>),
    Custom(&'a dyn Fn(&Candidate<L, D>, &Candidate<L, D>) -> Comparison),
}

/// Same contract as [`crate::resolve`], by enumeration.
pub fn brute_force_resolve<L: EdgeLabel, D: Clone>(
    graph: &ScopeGraph<L, D>,
    start: ScopeId,
    regex: &LabelRegex<L>,
    pred: &dyn Fn(&D) -> bool,
    order: OracleOrder<'_, L, D>,
) -> Vec<Candidate<L, D>> {
    let mut reached = Vec::new();
    for path in all_simple_paths(graph, start) {
        for (label, data) in graph.decls(path.tgt()) {
            let mut word = path.labels();
            word.push(label);
            if pred(data) && naive_matches(regex, &word) {
                reached.push(Candidate {
                    path: path.clone(),
                    label,
                    data: data.clone(),
                });
            }
        }
    }
    let beats = |a: &Candidate<L, D>, b: &Candidate<L, D>| match &order {
        OracleOrder::None => false,
        OracleOrder::Labels(o) => word_precedes(o, &a.word(), &b.word()),
        OracleOrder::Custom(f) => f(a, b) == Comparison::Precedes,
    };
    let mut result = Vec::new();
    for b in &reached {
        let mut shadowed = false;
        for a in &reached {
            if beats(a, b) {
                shadowed = true;
            }
        }
        if !shadowed {
            result.push(b.clone());
        }
    }
    result
}
