use std::collections::HashSet;

use crate::graph::{ScopeGraph, ScopeId};
use crate::order::{lexicographic_compare, Comparison, LabelOrder};
use crate::path::Path;
use crate::regex::{LabelRegex, ResidualCache};
use crate::EdgeLabel;

/// A reachable declaration: the path to its scope, its relation label and
/// its data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Candidate<L, D> {
    pub path: Path<L>,
    pub label: L,
    pub data: D,
}

impl<L: EdgeLabel, D> Candidate<L, D> {
    /// Path labels followed by the declaration label.
    pub fn word(&self) -> Vec<L> {
        let mut w = self.path.labels();
        w.push(self.label);
        w
    }
}

/// Shadowing order used to minimize the reachable candidates.
pub enum CandidateOrder<'a, L, D> {
    /// Keep every reachable candidate.
    None,
    /// Lexicographic lifting of a label order over candidate words.
    Labels(LabelOrder<L>),
    /// Arbitrary preorder over candidates.
    Custom(&'a dyn Fn(&Candidate<L, D>, &Candidate<L, D>) -> Comparison),
}

impl<L: EdgeLabel, D> CandidateOrder<'_, L, D> {
    pub fn compare(&self, a: &Candidate<L, D>, b: &Candidate<L, D>) -> Comparison {
        match self {
            CandidateOrder::None => Comparison::Incomparable,
            CandidateOrder::Labels(order) => lexicographic_compare(order, &a.word(), &b.word()),
            CandidateOrder::Custom(f) => f(a, b),
        }
    }
}

/// Keeps the candidates that no other candidate strictly precedes. Order of
/// the input is preserved.
pub fn minimize<L: EdgeLabel, D>(
    candidates: Vec<Candidate<L, D>>,
    order: &CandidateOrder<'_, L, D>,
) -> Vec<Candidate<L, D>> {
    if matches!(order, CandidateOrder::None) {
        return candidates;
    }
    let keep: Vec<bool> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            !candidates
                .iter()
                .enumerate()
                .any(|(j, other)| i != j && order.compare(other, c) == Comparison::Precedes)
        })
        .collect();
    candidates
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// All reachable candidates, before minimization, in depth-first discovery
/// order (edges and declarations in insertion order).
pub fn reachable<L: EdgeLabel, D: Clone>(
    graph: &ScopeGraph<L, D>,
    start: ScopeId,
    regex: &LabelRegex<L>,
    pred: &dyn Fn(&D) -> bool,
) -> Vec<Candidate<L, D>> {
    let mut walk = Walk {
        graph,
        pred,
        cache: ResidualCache::new(regex),
        on_path: HashSet::new(),
        out: Vec::new(),
    };
    let state = walk.cache.start();
    if walk.cache.is_live(state) {
        walk.visit(Path::empty(start), state);
    }
    walk.out
}

/// Resolves a query: reachable candidates whose data satisfies `pred`,
/// minimized under `order`.
pub fn resolve<L: EdgeLabel, D: Clone>(
    graph: &ScopeGraph<L, D>,
    start: ScopeId,
    regex: &LabelRegex<L>,
    pred: &dyn Fn(&D) -> bool,
    order: &CandidateOrder<'_, L, D>,
) -> Vec<Candidate<L, D>> {
    minimize(reachable(graph, start, regex, pred), order)
}

struct Walk<'g, L, D> {
    graph: &'g ScopeGraph<L, D>,
    pred: &'g dyn Fn(&D) -> bool,
    cache: ResidualCache<L>,
    on_path: HashSet<ScopeId>,
    out: Vec<Candidate<L, D>>,
}

impl<L: EdgeLabel, D: Clone> Walk<'_, L, D> {
    fn visit(&mut self, path: Path<L>, state: usize) {
        let scope = path.tgt();
        self.on_path.insert(scope);
        for (label, data) in self.graph.decls(scope) {
            let next = self.cache.step(state, label);
            if self.cache.nullable(next) && (self.pred)(data) {
                self.out.push(Candidate {
                    path: path.clone(),
                    label,
                    data: data.clone(),
                });
            }
        }
        let edges: Vec<_> = self.graph.edges(scope).collect();
        for (label, target) in edges {
            if self.on_path.contains(&target) {
                continue;
            }
            let next = self.cache.step(state, label);
            if self.cache.is_live(next) {
                self.visit(path.extended(label, target), next);
            }
        }
        self.on_path.remove(&scope);
    }
}
