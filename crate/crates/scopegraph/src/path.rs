use std::fmt;

use crate::graph::ScopeId;
use crate::EdgeLabel;

/// A resolution path: a source scope followed by labeled steps.
///
/// Paths stop at the scope holding the declaration; the declaration label is
/// not part of the path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path<L> {
    source: ScopeId,
    steps: Vec<(L, ScopeId)>,
}

impl<L: EdgeLabel> Path<L> {
    pub fn empty(source: ScopeId) -> Self {
        Path {
            source,
            steps: Vec::new(),
        }
    }

    pub fn from_steps(source: ScopeId, steps: Vec<(L, ScopeId)>) -> Self {
        Path { source, steps }
    }

    pub fn src(&self) -> ScopeId {
        self.source
    }

    pub fn tgt(&self) -> ScopeId {
        self.steps.last().map_or(self.source, |&(_, s)| s)
    }

    pub fn steps(&self) -> &[(L, ScopeId)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every visited scope, source first.
    pub fn scopes(&self) -> Vec<ScopeId> {
        std::iter::once(self.source)
            .chain(self.steps.iter().map(|&(_, s)| s))
            .collect()
    }

    pub fn labels(&self) -> Vec<L> {
        self.steps.iter().map(|&(l, _)| l).collect()
    }

    pub fn contains(&self, scope: ScopeId) -> bool {
        self.source == scope || self.steps.iter().any(|&(_, s)| s == scope)
    }

    /// No scope occurs twice.
    pub fn is_cycle_free(&self) -> bool {
        let mut seen = self.scopes();
        seen.sort();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn push(&mut self, label: L, target: ScopeId) {
        self.steps.push((label, target));
    }

    pub fn extended(&self, label: L, target: ScopeId) -> Self {
        let mut p = self.clone();
        p.push(label, target);
        p
    }

    /// Splits at the first occurrence of `scope`, so that the first part ends
    /// and the second part starts there. `None` if `scope` is not visited.
    pub fn split_at(&self, scope: ScopeId) -> Option<(Path<L>, Path<L>)> {
        let index = self.scopes().iter().position(|&s| s == scope)?;
        let prefix = Path {
            source: self.source,
            steps: self.steps[..index].to_vec(),
        };
        let suffix = Path {
            source: scope,
            steps: self.steps[index..].to_vec(),
        };
        Some((prefix, suffix))
    }

    /// The path from step `index` onwards (the scope reached after `index`
    /// steps becomes the source).
    pub fn suffix_from(&self, index: usize) -> Path<L> {
        let source = if index == 0 {
            self.source
        } else {
            self.steps[index - 1].1
        };
        Path {
            source,
            steps: self.steps[index..].to_vec(),
        }
    }
}

impl<L: EdgeLabel> fmt::Display for Path<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.source)?;
        for (l, s) in &self.steps {
            write!(f, " -{l}-> {s}")?;
        }
        Ok(())
    }
}
