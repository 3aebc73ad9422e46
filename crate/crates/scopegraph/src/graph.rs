use std::fmt;

use thiserror::Error;

use crate::EdgeLabel;

/// Opaque scope identifier, unique within one graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScopeId(u32);

impl ScopeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The id of the `index`-th scope created in a graph.
    pub fn from_index(index: usize) -> Self {
        ScopeId(index as u32)
    }
}

impl fmt::Display for ScopeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("scope graph is frozen; no further assertions may be added")]
    Frozen,
    #[error("unknown scope {0}")]
    UnknownScope(ScopeId),
}

#[derive(Debug, Clone)]
struct ScopeEntry<L, D> {
    name: String,
    edges: Vec<(L, ScopeId)>,
    decls: Vec<(L, D)>,
}

/// Scopes, labeled edges between scopes, and labeled declarations.
///
/// Edges and declarations have set semantics: asserting the same fact twice
/// is a no-op. Per-scope edge and declaration lists keep insertion order, so
/// traversal order (and everything derived from it) is deterministic.
#[derive(Debug, Clone)]
pub struct ScopeGraph<L, D> {
    scopes: Vec<ScopeEntry<L, D>>,
    frozen: bool,
}

impl<L, D> Default for ScopeGraph<L, D> {
    fn default() -> Self {
        ScopeGraph {
            scopes: Vec::new(),
            frozen: false,
        }
    }
}

impl<L: EdgeLabel, D: PartialEq> ScopeGraph<L, D> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_scope(&mut self, debug_name: impl Into<String>) -> Result<ScopeId, GraphError> {
        if self.frozen {
            return Err(GraphError::Frozen);
        }
        let id = ScopeId(self.scopes.len() as u32);
        self.scopes.push(ScopeEntry {
            name: debug_name.into(),
            edges: Vec::new(),
            decls: Vec::new(),
        });
        Ok(id)
    }

    pub fn add_edge(&mut self, src: ScopeId, label: L, tgt: ScopeId) -> Result<(), GraphError> {
        self.check_mutable(&[src, tgt])?;
        let edges = &mut self.scopes[src.index()].edges;
        if !edges.contains(&(label, tgt)) {
            edges.push((label, tgt));
        }
        Ok(())
    }

    pub fn add_decl(&mut self, scope: ScopeId, label: L, data: D) -> Result<(), GraphError> {
        self.check_mutable(&[scope])?;
        let decls = &mut self.scopes[scope.index()].decls;
        if !decls.iter().any(|(l, d)| *l == label && *d == data) {
            decls.push((label, data));
        }
        Ok(())
    }

    fn check_mutable(&self, scopes: &[ScopeId]) -> Result<(), GraphError> {
        if self.frozen {
            return Err(GraphError::Frozen);
        }
        match scopes.iter().find(|s| !self.contains(**s)) {
            Some(s) => Err(GraphError::UnknownScope(*s)),
            None => Ok(()),
        }
    }

    pub fn has_decl(&self, scope: ScopeId, label: L, data: &D) -> bool {
        self.contains(scope) && self.decls(scope).any(|(l, d)| l == label && d == data)
    }
}

impl<L: EdgeLabel, D> ScopeGraph<L, D> {
    /// Ends the build phase. Later assertions fail with [`GraphError::Frozen`].
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    pub fn contains(&self, scope: ScopeId) -> bool {
        scope.index() < self.scopes.len()
    }

    pub fn scope_count(&self) -> usize {
        self.scopes.len()
    }

    pub fn scopes(&self) -> impl Iterator<Item = ScopeId> + '_ {
        (0..self.scopes.len() as u32).map(ScopeId)
    }

    pub fn name(&self, scope: ScopeId) -> &str {
        &self.scopes[scope.index()].name
    }

    /// Outgoing edges of `scope` in insertion order.
    pub fn edges(&self, scope: ScopeId) -> impl Iterator<Item = (L, ScopeId)> + '_ {
        self.scopes[scope.index()].edges.iter().copied()
    }

    pub fn decls(&self, scope: ScopeId) -> impl Iterator<Item = (L, &D)> + '_ {
        self.scopes[scope.index()].decls.iter().map(|(l, d)| (*l, d))
    }

    pub fn all_edges(&self) -> impl Iterator<Item = (ScopeId, L, ScopeId)> + '_ {
        self.scopes()
            .flat_map(move |s| self.edges(s).map(move |(l, t)| (s, l, t)))
    }

    pub fn all_decls(&self) -> impl Iterator<Item = (ScopeId, L, &D)> + '_ {
        self.scopes()
            .flat_map(move |s| self.decls(s).map(move |(l, d)| (s, l, d)))
    }

    pub fn edge_count(&self) -> usize {
        self.scopes.iter().map(|s| s.edges.len()).sum()
    }

    pub fn decl_count(&self) -> usize {
        self.scopes.iter().map(|s| s.decls.len()).sum()
    }

    /// Rebuilds the graph with transformed declaration data, keeping scope
    /// ids, edges and ordering. The result has the same frozen state.
    pub fn map_decls<E>(&self, mut f: impl FnMut(ScopeId, L, &D) -> E) -> ScopeGraph<L, E> {
        let scopes = self
            .scopes
            .iter()
            .enumerate()
            .map(|(i, entry)| ScopeEntry {
                name: entry.name.clone(),
                edges: entry.edges.clone(),
                decls: entry
                    .decls
                    .iter()
                    .map(|(l, d)| (*l, f(ScopeId(i as u32), *l, d)))
                    .collect(),
            })
            .collect();
        ScopeGraph {
            scopes,
            frozen: self.frozen,
        }
    }
}
