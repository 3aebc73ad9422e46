//! Scope graphs: a language-independent model of name binding.
//!
//! A [`ScopeGraph`] holds scopes, labeled scope-to-scope edges and labeled
//! declarations. References are resolved with [`resolve`], which searches
//! cycle-free paths whose label word matches a [`LabelRegex`], filters the
//! reached declarations with a predicate and keeps the candidates that no
//! other candidate precedes under a [`CandidateOrder`].
//!
//! The graph is generic in its label alphabet and declaration data. The
//! [`Label`] enum is the alphabet used by the access-modifier language.

use std::fmt::{Debug, Display};
use std::hash::Hash;

pub mod dot;
mod graph;
mod label;
pub mod oracle;
mod order;
mod path;
pub mod regex;
mod resolve;

pub use graph::{GraphError, ScopeGraph, ScopeId};
pub use label::{Label, UnknownLabel};
pub use order::{lexicographic_compare, Comparison, LabelOrder, OrderError};
pub use path::Path;
pub use regex::{parse_regex, LabelRegex, RegexParseError};
pub use resolve::{minimize, reachable, resolve, Candidate, CandidateOrder};

/// Bounds required of an edge label alphabet.
pub trait EdgeLabel: Copy + Eq + Ord + Hash + Debug + Display {}

impl<T: Copy + Eq + Ord + Hash + Debug + Display> EdgeLabel for T {}
