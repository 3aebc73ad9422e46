//! Accessibility policies, their normal forms and the restrictiveness order.

use std::collections::BTreeSet;
use std::fmt;

use scopegraph::ScopeId;

use crate::decl::AmlGraph;

pub type ScopeSet = BTreeSet<ScopeId>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Policy {
    Pub,
    Mod(ScopeSet),
    Prt,
    Prv,
    /// Protected or internal.
    Smd(ScopeSet),
    /// Protected and internal.
    Smc(ScopeSet),
}

impl Policy {
    pub fn module_set(&self) -> Option<&ScopeSet> {
        match self {
            Policy::Mod(s) | Policy::Smd(s) | Policy::Smc(s) => Some(s),
            _ => None,
        }
    }

    /// Renders with module debug names, e.g. `MOD{M.N}`.
    pub fn display<'a>(&'a self, g: &'a AmlGraph) -> impl fmt::Display + 'a {
        PolicyDisplay { policy: self, names: Some(g) }
    }
}

struct PolicyDisplay<'a> {
    policy: &'a Policy,
    names: Option<&'a AmlGraph>,
}

impl fmt::Display for PolicyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &ScopeSet| {
            s.iter()
                .map(|m| match self.names {
                    Some(g) if g.contains(*m) => g.name(*m).to_string(),
                    _ => m.to_string(),
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        match self.policy {
            Policy::Pub => f.write_str("PUB"),
            Policy::Prt => f.write_str("PRT"),
            Policy::Prv => f.write_str("PRV"),
            Policy::Mod(s) => write!(f, "MOD{{{}}}", set(s)),
            Policy::Smd(s) => write!(f, "SMD{{{}}}", set(s)),
            Policy::Smc(s) => write!(f, "SMC{{{}}}", set(s)),
        }
    }
}

/// Renders with raw scope ids.
impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        PolicyDisplay { policy: self, names: None }.fmt(f)
    }
}

/// Collapses the empty-set forms: `SMD∅ = PRT`, `SMC∅ = MOD∅ = PRV`.
pub fn normalize(a: &Policy) -> Policy {
    match a {
        Policy::Smd(s) if s.is_empty() => Policy::Prt,
        Policy::Smc(s) | Policy::Mod(s) if s.is_empty() => Policy::Prv,
        other => other.clone(),
    }
}

/// Policies are equivalent iff their normal forms coincide.
pub fn equivalent(a: &Policy, b: &Policy) -> bool {
    normalize(a) == normalize(b)
}

/// Strictly more restrictive: the transitive closure of
///
/// ```text
/// PRV < SMC S      SMC S < SMC S' (S ⊊ S')   SMC S < PRT      SMC S < MOD S
/// MOD S < MOD S' (S ⊊ S')   MOD S < SMD S    PRT < SMD S
/// SMD S < SMD S' (S ⊊ S')   SMD S < PUB
/// ```
///
/// decided on normal forms.
pub fn policy_lt(a: &Policy, b: &Policy) -> bool {
    use Policy::*;
    let (a, b) = (normalize(a), normalize(b));
    if a == b {
        return false;
    }
    match (&a, &b) {
        (Prv, _) => true,
        (_, Prv) => false,
        (_, Pub) => true,
        (Pub, _) => false,
        (Smc(s), Smc(t)) => s.is_subset(t),
        (Smc(_), Prt) => true,
        (Smc(s), Mod(t)) => s.is_subset(t),
        (Smc(_), Smd(_)) => true,
        (Mod(s), Mod(t)) => s.is_subset(t),
        (Mod(s), Smd(t)) => s.is_subset(t),
        (Prt, Smd(_)) => true,
        (Smd(s), Smd(t)) => s.is_subset(t),
        _ => false,
    }
}
