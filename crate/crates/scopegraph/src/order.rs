use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::EdgeLabel;

/// Outcome of comparing two candidates under a (pre)order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Comparison {
    Precedes,
    Succeeds,
    Incomparable,
    Equivalent,
}

impl Comparison {
    pub fn flip(self) -> Comparison {
        match self {
            Comparison::Precedes => Comparison::Succeeds,
            Comparison::Succeeds => Comparison::Precedes,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("label order is not irreflexive: {0} < {0} follows from the given pairs")]
    Cycle(String),
    #[error("malformed label order: {0}")]
    Syntax(String),
}

/// A strict partial order on labels, stored transitively closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelOrder<L> {
    pairs: BTreeSet<(L, L)>,
}

impl<L: EdgeLabel> LabelOrder<L> {
    pub fn empty() -> Self {
        LabelOrder {
            pairs: BTreeSet::new(),
        }
    }

    /// Closes `pairs` transitively. Fails if the closure relates a label to
    /// itself.
    pub fn new(pairs: impl IntoIterator<Item = (L, L)>) -> Result<Self, OrderError> {
        let mut closed: BTreeSet<(L, L)> = pairs.into_iter().collect();
        loop {
            let mut added = Vec::new();
            for &(a, b) in &closed {
                for &(c, d) in &closed {
                    if c == b && !closed.contains(&(a, d)) {
                        added.push((a, d));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            closed.extend(added);
        }
        if let Some(&(a, _)) = closed.iter().find(|(a, b)| a == b) {
            return Err(OrderError::Cycle(a.to_string()));
        }
        Ok(LabelOrder { pairs: closed })
    }

    /// `a < b < c` for consecutive labels.
    pub fn chain(labels: &[L]) -> Result<Self, OrderError> {
        Self::new(labels.windows(2).map(|w| (w[0], w[1])))
    }

    pub fn lt(&self, a: L, b: L) -> bool {
        self.pairs.contains(&(a, b))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (L, L)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn compare_labels(&self, a: L, b: L) -> Comparison {
        if a == b {
            Comparison::Equivalent
        } else if self.lt(a, b) {
            Comparison::Precedes
        } else if self.lt(b, a) {
            Comparison::Succeeds
        } else {
            Comparison::Incomparable
        }
    }
}

impl<L: EdgeLabel> fmt::Display for LabelOrder<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{a} < {b}")).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Parses comma-separated chains such as `VAR < IMP < LEX, VAR < EXT`.
impl<L: EdgeLabel + FromStr> FromStr for LabelOrder<L> {
    type Err = OrderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        for chain in s.split(',') {
            if chain.trim().is_empty() {
                continue;
            }
            let labels = chain
                .split('<')
                .map(|tok| {
                    let tok = tok.trim();
                    tok.parse::<L>()
                        .map_err(|_| OrderError::Syntax(format!("unknown label `{tok}`")))
                })
                .collect::<Result<Vec<L>, _>>()?;
            if labels.len() < 2 {
                return Err(OrderError::Syntax(format!("`{}` is not a chain", chain.trim())));
            }
            pairs.extend(labels.windows(2).map(|w| (w[0], w[1])));
        }
        LabelOrder::new(pairs)
    }
}

/// Lifts a label order to words, comparing at the first differing position.
///
/// Callers append the declaration label so words end in a relation label. A
/// word that is a proper prefix of the other has no differing position and
/// the two are incomparable.
pub fn lexicographic_compare<L: EdgeLabel>(order: &LabelOrder<L>, a: &[L], b: &[L]) -> Comparison {
    match a.iter().zip(b).find(|(x, y)| x != y) {
        Some((&x, &y)) => order.compare_labels(x, y),
        None if a.len() == b.len() => Comparison::Equivalent,
        None => Comparison::Incomparable,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Label::{self, *};

    #[test]
    fn closure_and_cycles() {
        let o = LabelOrder::chain(&[Var, Ext, Lex]).unwrap();
        assert!(o.lt(Var, Lex));
        assert!(!o.lt(Lex, Var));
        assert!(LabelOrder::new([(Var, Lex), (Lex, Var)]).is_err());
        assert!(LabelOrder::new([(Var, Var)]).is_err());
    }

    #[test]
    fn parses_chains() {
        let o: LabelOrder<Label> = "VAR < IMP < LEX".parse().unwrap();
        assert_eq!(o, LabelOrder::chain(&[Var, Imp, Lex]).unwrap());
        let o: LabelOrder<Label> = "VAR < IMP, VAR < LEX".parse().unwrap();
        assert!(!o.lt(Imp, Lex) && !o.lt(Lex, Imp));
        assert!("VAR".parse::<LabelOrder<Label>>().is_err());
        assert!("VAR < FOO".parse::<LabelOrder<Label>>().is_err());
    }

    #[test]
    fn lexicographic_examples() {
        let o = LabelOrder::chain(&[Var, Ext, Lex]).unwrap();
        assert_eq!(lexicographic_compare(&o, &[Ext, Var], &[Lex, Var]), Comparison::Precedes);
        assert_eq!(lexicographic_compare(&o, &[Var], &[Var]), Comparison::Equivalent);
        assert_eq!(lexicographic_compare(&o, &[Var], &[Ext, Var]), Comparison::Precedes);
        let partial = LabelOrder::new([(Var, Imp), (Var, Lex)]).unwrap();
        assert_eq!(
            lexicographic_compare(&partial, &[Imp, Var], &[Lex, Var]),
            Comparison::Incomparable
        );
    }
}
