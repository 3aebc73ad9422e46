use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The closed label alphabet used by the access-modifier language.
///
/// `Lex`, `Imp` and the three `Ext*` labels connect scopes; the remaining
/// labels are relation labels under which declarations are stored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Lex,
    Imp,
    Ext,
    ExtPrt,
    ExtPrv,
    Mod,
    Cls,
    Var,
    ThisM,
    ThisC,
}

impl Label {
    pub const ALL: [Label; 10] = [
        Label::Lex,
        Label::Imp,
        Label::Ext,
        Label::ExtPrt,
        Label::ExtPrv,
        Label::Mod,
        Label::Cls,
        Label::Var,
        Label::ThisM,
        Label::ThisC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Lex => "LEX",
            Label::Imp => "IMP",
            Label::Ext => "EXT",
            Label::ExtPrt => "EXT_PRT",
            Label::ExtPrv => "EXT_PRV",
            Label::Mod => "MOD",
            Label::Cls => "CLS",
            Label::Var => "VAR",
            Label::ThisM => "THIS_M",
            Label::ThisC => "THIS_C",
        }
    }

    /// Labels under which declarations (rather than scopes) hang.
    pub fn is_relation(self) -> bool {
        matches!(
            self,
            Label::Mod | Label::Cls | Label::Var | Label::ThisM | Label::ThisC
        )
    }

    /// Any of the three inheritance labels.
    pub fn is_extension(self) -> bool {
        matches!(self, Label::Ext | Label::ExtPrt | Label::ExtPrv)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown label `{0}`")]
pub struct UnknownLabel(pub String);

impl FromStr for Label {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}
