use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::ast::Pragma;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceRule {
    AnyEnclosing,
    Innermost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolutionMode {
    LabelOrder,
    FullPathOrder,
}

/// Selects the semantic variant of module and class accessibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct VariantConfig {
    /// `internal(M)` requires `M` to enclose the declaration.
    pub internal_args_must_be_ancestors: bool,
    pub internal_reference_rule: ReferenceRule,
    /// Every scope on the path except its target must also be inside `M`.
    pub internal_whole_path: bool,
    pub private_path_must_be_lexical: bool,
    pub private_shared_enclosing: bool,
    pub resolution_mode: ResolutionMode,
    pub inheritance_modifiers: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Base,
    Java,
    Csharp,
    RustModules,
    CppInheritance,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Base,
        Preset::Java,
        Preset::Csharp,
        Preset::RustModules,
        Preset::CppInheritance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Base => "base",
            Preset::Java => "java",
            Preset::Csharp => "csharp",
            Preset::RustModules => "rust-modules",
            Preset::CppInheritance => "cpp-inheritance",
        }
    }

    pub fn config(self) -> VariantConfig {
        use ReferenceRule::*;
        use ResolutionMode::*;
        let c = |ancestors, rule, whole, lexical, shared, mode, inh| VariantConfig {
            internal_args_must_be_ancestors: ancestors,
            internal_reference_rule: rule,
            internal_whole_path: whole,
            private_path_must_be_lexical: lexical,
            private_shared_enclosing: shared,
            resolution_mode: mode,
            inheritance_modifiers: inh,
        };
        match self {
            Preset::Base => c(false, AnyEnclosing, false, false, false, LabelOrder, false),
            Preset::Java => c(false, Innermost, true, true, true, FullPathOrder, false),
            Preset::Csharp => c(false, Innermost, false, false, false, LabelOrder, false),
            Preset::RustModules => c(true, AnyEnclosing, false, false, false, LabelOrder, false),
            Preset::CppInheritance => c(false, Innermost, false, false, false, LabelOrder, true),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" | "custom" => Ok(Preset::Base),
            _ => Preset::ALL
                .into_iter()
                .find(|p| p.name() == s)
                .ok_or_else(|| ConfigError::BadValue("preset".into(), s.into())),
        }
    }
}

impl Default for VariantConfig {
    fn default() -> Self {
        Preset::Base.config()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("invalid value `{1}` for `{0}`")]
    BadValue(String, String),
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::BadValue(key.into(), value.into())),
    }
}

impl VariantConfig {
    pub const KEYS: [&'static str; 8] = [
        "preset",
        "internal_args_must_be_ancestors",
        "internal_reference_rule",
        "internal_whole_path",
        "private_path_must_be_lexical",
        "private_shared_enclosing",
        "resolution_mode",
        "inheritance_modifiers",
    ];

    /// Sets one field (or, for `preset`, all of them) from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = || ConfigError::BadValue(key.into(), value.into());
        match key {
            "preset" => *self = value.parse::<Preset>()?.config(),
            "internal_args_must_be_ancestors" => {
                self.internal_args_must_be_ancestors = parse_bool(key, value)?
            }
            "internal_reference_rule" => {
                self.internal_reference_rule = match value {
                    "any_enclosing" => ReferenceRule::AnyEnclosing,
                    "innermost" => ReferenceRule::Innermost,
                    _ => return Err(bad()),
                }
            }
            "internal_whole_path" => self.internal_whole_path = parse_bool(key, value)?,
            "private_path_must_be_lexical" => {
                self.private_path_must_be_lexical = parse_bool(key, value)?
            }
            "private_shared_enclosing" => self.private_shared_enclosing = parse_bool(key, value)?,
            "resolution_mode" => {
                self.resolution_mode = match value {
                    "label_order" => ResolutionMode::LabelOrder,
                    "full_path_order" => ResolutionMode::FullPathOrder,
                    _ => return Err(bad()),
                }
            }
            "inheritance_modifiers" => self.inheritance_modifiers = parse_bool(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.into())),
        }
        Ok(())
    }

    /// Applies pragmas over `base`. A `preset` pragma is applied before the
    /// individual keys regardless of its position.
    pub fn with_pragmas(base: VariantConfig, pragmas: &[Pragma]) -> Result<Self, ConfigError> {
        let mut cfg = base;
        for p in pragmas.iter().filter(|p| p.key == "preset") {
            cfg.set(&p.key, &p.value)?;
        }
        for p in pragmas.iter().filter(|p| p.key != "preset") {
            cfg.set(&p.key, &p.value)?;
        }
        Ok(cfg)
    }

    /// The pragma lines that reproduce this configuration from the base preset.
    pub fn to_pragmas(&self) -> Vec<(String, String)> {
        let base = VariantConfig::default();
        let mut out = Vec::new();
        let mut push = |k: &str, differs: bool, v: String| {
            if differs {
                out.push((k.to_string(), v));
            }
        };
        push(
            "internal_args_must_be_ancestors",
            self.internal_args_must_be_ancestors != base.internal_args_must_be_ancestors,
            self.internal_args_must_be_ancestors.to_string(),
        );
        push(
            "internal_reference_rule",
            self.internal_reference_rule != base.internal_reference_rule,
            "innermost".into(),
        );
        push(
            "internal_whole_path",
            self.internal_whole_path != base.internal_whole_path,
            self.internal_whole_path.to_string(),
        );
        push(
            "private_path_must_be_lexical",
            self.private_path_must_be_lexical != base.private_path_must_be_lexical,
            self.private_path_must_be_lexical.to_string(),
        );
        push(
            "private_shared_enclosing",
            self.private_shared_enclosing != base.private_shared_enclosing,
            self.private_shared_enclosing.to_string(),
        );
        push(
            "resolution_mode",
            self.resolution_mode != base.resolution_mode,
            "full_path_order".into(),
        );
        push(
            "inheritance_modifiers",
            self.inheritance_modifiers != base.inheritance_modifiers,
            self.inheritance_modifiers.to_string(),
        );
        out
    }
}
