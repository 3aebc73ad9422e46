//! AML: a small module-and-class language for exploring access modifiers,
//! checked against scope graphs.

pub mod access;
pub mod ast;
pub mod checker;
pub mod config;
pub mod decl;
pub mod metatheory;
pub mod parser;
pub mod policy;
pub mod pretty;
pub mod random;
pub mod synthesis;

pub use checker::{elaborate, Binding, Code, Diagnostic, Elaboration};
pub use config::{Preset, VariantConfig};
pub use decl::{AmlGraph, AmlPath, Decl, Type, VarDecl};
pub use parser::{parse_program, parse_program_with_holes, ParseError};
pub use policy::{normalize, policy_lt, Policy};
pub use pretty::pretty_print;
pub use synthesis::{synthesize, SynthesisResult};
