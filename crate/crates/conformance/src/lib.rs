//! Conformance testing for AML: a systematic matrix of access scenarios,
//! translations to Java, C# and Rust, golden expectations and an optional
//! differential lane against the reference compilers.

pub mod differential;
pub mod golden;
pub mod matrix;
pub mod translate;

pub use differential::{compiler_command, run_differential, Outcome, Report};
pub use matrix::{generate_matrix, Dimensions, Expected, Matrix, TestCase};
pub use translate::{translate, Target, TranslationResult};
