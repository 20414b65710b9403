//! Engine for guided, model-verified bug reporting on GUI apps.
//!
//! A reporter describes observed behavior, expected behavior and the steps
//! to reproduce in plain sentences. The engine parses each sentence, checks
//! it against an execution model recorded from real app usage, suggests
//! likely next steps and finally assembles a structured report.

pub mod dialogue;
pub mod exec_model;
pub mod matcher;
pub mod nlp;
pub mod predictor;
pub mod report;
pub mod scalar;

pub use scalar::Scalar;

/// Score type used by the dialogue engine and service.
pub type Score = f64;

/// Exact rational score, used for cross-checking float arithmetic.
pub type ExactScore = num_rational::Ratio<i64>;
