use thiserror::Error;

use crate::ir::Diagnostic;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("unsupported data type `{0}` (only f32 is supported)")]
    UnsupportedDtype(String),
    #[error("{name} must be in 1..=64, got {value}")]
    TileOutOfRange { name: &'static str, value: usize },
    #[error("vector length must be one of 128, 256, 512 bits, got {0}")]
    InvalidVlen(usize),
    #[error("blocking parameter {name} must be at least 1")]
    InvalidBlocking { name: &'static str },
    #[error("matrix dimension {name} must be at least 1")]
    InvalidShape { name: &'static str },
    #[error("`{0}` is not a shape of the form MxNxK")]
    ShapeSyntax(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern `{pattern}` matched {op} but {reason}")]
    Precondition {
        pattern: &'static str,
        op: String,
        reason: String,
    },
    #[error("pattern `{pattern}` produced an op in undeclared dialect `{dialect}`")]
    UndeclaredOutput {
        pattern: &'static str,
        dialect: String,
    },
    #[error("rewriting exceeded its budget of {budget} rewrites")]
    Budget { budget: usize },
}

/// A lowering stage failed; carries the diagnostics that stopped it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{stage} pass failed: {}", summarize(.diagnostics))]
pub struct PipelineError {
    pub stage: &'static str,
    pub diagnostics: Vec<Diagnostic>,
}

fn summarize(diags: &[Diagnostic]) -> String {
    match diags {
        [] => "no diagnostics".to_string(),
        [d] => d.to_string(),
        [d, rest @ ..] => format!("{d} (and {} more)", rest.len()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmitError {
    #[error("cannot emit {op}: {reason}")]
    Unsupported { op: String, reason: String },
    #[error("type {0} has no C spelling; was the module fully lowered?")]
    UnloweredType(String),
    #[error("`{0}` is not a valid C function name")]
    BadIdentifier(String),
    #[error("two kernels named {0}")]
    DuplicateKernel(String),
}

/// Anything that can stop kernel or test-bench generation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Emit(#[from] EmitError),
}
