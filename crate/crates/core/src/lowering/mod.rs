//! Lowering of builder output to a pure `{func, emitc}` module.
//!
//! Four passes run in a fixed order: memref → arith → scf → rvv. Each one
//! eliminates its source dialect (or, for memref, its type) and leaves the
//! module verify-clean.

mod arith;
mod memref;
mod rvv;
mod scf;

use std::fmt;
use std::str::FromStr;

pub use arith::{ArithAddiLowering, ArithConstantLowering, ArithMuliLowering};
pub use memref::pass_memref_to_emitc;
pub use rvv::{VfmaccLowering, Vle32Lowering, Vse32Lowering};
pub use scf::ScfForLowering;

use crate::dialects::{function_type_string, VECTOR_C_TYPE};
use crate::error::{PatternError, PipelineError};
use crate::ir::{
    apply_patterns_with, verify, ApplyOptions, Attribute, Diagnostic, ModuleIR, Operation,
    PassResult, RewritePattern, TypeKind,
};

/// Named points along the pipeline, as exposed by the `ir` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Built,
    Memref,
    Arith,
    Scf,
    Rvv,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Built, Stage::Memref, Stage::Arith, Stage::Scf, Stage::Rvv];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Built => "built",
            Stage::Memref => "memref",
            Stage::Arith => "arith",
            Stage::Scf => "scf",
            Stage::Rvv => "rvv",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}` (expected built, memref, arith, scf or rvv)"))
    }
}

pub fn arith_patterns() -> Vec<&'static dyn RewritePattern> {
    vec![&ArithConstantLowering, &ArithAddiLowering, &ArithMuliLowering]
}

pub fn scf_patterns() -> Vec<&'static dyn RewritePattern> {
    vec![&ScfForLowering]
}

pub fn rvv_patterns() -> Vec<&'static dyn RewritePattern> {
    vec![&Vle32Lowering, &Vse32Lowering, &VfmaccLowering]
}

/// Every shipped rewrite pattern (the memref pass is a type conversion, not a pattern).
pub fn all_patterns() -> Vec<&'static dyn RewritePattern> {
    let mut all = arith_patterns();
    all.extend(scf_patterns());
    all.extend(rvv_patterns());
    all
}

pub fn pass_arith_to_emitc(module: ModuleIR) -> Result<PassResult, PatternError> {
    pass_arith_to_emitc_with(module, ApplyOptions::default())
}

pub fn pass_arith_to_emitc_with(
    module: ModuleIR,
    options: ApplyOptions,
) -> Result<PassResult, PatternError> {
    apply_patterns_with(module, &arith_patterns(), options)
}

pub fn pass_scf_to_emitc(module: ModuleIR) -> Result<PassResult, PatternError> {
    pass_scf_to_emitc_with(module, ApplyOptions::default())
}

pub fn pass_scf_to_emitc_with(
    module: ModuleIR,
    options: ApplyOptions,
) -> Result<PassResult, PatternError> {
    apply_patterns_with(module, &scf_patterns(), options)
}

pub fn pass_rvv_to_emitc(module: ModuleIR) -> Result<PassResult, PatternError> {
    pass_rvv_to_emitc_with(module, ApplyOptions::default())
}

/// Rewrites the rvv ops into intrinsic calls, then retypes every remaining
/// `!rvv.vfloat32m1` value (variables, loads) to the opaque C vector type.
pub fn pass_rvv_to_emitc_with(
    module: ModuleIR,
    options: ApplyOptions,
) -> Result<PassResult, PatternError> {
    let mut result = apply_patterns_with(module, &rvv_patterns(), options)?;
    retype(&mut result.module, &TypeKind::RvvVecF32M1, &TypeKind::opaque(VECTOR_C_TYPE));
    result.diagnostics = verify(&result.module);
    Ok(result)
}

/// Changes the type of every live value typed `from` to `to`, and keeps the
/// `function_type` attributes in sync. Returns the number of values changed.
pub(crate) fn retype(module: &mut ModuleIR, from: &TypeKind, to: &TypeKind) -> usize {
    let mut changed = 0;
    for v in module.live_values() {
        if module.values.ty(v) == from {
            module.values.set_type(v, to.clone());
            changed += 1;
        }
    }
    if changed > 0 {
        sync_function_types(module);
    }
    changed
}

pub(crate) fn sync_function_types(module: &mut ModuleIR) {
    let ModuleIR { functions, values } = module;
    for f in functions.iter_mut().filter(|f| f.is("func", "func")) {
        let args: Vec<TypeKind> = f.regions[0]
            .block()
            .arguments
            .iter()
            .map(|v| values.ty(*v).clone())
            .collect();
        f.attributes.insert(
            "function_type".to_string(),
            Attribute::Str(function_type_string(&args)),
        );
    }
}

/// A pass entry point, uniform over pattern-driven and conversion passes.
pub type PassFn = fn(ModuleIR, ApplyOptions) -> Result<PassResult, PatternError>;

fn memref_entry(module: ModuleIR, _: ApplyOptions) -> Result<PassResult, PatternError> {
    Ok(pass_memref_to_emitc(module))
}

/// The passes in pipeline order, keyed by the stage they produce.
pub fn passes() -> [(Stage, PassFn); 4] {
    [
        (Stage::Memref, memref_entry),
        (Stage::Arith, pass_arith_to_emitc_with),
        (Stage::Scf, pass_scf_to_emitc_with),
        (Stage::Rvv, pass_rvv_to_emitc_with),
    ]
}

/// Runs every pass up to and including `stage`.
pub fn lower_to(module: ModuleIR, stage: Stage) -> Result<PassResult, PipelineError> {
    lower_to_with(module, stage, ApplyOptions::default())
}

pub fn lower_to_with(
    module: ModuleIR,
    stage: Stage,
    options: ApplyOptions,
) -> Result<PassResult, PipelineError> {
    let mut current = PassResult {
        diagnostics: verify(&module),
        module,
        rewrites_applied: 0,
    };
    if !current.diagnostics.is_empty() {
        return Err(PipelineError {
            stage: Stage::Built.name(),
            diagnostics: current.diagnostics,
        });
    }
    for (st, pass) in passes() {
        if st > stage {
            break;
        }
        let total = current.rewrites_applied;
        let next = pass(current.module, options).map_err(|e| PipelineError {
            stage: st.name(),
            diagnostics: vec![Diagnostic {
                path: "pattern".to_string(),
                message: e.to_string(),
            }],
        })?;
        if !next.diagnostics.is_empty() {
            return Err(PipelineError {
                stage: st.name(),
                diagnostics: next.diagnostics,
            });
        }
        current = PassResult {
            rewrites_applied: total + next.rewrites_applied,
            ..next
        };
    }
    Ok(current)
}

/// memref → arith → scf → rvv. The result contains only `func` and `emitc` ops.
pub fn run_pipeline(module: ModuleIR) -> Result<PassResult, PipelineError> {
    lower_to(module, Stage::Rvv)
}

pub(crate) fn precondition(
    pattern: &'static str,
    op: &Operation,
    reason: impl Into<String>,
) -> PatternError {
    PatternError::Precondition {
        pattern,
        op: op.full_name(),
        reason: reason.into(),
    }
}
