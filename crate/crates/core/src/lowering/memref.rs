//! memref → emitc: a type conversion rather than an op rewrite.

use crate::ir::{verify, DefSite, Diagnostic, ModuleIR, PassResult, TypeKind};

/// Retypes every `memref<-1xf32>` function parameter to `!emitc.ptr<f32>`.
///
/// Each retyped parameter counts as one rewrite. A memref value that is not a
/// function parameter (an op result or an inner block argument) cannot be
/// converted and is reported as a diagnostic.
pub fn pass_memref_to_emitc(mut module: ModuleIR) -> PassResult {
    let mut rewrites = 0;
    let mut diagnostics = Vec::new();
    let mut params = std::collections::BTreeSet::new();
    for f in module.functions.iter().filter(|f| f.is("func", "func")) {
        for region in &f.regions {
            for block in &region.blocks {
                params.extend(block.arguments.iter().copied());
            }
        }
    }
    for v in module.live_values() {
        if *module.values.ty(v) != TypeKind::MemRefF32Dyn {
            continue;
        }
        if params.contains(&v) {
            module.values.set_type(v, TypeKind::f32_ptr());
            rewrites += 1;
        } else {
            let site = match module.values.get(v).map(|i| i.def) {
                Some(DefSite::OpResult(_)) => "an operation result",
                _ => "a non-entry block argument",
            };
            diagnostics.push(Diagnostic {
                path: format!("value #{}", v.id()),
                message: format!("memref produced by {site} cannot be lowered"),
            });
        }
    }
    if rewrites > 0 {
        super::sync_function_types(&mut module);
    }
    if diagnostics.is_empty() {
        diagnostics = verify(&module);
    }
    PassResult {
        module,
        rewrites_applied: rewrites,
        diagnostics,
    }
}
