//! rvv → emitc intrinsic calls.

use super::precondition;
use crate::dialects::ops::emitc;
use crate::dialects::{
    TypeConstraint, INTRINSIC_VFMACC, INTRINSIC_VLE32, INTRINSIC_VSE32, RVV_VFMACC, RVV_VLE32,
    RVV_VSE32, VECTOR_C_TYPE,
};
use crate::error::PatternError;
use crate::ir::{Operation, Rewrite, RewritePattern, TypeKind, Value, ValueTable};

const EMITC: &[&str] = &["emitc"];

fn check_operands(
    pattern: &'static str,
    op: &Operation,
    values: &ValueTable,
    expected: &[(&str, TypeConstraint)],
) -> Result<(), PatternError> {
    if op.operands.len() != expected.len() {
        return Err(precondition(
            pattern,
            op,
            format!("it has {} operands, expected {}", op.operands.len(), expected.len()),
        ));
    }
    for (v, (what, c)) in op.operands.iter().zip(expected) {
        let ty = values.ty(*v);
        if !c.accepts(ty) {
            return Err(precondition(pattern, op, format!("its {what} has type {ty}")));
        }
    }
    Ok(())
}

fn pointer_base(pattern: &'static str, op: &Operation, values: &ValueTable, base: Value) -> Result<(), PatternError> {
    match values.ty(base) {
        TypeKind::EmitCPtr(_) => Ok(()),
        other => Err(precondition(
            pattern,
            op,
            format!("pointer displacement needs a !emitc.ptr<f32> base, found {other}; run the memref pass first"),
        )),
    }
}

fn vector_c() -> TypeKind {
    TypeKind::opaque(VECTOR_C_TYPE)
}

/// `rvv.vle32(mem, off, avl)` → `__riscv_vle32_v_f32m1(mem + off, avl)`.
pub struct Vle32Lowering;

impl RewritePattern for Vle32Lowering {
    fn name(&self) -> &'static str {
        "rvv-vle32-to-emitc"
    }

    fn matches(&self, op: &Operation) -> bool {
        op.is("rvv", RVV_VLE32)
    }

    fn output_dialects(&self) -> &'static [&'static str] {
        EMITC
    }

    fn rewrite(&self, op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError> {
        use TypeConstraint::*;
        check_operands(self.name(), &op, values, &[("base", Buffer), ("offset", Exact(TypeKind::Index)), ("vl", Exact(TypeKind::Index))])?;
        let &[base, off, avl] = op.operands.as_slice() else { unreachable!() };
        pointer_base(self.name(), &op, values, base)?;
        let ptr = emitc::add(values, base, off);
        let call = emitc::call_opaque(values, INTRINSIC_VLE32, &[ptr.result(), avl], Some(vector_c()));
        Ok(Rewrite {
            replacements: op.results.first().map(|r| (*r, call.result())).into_iter().collect(),
            ops: vec![ptr, call],
        })
    }
}

/// `rvv.vse32(vec, mem, off, avl)` → `__riscv_vse32_v_f32m1(mem + off, vec, avl)`.
pub struct Vse32Lowering;

impl RewritePattern for Vse32Lowering {
    fn name(&self) -> &'static str {
        "rvv-vse32-to-emitc"
    }

    fn matches(&self, op: &Operation) -> bool {
        op.is("rvv", RVV_VSE32)
    }

    fn output_dialects(&self) -> &'static [&'static str] {
        EMITC
    }

    fn rewrite(&self, op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError> {
        use TypeConstraint::*;
        check_operands(
            self.name(),
            &op,
            values,
            &[("vector", Vector), ("base", Buffer), ("offset", Exact(TypeKind::Index)), ("vl", Exact(TypeKind::Index))],
        )?;
        let &[vec, base, off, avl] = op.operands.as_slice() else { unreachable!() };
        pointer_base(self.name(), &op, values, base)?;
        let ptr = emitc::add(values, base, off);
        let call = emitc::call_opaque(values, INTRINSIC_VSE32, &[ptr.result(), vec, avl], None);
        Ok(Rewrite {
            ops: vec![ptr, call],
            replacements: Vec::new(),
        })
    }
}

/// `rvv.vfmacc(vd, mem, off, vs, avl)` →
/// `__riscv_vfmacc_vf_f32m1(vd, mem[off], vs, avl)`.
pub struct VfmaccLowering;

impl RewritePattern for VfmaccLowering {
    fn name(&self) -> &'static str {
        "rvv-vfmacc-to-emitc"
    }

    fn matches(&self, op: &Operation) -> bool {
        op.is("rvv", RVV_VFMACC)
    }

    fn output_dialects(&self) -> &'static [&'static str] {
        EMITC
    }

    fn rewrite(&self, op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError> {
        use TypeConstraint::*;
        check_operands(
            self.name(),
            &op,
            values,
            &[
                ("accumulator", Vector),
                ("base", Buffer),
                ("offset", Exact(TypeKind::Index)),
                ("vector source", Vector),
                ("vl", Exact(TypeKind::Index)),
            ],
        )?;
        let &[vd, base, off, vs, avl] = op.operands.as_slice() else { unreachable!() };
        let scalar = emitc::subscript(values, base, off);
        let call = emitc::call_opaque(values, INTRINSIC_VFMACC, &[vd, scalar.result(), vs, avl], Some(vector_c()));
        Ok(Rewrite {
            replacements: op.results.first().map(|r| (*r, call.result())).into_iter().collect(),
            ops: vec![scalar, call],
        })
    }
}
