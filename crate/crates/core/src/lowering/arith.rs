use super::precondition;
use crate::dialects::ops::emitc;
use crate::error::PatternError;
use crate::ir::{Operation, Rewrite, RewritePattern, TypeKind, ValueTable};

const EMITC: &[&str] = &["emitc"];

/// `arith.constant` → `emitc.constant`, same value and type.
pub struct ArithConstantLowering;

impl RewritePattern for ArithConstantLowering {
    fn name(&self) -> &'static str {
        "arith-constant-to-emitc"
    }

    fn matches(&self, op: &Operation) -> bool {
        op.is("arith", "constant")
    }

    fn output_dialects(&self) -> &'static [&'static str] {
        EMITC
    }

    fn rewrite(&self, op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError> {
        let value = op
            .attr("value")
            .cloned()
            .ok_or_else(|| precondition(self.name(), &op, "it has no `value` attribute"))?;
        let &[old] = op.results.as_slice() else {
            return Err(precondition(self.name(), &op, "it must have exactly one result"));
        };
        let new = emitc::constant(values, value, values.ty(old).clone());
        Ok(Rewrite {
            replacements: vec![(old, new.result())],
            ops: vec![new],
        })
    }
}

fn binary(
    pattern: &'static str,
    op: Operation,
    values: &mut ValueTable,
    build: fn(&mut ValueTable, crate::ir::Value, crate::ir::Value) -> Operation,
) -> Result<Rewrite, PatternError> {
    let (&[a, b], &[old]) = (op.operands.as_slice(), op.results.as_slice()) else {
        return Err(precondition(pattern, &op, "it must have two operands and one result"));
    };
    if *values.ty(a) != TypeKind::Index || *values.ty(b) != TypeKind::Index {
        return Err(precondition(pattern, &op, "its operands are not index-typed"));
    }
    let new = build(values, a, b);
    Ok(Rewrite {
        replacements: vec![(old, new.result())],
        ops: vec![new],
    })
}

/// `arith.addi` → `emitc.add`.
pub struct ArithAddiLowering;

impl RewritePattern for ArithAddiLowering {
    fn name(&self) -> &'static str {
        "arith-addi-to-emitc"
    }

    fn matches(&self, op: &Operation) -> bool {
        op.is("arith", "addi")
    }

    fn output_dialects(&self) -> &'static [&'static str] {
        EMITC
    }

    fn rewrite(&self, op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError> {
        binary(self.name(), op, values, emitc::add)
    }
}

/// `arith.muli` → `emitc.mul`.
pub struct ArithMuliLowering;

impl RewritePattern for ArithMuliLowering {
    fn name(&self) -> &'static str {
        "arith-muli-to-emitc"
    }

    fn matches(&self, op: &Operation) -> bool {
        op.is("arith", "muli")
    }

    fn output_dialects(&self) -> &'static [&'static str] {
        EMITC
    }

    fn rewrite(&self, op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError> {
        binary(self.name(), op, values, emitc::mul)
    }
}
