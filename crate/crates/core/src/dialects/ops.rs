//! Constructors for every registered operation.
//!
//! Each constructor allocates its result values in the supplied
//! [`ValueTable`]. Type checking is left to the verifier.

use crate::ir::{Attribute, Block, Operation, Region, TypeKind, Value, ValueTable};

pub mod func {
    use super::*;
    use crate::dialects::function_type_string;

    /// `func.func @name(args...)` with `body` as its entry block.
    pub fn func(values: &mut ValueTable, name: &str, body: Block) -> Operation {
        let arg_types: Vec<TypeKind> = body.arguments.iter().map(|v| values.ty(*v).clone()).collect();
        Operation::builder("func", "func")
            .attr("sym_name", Attribute::Str(name.to_string()))
            .attr("function_type", Attribute::Str(function_type_string(&arg_types)))
            .region(Region::single(body))
            .finish(values)
    }

    pub fn ret(values: &mut ValueTable) -> Operation {
        Operation::builder("func", "return").finish(values)
    }
}

pub mod arith {
    use super::*;

    pub fn constant_index(values: &mut ValueTable, v: i64) -> Operation {
        Operation::builder("arith", "constant")
            .attr("value", Attribute::Int(v))
            .result(TypeKind::Index)
            .finish(values)
    }

    pub fn constant_f32(values: &mut ValueTable, v: f32) -> Operation {
        Operation::builder("arith", "constant")
            .attr("value", Attribute::Float(v as f64))
            .result(TypeKind::F32)
            .finish(values)
    }

    pub fn addi(values: &mut ValueTable, a: Value, b: Value) -> Operation {
        Operation::builder("arith", "addi")
            .operands([a, b])
            .result(TypeKind::Index)
            .finish(values)
    }

    pub fn muli(values: &mut ValueTable, a: Value, b: Value) -> Operation {
        Operation::builder("arith", "muli")
            .operands([a, b])
            .result(TypeKind::Index)
            .finish(values)
    }
}

pub mod scf {
    use super::*;

    /// `scf.for` over `[lb, ub)` carrying `inits`. `body` must take the
    /// induction variable followed by one argument per init and end with
    /// `scf.yield`.
    pub fn for_(
        values: &mut ValueTable,
        lb: Value,
        ub: Value,
        step: Value,
        inits: &[Value],
        body: Block,
    ) -> Operation {
        let result_types: Vec<TypeKind> = inits.iter().map(|v| values.ty(*v).clone()).collect();
        Operation::builder("scf", "for")
            .operands([lb, ub, step])
            .operands(inits.iter().copied())
            .results(result_types)
            .region(Region::single(body))
            .finish(values)
    }

    pub fn yield_(values: &mut ValueTable, operands: &[Value]) -> Operation {
        Operation::builder("scf", "yield")
            .operands(operands.iter().copied())
            .finish(values)
    }
}

pub mod rvv {
    use super::*;
    use crate::dialects::{RVV_VFMACC, RVV_VLE32, RVV_VSE32};

    pub fn vle32(values: &mut ValueTable, memref: Value, offset: Value, avl: Value) -> Operation {
        Operation::builder("rvv", RVV_VLE32)
            .operands([memref, offset, avl])
            .result(TypeKind::RvvVecF32M1)
            .finish(values)
    }

    pub fn vse32(
        values: &mut ValueTable,
        vec: Value,
        memref: Value,
        offset: Value,
        avl: Value,
    ) -> Operation {
        Operation::builder("rvv", RVV_VSE32)
            .operands([vec, memref, offset, avl])
            .finish(values)
    }

    /// `vd + memref[offset] * vs` over `avl` lanes. Operand order is fixed:
    /// (vd, memref, offset, vs, avl).
    pub fn vfmacc(
        values: &mut ValueTable,
        vd: Value,
        memref: Value,
        offset: Value,
        vs: Value,
        avl: Value,
    ) -> Operation {
        let ty = values.ty(vd).clone();
        Operation::builder("rvv", RVV_VFMACC)
            .operands([vd, memref, offset, vs, avl])
            .result(ty)
            .finish(values)
    }
}

pub mod emitc {
    use super::*;

    pub fn constant(values: &mut ValueTable, value: Attribute, ty: TypeKind) -> Operation {
        Operation::builder("emitc", "constant")
            .attr("value", value)
            .result(ty)
            .finish(values)
    }

    pub fn variable(values: &mut ValueTable, ty: TypeKind) -> Operation {
        Operation::builder("emitc", "variable").result(ty).finish(values)
    }

    pub fn assign(values: &mut ValueTable, target: Value, value: Value) -> Operation {
        Operation::builder("emitc", "assign")
            .operands([target, value])
            .finish(values)
    }

    /// Reads the current contents of an `emitc.variable`.
    pub fn load(values: &mut ValueTable, var: Value) -> Operation {
        let ty = values.ty(var).clone();
        Operation::builder("emitc", "load")
            .operand(var)
            .result(ty)
            .finish(values)
    }

    pub fn for_(values: &mut ValueTable, lb: Value, ub: Value, step: Value, body: Block) -> Operation {
        Operation::builder("emitc", "for")
            .operands([lb, ub, step])
            .region(Region::single(body))
            .finish(values)
    }

    pub fn subscript(values: &mut ValueTable, base: Value, index: Value) -> Operation {
        Operation::builder("emitc", "subscript")
            .operands([base, index])
            .result(TypeKind::F32)
            .finish(values)
    }

    pub fn add(values: &mut ValueTable, a: Value, b: Value) -> Operation {
        let ty = values.ty(a).clone();
        Operation::builder("emitc", "add")
            .operands([a, b])
            .result(ty)
            .finish(values)
    }

    pub fn mul(values: &mut ValueTable, a: Value, b: Value) -> Operation {
        Operation::builder("emitc", "mul")
            .operands([a, b])
            .result(TypeKind::Index)
            .finish(values)
    }

    pub fn call_opaque(
        values: &mut ValueTable,
        callee: &str,
        args: &[Value],
        result: Option<TypeKind>,
    ) -> Operation {
        Operation::builder("emitc", "call_opaque")
            .attr("callee", Attribute::Str(callee.to_string()))
            .operands(args.iter().copied())
            .results(result)
            .finish(values)
    }
}
