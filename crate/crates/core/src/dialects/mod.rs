//! Operation signatures for the six dialect namespaces used by the pipeline.
//!
//! `func`, `arith`, `scf`, the custom `rvv` dialect and `emitc` register
//! operations. `memref` only contributes a type.

pub mod ops;

use std::collections::{BTreeMap, HashMap};
use std::sync::OnceLock;

use crate::ir::{Attribute, Operation, TypeKind, Value, ValueTable};

/// Spelling of the C vector type the `rvv` values lower to.
pub const VECTOR_C_TYPE: &str = "vfloat32m1_t";

pub const RVV_VLE32: &str = "vle32_v_f32m1Op";
pub const RVV_VSE32: &str = "vse32_v_f32m1Op";
pub const RVV_VFMACC: &str = "vfmacc_vf_f32m1Op";

pub const INTRINSIC_VLE32: &str = "__riscv_vle32_v_f32m1";
pub const INTRINSIC_VSE32: &str = "__riscv_vse32_v_f32m1";
pub const INTRINSIC_VFMACC: &str = "__riscv_vfmacc_vf_f32m1";

/// Accepted operand or result types.
#[derive(Debug, Clone, PartialEq)]
pub enum TypeConstraint {
    Exact(TypeKind),
    /// `memref<-1xf32>` or `!emitc.ptr<f32>`; rvv ops accept both until the
    /// rvv lowering runs.
    Buffer,
    /// `!rvv.vfloat32m1` or its lowered opaque spelling.
    Vector,
    /// `index` or `f32`.
    Scalar,
    /// `index` or `!emitc.ptr<f32>`.
    PointerOrIndex,
    Any,
}

impl TypeConstraint {
    pub fn accepts(&self, ty: &TypeKind) -> bool {
        match self {
            TypeConstraint::Exact(t) => t == ty,
            TypeConstraint::Buffer => {
                *ty == TypeKind::MemRefF32Dyn || *ty == TypeKind::f32_ptr()
            }
            TypeConstraint::Vector => {
                *ty == TypeKind::RvvVecF32M1 || *ty == TypeKind::opaque(VECTOR_C_TYPE)
            }
            TypeConstraint::Scalar => matches!(ty, TypeKind::Index | TypeKind::F32),
            TypeConstraint::PointerOrIndex => {
                *ty == TypeKind::Index || *ty == TypeKind::f32_ptr()
            }
            TypeConstraint::Any => true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttrKind {
    Int,
    Float,
    Str,
    Type,
    /// Int or Float, matched against the result type by the op check.
    Number,
}

impl AttrKind {
    fn accepts(self, attr: &Attribute) -> bool {
        matches!(
            (self, attr),
            (AttrKind::Int, Attribute::Int(_))
                | (AttrKind::Float, Attribute::Float(_))
                | (AttrKind::Str, Attribute::Str(_))
                | (AttrKind::Type, Attribute::Type(_))
                | (AttrKind::Number, Attribute::Int(_) | Attribute::Float(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttrSpec {
    pub name: &'static str,
    pub kind: AttrKind,
    pub required: bool,
}

/// Context handed to per-op checks.
pub struct OpCheck<'a> {
    pub op: &'a Operation,
    pub values: &'a ValueTable,
    defs: &'a HashMap<Value, &'a Operation>,
}

impl<'a> OpCheck<'a> {
    pub fn new(
        op: &'a Operation,
        values: &'a ValueTable,
        defs: &'a HashMap<Value, &'a Operation>,
    ) -> Self {
        OpCheck { op, values, defs }
    }

    pub fn ty(&self, v: Value) -> &TypeKind {
        self.values.ty(v)
    }

    /// The operation defining `v`, or `None` for block arguments.
    pub fn defining_op(&self, v: Value) -> Option<&'a Operation> {
        self.defs.get(&v).copied()
    }
}

pub type OpChecker = fn(&OpCheck<'_>) -> Result<(), String>;

#[derive(Debug, Clone)]
pub struct OpSignature {
    pub dialect: &'static str,
    pub name: &'static str,
    pub operands: Vec<TypeConstraint>,
    /// Constraint for operands beyond the fixed prefix, if any are allowed.
    pub variadic_operands: Option<TypeConstraint>,
    pub results: Vec<TypeConstraint>,
    pub variadic_results: Option<TypeConstraint>,
    pub regions: usize,
    pub attributes: Vec<AttrSpec>,
    /// Must be the final operation of its block.
    pub terminator: bool,
    /// Required parent operation, as `(dialect, name)`.
    pub parent: Option<(&'static str, &'static str)>,
    pub check: Option<OpChecker>,
}

impl OpSignature {
    fn new(dialect: &'static str, name: &'static str) -> Self {
        OpSignature {
            dialect,
            name,
            operands: Vec::new(),
            variadic_operands: None,
            results: Vec::new(),
            variadic_results: None,
            regions: 0,
            attributes: Vec::new(),
            terminator: false,
            parent: None,
            check: None,
        }
    }

    fn operands(mut self, c: impl IntoIterator<Item = TypeConstraint>) -> Self {
        self.operands = c.into_iter().collect();
        self
    }

    fn variadic(mut self, c: TypeConstraint) -> Self {
        self.variadic_operands = Some(c);
        self
    }

    fn results(mut self, c: impl IntoIterator<Item = TypeConstraint>) -> Self {
        self.results = c.into_iter().collect();
        self
    }

    fn variadic_results(mut self, c: TypeConstraint) -> Self {
        self.variadic_results = Some(c);
        self
    }

    fn regions(mut self, n: usize) -> Self {
        self.regions = n;
        self
    }

    fn attr(mut self, name: &'static str, kind: AttrKind, required: bool) -> Self {
        self.attributes.push(AttrSpec { name, kind, required });
        self
    }

    fn terminator(mut self) -> Self {
        self.terminator = true;
        self
    }

    fn parent(mut self, dialect: &'static str, name: &'static str) -> Self {
        self.parent = Some((dialect, name));
        self
    }

    fn check(mut self, f: OpChecker) -> Self {
        self.check = Some(f);
        self
    }

    /// Signature-level shape check: operand/result counts and types, regions
    /// and attributes. The op-specific check runs afterwards.
    pub fn check_shape(&self, op: &Operation, values: &ValueTable) -> Result<(), String> {
        check_list(
            "operand",
            &self.operands,
            self.variadic_operands.as_ref(),
            &op.operands,
            values,
        )?;
        check_list(
            "result",
            &self.results,
            self.variadic_results.as_ref(),
            &op.results,
            values,
        )?;
        if op.regions.len() != self.regions {
            return Err(format!(
                "expected {} region(s), found {}",
                self.regions,
                op.regions.len()
            ));
        }
        for spec in &self.attributes {
            match op.attributes.get(spec.name) {
                Some(attr) if !spec.kind.accepts(attr) => {
                    return Err(format!("attribute `{}` has the wrong kind", spec.name));
                }
                None if spec.required => {
                    return Err(format!("missing required attribute `{}`", spec.name));
                }
                _ => {}
            }
        }
        for key in op.attributes.keys() {
            if !self.attributes.iter().any(|s| s.name == key) {
                return Err(format!("unknown attribute `{key}`"));
            }
        }
        Ok(())
    }
}

fn check_list(
    what: &str,
    fixed: &[TypeConstraint],
    variadic: Option<&TypeConstraint>,
    actual: &[Value],
    values: &ValueTable,
) -> Result<(), String> {
    let count_ok = match variadic {
        Some(_) => actual.len() >= fixed.len(),
        None => actual.len() == fixed.len(),
    };
    if !count_ok {
        return Err(format!(
            "expected {}{} {what}(s), found {}",
            fixed.len(),
            if variadic.is_some() { "+" } else { "" },
            actual.len()
        ));
    }
    for (i, v) in actual.iter().enumerate() {
        let Some(info) = values.get(*v) else {
            return Err(format!("{what} #{i} refers to unknown value %{}", v.id()));
        };
        let constraint = fixed.get(i).or(variadic).expect("count checked above");
        if !constraint.accepts(&info.ty) {
            return Err(format!(
                "{what} #{i} has type {}, expected {constraint:?}",
                info.ty
            ));
        }
    }
    Ok(())
}

/// Immutable table of every registered operation signature.
#[derive(Debug, Clone, Default)]
pub struct DialectRegistry {
    ops: BTreeMap<(&'static str, &'static str), OpSignature>,
}

impl DialectRegistry {
    /// Panics on duplicate registration; that is a programming error.
    pub fn register(&mut self, sig: OpSignature) {
        let key = (sig.dialect, sig.name);
        if self.ops.insert(key, sig).is_some() {
            panic!("operation {}.{} registered twice", key.0, key.1);
        }
    }

    pub fn lookup(&self, dialect: &str, name: &str) -> Option<&OpSignature> {
        self.ops
            .iter()
            .find(|((d, n), _)| *d == dialect && *n == name)
            .map(|(_, sig)| sig)
    }

    pub fn ops_in(&self, dialect: &str) -> impl Iterator<Item = &OpSignature> + '_ {
        let dialect = dialect.to_string();
        self.ops.values().filter(move |s| s.dialect == dialect)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }
}

/// The process-wide registry used by [`crate::ir::verify`].
pub fn registry() -> &'static DialectRegistry {
    static REGISTRY: OnceLock<DialectRegistry> = OnceLock::new();
    REGISTRY.get_or_init(register_all)
}

/// Spelling of a function type, e.g. `(index, memref<-1xf32>) -> ()`.
pub fn function_type_string(args: &[TypeKind]) -> String {
    let args: Vec<String> = args.iter().map(ToString::to_string).collect();
    format!("({}) -> ()", args.join(", "))
}

pub fn register_all() -> DialectRegistry {
    use TypeConstraint::*;
    let index = || Exact(TypeKind::Index);
    let mut r = DialectRegistry::default();

    // func
    r.register(
        OpSignature::new("func", "func")
            .regions(1)
            .attr("sym_name", AttrKind::Str, true)
            .attr("function_type", AttrKind::Str, true)
            .attr("readonly_args", AttrKind::Str, false)
            .check(check_func),
    );
    r.register(OpSignature::new("func", "return").terminator().parent("func", "func"));

    // arith
    r.register(
        OpSignature::new("arith", "constant")
            .results([Scalar])
            .attr("value", AttrKind::Number, true)
            .check(check_constant),
    );
    for name in ["addi", "muli"] {
        r.register(
            OpSignature::new("arith", name)
                .operands([index(), index()])
                .results([index()]),
        );
    }

    // scf
    r.register(
        OpSignature::new("scf", "for")
            .operands([index(), index(), index()])
            .variadic(Any)
            .variadic_results(Any)
            .regions(1)
            .check(check_scf_for),
    );
    r.register(
        OpSignature::new("scf", "yield")
            .variadic(Any)
            .terminator()
            .parent("scf", "for"),
    );

    // rvv
    r.register(
        OpSignature::new("rvv", RVV_VLE32)
            .operands([Buffer, index(), index()])
            .results([Vector]),
    );
    r.register(OpSignature::new("rvv", RVV_VSE32).operands([Vector, Buffer, index(), index()]));
    r.register(
        OpSignature::new("rvv", RVV_VFMACC)
            .operands([Vector, Buffer, index(), Vector, index()])
            .results([Vector])
            .check(check_vfmacc),
    );

    // emitc
    r.register(
        OpSignature::new("emitc", "constant")
            .results([Scalar])
            .attr("value", AttrKind::Number, true)
            .check(check_constant),
    );
    r.register(OpSignature::new("emitc", "variable").results([Any]));
    r.register(
        OpSignature::new("emitc", "assign")
            .operands([Any, Any])
            .check(check_assign),
    );
    r.register(
        OpSignature::new("emitc", "load")
            .operands([Any])
            .results([Any])
            .check(check_load),
    );
    r.register(
        OpSignature::new("emitc", "for")
            .operands([index(), index(), index()])
            .regions(1)
            .check(check_emitc_for),
    );
    r.register(
        OpSignature::new("emitc", "subscript")
            .operands([Buffer, index()])
            .results([Exact(TypeKind::F32)]),
    );
    r.register(
        OpSignature::new("emitc", "add")
            .operands([PointerOrIndex, index()])
            .results([PointerOrIndex])
            .check(check_add),
    );
    r.register(
        OpSignature::new("emitc", "mul")
            .operands([index(), index()])
            .results([index()]),
    );
    r.register(
        OpSignature::new("emitc", "call_opaque")
            .variadic(Any)
            .variadic_results(Any)
            .attr("callee", AttrKind::Str, true)
            .check(check_call_opaque),
    );
    r
}

fn check_func(c: &OpCheck<'_>) -> Result<(), String> {
    let name = c.op.attr("sym_name").and_then(Attribute::as_str).unwrap_or("");
    if name.is_empty() {
        return Err("empty function name".into());
    }
    let body = c.op.regions[0].block();
    let arg_types: Vec<TypeKind> = body.arguments.iter().map(|v| c.ty(*v).clone()).collect();
    let expected = function_type_string(&arg_types);
    let declared = c.op.attr("function_type").and_then(Attribute::as_str);
    if declared != Some(expected.as_str()) {
        return Err(format!(
            "function_type {declared:?} does not match entry block arguments {expected}"
        ));
    }
    match body.operations.last() {
        Some(last) if last.is("func", "return") => Ok(()),
        _ => Err("function body must end with func.return".into()),
    }
}

fn check_constant(c: &OpCheck<'_>) -> Result<(), String> {
    let ty = c.ty(c.op.result());
    match (ty, c.op.attr("value")) {
        (TypeKind::Index, Some(Attribute::Int(_))) | (TypeKind::F32, Some(Attribute::Float(_))) => {
            Ok(())
        }
        _ => Err(format!("constant value does not match result type {ty}")),
    }
}

fn check_scf_for(c: &OpCheck<'_>) -> Result<(), String> {
    let op = c.op;
    let inits = &op.operands[3..];
    let body = op.regions[0].block();
    let Some(yield_op) = body.operations.last().filter(|o| o.is("scf", "yield")) else {
        return Err("loop body must end with scf.yield".into());
    };
    let yielded = &yield_op.operands;
    if inits.len() != yielded.len() || inits.len() != op.results.len() {
        return Err(format!(
            "iter-arg count mismatch: {} iter-args, {} yielded values, {} results",
            inits.len(),
            yielded.len(),
            op.results.len()
        ));
    }
    if body.arguments.len() != inits.len() + 1 {
        return Err(format!(
            "loop body expects {} block arguments, found {}",
            inits.len() + 1,
            body.arguments.len()
        ));
    }
    if *c.ty(body.arguments[0]) != TypeKind::Index {
        return Err("induction variable must be index-typed".into());
    }
    for i in 0..inits.len() {
        let tys = [
            c.ty(inits[i]),
            c.ty(body.arguments[i + 1]),
            c.ty(yielded[i]),
            c.ty(op.results[i]),
        ];
        if tys.iter().any(|t| *t != tys[0]) {
            return Err(format!(
                "iter-arg #{i} types disagree (init {}, block arg {}, yield {}, result {})",
                tys[0], tys[1], tys[2], tys[3]
            ));
        }
    }
    Ok(())
}

fn check_vfmacc(c: &OpCheck<'_>) -> Result<(), String> {
    let vd = c.ty(c.op.operands[0]);
    let vs = c.ty(c.op.operands[3]);
    let res = c.ty(c.op.result());
    if vd != vs || vd != res {
        return Err(format!(
            "vfmacc requires result == vd == vs, found {res}, {vd}, {vs}"
        ));
    }
    Ok(())
}

fn variable_target(c: &OpCheck<'_>, v: Value) -> Result<(), String> {
    match c.defining_op(v) {
        Some(def) if def.is("emitc", "variable") => Ok(()),
        _ => Err(format!("%{} is not the result of an emitc.variable", v.id())),
    }
}

fn check_assign(c: &OpCheck<'_>) -> Result<(), String> {
    let (target, value) = (c.op.operands[0], c.op.operands[1]);
    variable_target(c, target)?;
    if c.ty(target) != c.ty(value) {
        return Err(format!(
            "assigning {} to a variable of type {}",
            c.ty(value),
            c.ty(target)
        ));
    }
    Ok(())
}

fn check_load(c: &OpCheck<'_>) -> Result<(), String> {
    let var = c.op.operands[0];
    variable_target(c, var)?;
    if c.ty(var) != c.ty(c.op.result()) {
        return Err("load result type differs from the variable type".into());
    }
    Ok(())
}

fn check_emitc_for(c: &OpCheck<'_>) -> Result<(), String> {
    let body = c.op.regions[0].block();
    if body.arguments.len() != 1 || *c.ty(body.arguments[0]) != TypeKind::Index {
        return Err("emitc.for body takes exactly one index argument".into());
    }
    if body.operations.iter().any(|o| o.is("scf", "yield")) {
        return Err("emitc.for body must not yield".into());
    }
    Ok(())
}

fn check_add(c: &OpCheck<'_>) -> Result<(), String> {
    if c.ty(c.op.operands[0]) != c.ty(c.op.result()) {
        return Err("emitc.add result type must match its first operand".into());
    }
    Ok(())
}

fn check_call_opaque(c: &OpCheck<'_>) -> Result<(), String> {
    if c.op.results.len() > 1 {
        return Err("call_opaque produces at most one result".into());
    }
    match c.op.attr("callee").and_then(Attribute::as_str) {
        Some(s) if !s.is_empty() => Ok(()),
        _ => Err("empty callee".into()),
    }
}
