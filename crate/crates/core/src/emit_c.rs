//! C source emission for fully lowered `{func, emitc}` modules.
//!
//! One statement per operation. Values are named `v{N}` and loop induction
//! variables `i{N}`, where `N` follows [`value_numbering`] starting at 1.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::EmitError;
use crate::ir::{value_numbering, Attribute, Block, ModuleIR, Operation, TypeKind, Value};
use crate::kernel::KernelConfig;

pub const COMPAT_HEADER: &str = "rvv_compat.h";

/// The dispatch table's element type.
pub const UKERNEL_FN_TYPEDEF: &str =
    "typedef void (*ukernel_fn)(size_t, const float*, const float*, float*, size_t);";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmitOptions {
    /// Headers included at the top of the file, in order.
    pub includes: Vec<String>,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions {
            includes: vec![COMPAT_HEADER.to_string()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CSourceUnit {
    pub includes: Vec<String>,
    /// Names of the functions defined, in emission order.
    pub functions: Vec<String>,
    pub text: String,
}

const C_KEYWORDS: &[&str] = &[
    "auto", "break", "case", "char", "const", "continue", "default", "do", "double", "else",
    "enum", "extern", "float", "for", "goto", "if", "inline", "int", "long", "register",
    "restrict", "return", "short", "signed", "sizeof", "static", "struct", "switch", "typedef",
    "union", "unsigned", "void", "volatile", "while", "_Bool", "_Complex", "_Imaginary",
];

pub fn is_c_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    let head_ok = matches!(chars.next(), Some(c) if c == '_' || c.is_ascii_alphabetic());
    head_ok && chars.all(|c| c == '_' || c.is_ascii_alphanumeric()) && !C_KEYWORDS.contains(&name)
}

fn prologue(options: &EmitOptions) -> String {
    let mut out = String::new();
    for inc in &options.includes {
        let _ = writeln!(out, "#include \"{inc}\"");
    }
    out
}

/// Emits every function of `module` into one translation unit.
pub fn emit_c(module: &ModuleIR, options: &EmitOptions) -> Result<CSourceUnit, EmitError> {
    let mut text = prologue(options);
    let functions = emit_functions(module, &mut text)?;
    Ok(CSourceUnit {
        includes: options.includes.clone(),
        functions,
        text,
    })
}

fn emit_functions(module: &ModuleIR, text: &mut String) -> Result<Vec<String>, EmitError> {
    let names = value_numbering(module, 1);
    let mut functions = Vec::new();
    for func in &module.functions {
        let name = func
            .attr("sym_name")
            .and_then(Attribute::as_str)
            .ok_or_else(|| EmitError::Unsupported {
                op: func.full_name(),
                reason: "top-level operation is not a named func.func".to_string(),
            })?;
        if !func.is("func", "func") {
            return Err(EmitError::Unsupported {
                op: func.full_name(),
                reason: "only func.func may appear at top level".to_string(),
            });
        }
        if !is_c_identifier(name) {
            return Err(EmitError::BadIdentifier(name.to_string()));
        }
        text.push('\n');
        FunctionEmitter::new(module, &names, func)?.emit(name, text)?;
        functions.push(name.to_string());
    }
    Ok(functions)
}

/// Emits a family of kernels plus the `ukernels[MR][NR]` dispatch table.
pub fn emit_kernel_set(
    family: &[(KernelConfig, ModuleIR)],
    options: &EmitOptions,
) -> Result<CSourceUnit, EmitError> {
    let mut text = prologue(options);
    let mut functions = Vec::new();
    let mut table: BTreeMap<(usize, usize), String> = BTreeMap::new();
    for (config, module) in family {
        let emitted = emit_functions(module, &mut text)?;
        let name = config.kernel_name();
        if !emitted.contains(&name) {
            return Err(EmitError::Unsupported {
                op: "func.func".to_string(),
                reason: format!("module for {}x{} does not define {name}", config.mr, config.nr),
            });
        }
        if table.insert((config.mr, config.nr), name.clone()).is_some() || functions.contains(&name) {
            return Err(EmitError::DuplicateKernel(name));
        }
        functions.extend(emitted);
    }
    let mr = table.keys().map(|k| k.0).max().unwrap_or(0);
    let nr = table.keys().map(|k| k.1).max().unwrap_or(0);
    let _ = writeln!(text, "\n{UKERNEL_FN_TYPEDEF}\n");
    if mr == 0 {
        let _ = writeln!(text, "const ukernel_fn ukernels[1][1] = {{ {{ 0 }} }};");
    } else {
        let _ = writeln!(text, "const ukernel_fn ukernels[{mr}][{nr}] = {{");
        for i in 1..=mr {
            let row: Vec<&str> = (1..=nr)
                .map(|j| table.get(&(i, j)).map(String::as_str).unwrap_or("0"))
                .collect();
            let _ = writeln!(text, "  {{ {} }},", row.join(", "));
        }
        text.push_str("};\n");
    }
    Ok(CSourceUnit {
        includes: options.includes.clone(),
        functions,
        text,
    })
}

/// File name for a single emitted kernel.
pub fn kernel_file_name(config: &KernelConfig) -> String {
    format!("{}_vlen{}.c", config.kernel_name(), config.vlen_bits)
}

/// File name for an emitted kernel family.
pub fn kernel_set_file_name(config: &KernelConfig) -> String {
    format!("ukernels_{}x{}_vlen{}.c", config.mr, config.nr, config.vlen_bits)
}

struct FunctionEmitter<'a> {
    module: &'a ModuleIR,
    names: &'a HashMap<Value, usize>,
    func: &'a Operation,
    /// Pointer values derived from read-only parameters.
    const_ptrs: HashSet<Value>,
    ivs: HashSet<Value>,
    /// Variables whose declaration is deferred to their first assign.
    pending: HashSet<Value>,
}

impl<'a> FunctionEmitter<'a> {
    fn new(
        module: &'a ModuleIR,
        names: &'a HashMap<Value, usize>,
        func: &'a Operation,
    ) -> Result<Self, EmitError> {
        let args = &func.regions[0].block().arguments;
        let mut const_ptrs = HashSet::new();
        if let Some(spec) = func.attr("readonly_args").and_then(Attribute::as_str) {
            for idx in spec.split(',').filter(|s| !s.is_empty()) {
                let i: usize = idx.trim().parse().map_err(|_| EmitError::Unsupported {
                    op: func.full_name(),
                    reason: format!("bad readonly_args entry `{idx}`"),
                })?;
                if let Some(v) = args.get(i) {
                    const_ptrs.insert(*v);
                }
            }
        }
        Ok(FunctionEmitter {
            module,
            names,
            func,
            const_ptrs,
            ivs: HashSet::new(),
            pending: HashSet::new(),
        })
    }

    fn name(&self, v: Value) -> String {
        let n = self.names.get(&v).copied().unwrap_or(0);
        if self.ivs.contains(&v) {
            format!("i{n}")
        } else {
            format!("v{n}")
        }
    }

    fn c_type(&self, v: Value) -> Result<String, EmitError> {
        let ty = self.module.ty(v);
        Ok(match ty {
            TypeKind::Index => "size_t".to_string(),
            TypeKind::F32 => "float".to_string(),
            TypeKind::EmitCPtr(elem) if **elem == TypeKind::F32 => {
                if self.const_ptrs.contains(&v) {
                    "const float*".to_string()
                } else {
                    "float*".to_string()
                }
            }
            TypeKind::EmitCOpaque(s) => s.clone(),
            other => return Err(EmitError::UnloweredType(other.to_string())),
        })
    }

    fn emit(mut self, name: &str, out: &mut String) -> Result<(), EmitError> {
        let body = self.func.regions[0].block();
        let params = body
            .arguments
            .iter()
            .map(|a| Ok(format!("{} {}", self.c_type(*a)?, self.name(*a))))
            .collect::<Result<Vec<_>, EmitError>>()?;
        let params = if params.is_empty() {
            "void".to_string()
        } else {
            params.join(", ")
        };
        let mut lines = String::new();
        let mut used = HashSet::new();
        self.func.walk(&mut |op: &Operation| used.extend(op.operands.iter().copied()));
        for a in &body.arguments {
            if !used.contains(a) {
                let _ = writeln!(lines, "  (void){};", self.name(*a));
            }
        }
        self.block(body, 1, true, &mut lines)?;
        if lines.is_empty() {
            let _ = writeln!(out, "void {name}({params}) {{ }}");
        } else {
            let _ = writeln!(out, "void {name}({params}) {{");
            out.push_str(&lines);
            out.push_str("}\n");
        }
        Ok(())
    }

    fn block(&mut self, block: &Block, depth: usize, top: bool, out: &mut String) -> Result<(), EmitError> {
        let pad = "  ".repeat(depth);
        let ops = &block.operations;
        for (idx, op) in ops.iter().enumerate() {
            let last = idx + 1 == ops.len();
            let res = op.results.first().copied();
            let decl = |me: &Self, v: Value| -> Result<String, EmitError> {
                Ok(format!("{} {}", me.c_type(v)?, me.name(v)))
            };
            match (op.dialect.as_str(), op.name.as_str()) {
                ("func", "return") if top && last => {}
                ("func", "return") => {
                    let _ = writeln!(out, "{pad}return;");
                }
                ("emitc", "constant") => {
                    let v = res.ok_or_else(|| unsupported(op, "missing result"))?;
                    let lit = self.literal(op, v)?;
                    let _ = writeln!(out, "{pad}{} = {lit};", decl(self, v)?);
                }
                ("emitc", "variable") => {
                    let v = res.ok_or_else(|| unsupported(op, "missing result"))?;
                    let first_use = ops[idx + 1..].iter().find(|o| mentions(o, v));
                    match first_use {
                        Some(o) if o.is("emitc", "assign") && o.operands[0] == v && o.operands[1] != v => {
                            self.pending.insert(v);
                        }
                        _ => {
                            let _ = writeln!(out, "{pad}{};", decl(self, v)?);
                        }
                    }
                }
                ("emitc", "assign") => {
                    let [target, value] = two(op)?;
                    if self.pending.remove(&target) {
                        let _ = writeln!(out, "{pad}{} = {};", decl(self, target)?, self.name(value));
                    } else {
                        let _ = writeln!(out, "{pad}{} = {};", self.name(target), self.name(value));
                    }
                }
                ("emitc", "load") => {
                    let v = res.ok_or_else(|| unsupported(op, "missing result"))?;
                    let src = *op.operands.first().ok_or_else(|| unsupported(op, "missing operand"))?;
                    let _ = writeln!(out, "{pad}{} = {};", decl(self, v)?, self.name(src));
                }
                ("emitc", "subscript") => {
                    let v = res.ok_or_else(|| unsupported(op, "missing result"))?;
                    let [base, index] = two(op)?;
                    let _ = writeln!(out, "{pad}{} = {}[{}];", decl(self, v)?, self.name(base), self.name(index));
                }
                ("emitc", "add") | ("emitc", "mul") => {
                    let v = res.ok_or_else(|| unsupported(op, "missing result"))?;
                    let [a, b] = two(op)?;
                    if op.name == "add" && self.const_ptrs.contains(&a) {
                        self.const_ptrs.insert(v);
                    }
                    let sym = if op.name == "add" { "+" } else { "*" };
                    let _ = writeln!(out, "{pad}{} = {} {sym} {};", decl(self, v)?, self.name(a), self.name(b));
                }
                ("emitc", "call_opaque") => {
                    let callee = op
                        .attr("callee")
                        .and_then(Attribute::as_str)
                        .filter(|c| is_c_identifier(c))
                        .ok_or_else(|| unsupported(op, "callee is not a C identifier"))?;
                    let args: Vec<String> = op.operands.iter().map(|a| self.name(*a)).collect();
                    let call = format!("{callee}({})", args.join(", "));
                    match res {
                        Some(v) => {
                            let _ = writeln!(out, "{pad}{} = {call};", decl(self, v)?);
                        }
                        None => {
                            let _ = writeln!(out, "{pad}{call};");
                        }
                    }
                }
                ("emitc", "for") => {
                    let &[lb, ub, step] = op.operands.as_slice() else {
                        return Err(unsupported(op, "expected three operands"));
                    };
                    let inner = op
                        .regions
                        .first()
                        .and_then(|r| r.blocks.first())
                        .ok_or_else(|| unsupported(op, "missing body"))?;
                    let &[iv] = inner.arguments.as_slice() else {
                        return Err(unsupported(op, "body must take one induction variable"));
                    };
                    self.ivs.insert(iv);
                    let i = self.name(iv);
                    let _ = writeln!(
                        out,
                        "{pad}for (size_t {i} = {}; {i} < {}; {i} += {}) {{",
                        self.name(lb),
                        self.name(ub),
                        self.name(step)
                    );
                    self.block(inner, depth + 1, false, out)?;
                    let _ = writeln!(out, "{pad}}}");
                }
                _ => return Err(unsupported(op, "not in the supported emitc subset")),
            }
        }
        Ok(())
    }

    fn literal(&self, op: &Operation, v: Value) -> Result<String, EmitError> {
        match (op.attr("value"), self.module.ty(v)) {
            (Some(Attribute::Int(i)), TypeKind::Index) if *i >= 0 => Ok(i.to_string()),
            (Some(Attribute::Float(f)), TypeKind::F32) if f.is_finite() => {
                Ok(format!("{:?}f", *f as f32))
            }
            _ => Err(unsupported(op, "constant value does not fit its type")),
        }
    }
}

fn mentions(op: &Operation, v: Value) -> bool {
    let mut found = false;
    op.walk(&mut |o: &Operation| found |= o.operands.contains(&v));
    found
}

fn two(op: &Operation) -> Result<[Value; 2], EmitError> {
    match op.operands.as_slice() {
        &[a, b] => Ok([a, b]),
        _ => Err(unsupported(op, "expected two operands")),
    }
}

fn unsupported(op: &Operation, reason: &str) -> EmitError {
    EmitError::Unsupported {
        op: op.full_name(),
        reason: reason.to_string(),
    }
}
