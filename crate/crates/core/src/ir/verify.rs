use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Block, DefSite, ModuleIR, Operation, Value};
use crate::dialects::{registry, DialectRegistry, OpCheck};

/// A structural problem found by [`verify`], located by an op path such as
/// `@ukernel_8x4_f32/scf.for#12`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Checks `module` against the global dialect registry.
pub fn verify(module: &ModuleIR) -> Vec<Diagnostic> {
    verify_with(registry(), module)
}

pub fn verify_with(registry: &DialectRegistry, module: &ModuleIR) -> Vec<Diagnostic> {
    let mut v = Verifier {
        registry,
        module,
        defs: HashMap::new(),
        scopes: Vec::new(),
        diags: Vec::new(),
    };
    v.collect_definitions();
    for (i, func) in module.functions.iter().enumerate() {
        let name = func
            .attr("sym_name")
            .and_then(|a| a.as_str())
            .map(|s| format!("@{s}"))
            .unwrap_or_else(|| format!("#{i}"));
        if !func.is("func", "func") {
            v.report(&name, format!("top-level operation {} is not func.func", func.full_name()));
            continue;
        }
        v.visit_op(func, &name, None, false);
    }
    v.diags
}

struct Verifier<'a> {
    registry: &'a DialectRegistry,
    module: &'a ModuleIR,
    defs: HashMap<Value, &'a Operation>,
    scopes: Vec<HashSet<Value>>,
    diags: Vec<Diagnostic>,
}

impl<'a> Verifier<'a> {
    fn report(&mut self, path: &str, message: impl Into<String>) {
        self.diags.push(Diagnostic {
            path: path.to_string(),
            message: message.into(),
        });
    }

    /// Counts definitions of every value and checks them against the table.
    fn collect_definitions(&mut self) {
        let mut counts: HashMap<Value, usize> = HashMap::new();
        let mut problems = Vec::new();
        let table = &self.module.values;
        let mut defs = HashMap::new();
        self.module.walk(|op| {
            for (i, r) in op.results.iter().enumerate() {
                *counts.entry(*r).or_insert(0) += 1;
                defs.insert(*r, op);
                match table.get(*r) {
                    Some(info) if info.def == DefSite::OpResult(i) => {}
                    Some(_) => problems.push(format!(
                        "%{} is result #{i} of {} but the value table disagrees",
                        r.id(),
                        op.full_name()
                    )),
                    None => problems.push(format!("%{} is not in the value table", r.id())),
                }
            }
            for region in &op.regions {
                for block in &region.blocks {
                    for (i, a) in block.arguments.iter().enumerate() {
                        *counts.entry(*a).or_insert(0) += 1;
                        match table.get(*a) {
                            Some(info) if info.def == DefSite::BlockArg(i) => {}
                            Some(_) => problems.push(format!(
                                "%{} is block argument #{i} but the value table disagrees",
                                a.id()
                            )),
                            None => {
                                problems.push(format!("%{} is not in the value table", a.id()))
                            }
                        }
                    }
                }
            }
        });
        let mut multi: Vec<_> = counts.into_iter().filter(|(_, n)| *n > 1).collect();
        multi.sort();
        for (v, n) in multi {
            problems.push(format!("%{} has {n} definitions", v.id()));
        }
        for v in self.module.live_values() {
            if let Some(info) = table.get(v) {
                if let Err(e) = info.ty.check() {
                    problems.push(format!("%{}: {e}", v.id()));
                }
            }
        }
        for p in problems {
            self.report("module", p);
        }
        self.defs = defs;
    }

    fn visible(&self, v: Value) -> bool {
        self.scopes.iter().any(|s| s.contains(&v))
    }

    fn visit_block(&mut self, block: &'a Block, path: &str, parent: &'a Operation) {
        self.scopes.push(block.arguments.iter().copied().collect());
        let last = block.operations.len().saturating_sub(1);
        for (i, op) in block.operations.iter().enumerate() {
            let op_path = format!("{path}/{}#{i}", op.full_name());
            self.visit_op(op, &op_path, Some(parent), i == last);
            self.scopes
                .last_mut()
                .expect("scope pushed above")
                .extend(op.results.iter().copied());
        }
        self.scopes.pop();
    }

    fn visit_op(&mut self, op: &'a Operation, path: &str, parent: Option<&Operation>, is_last: bool) {
        for (i, v) in op.operands.iter().enumerate() {
            if !self.visible(*v) {
                self.report(
                    path,
                    format!("operand #{i} (%{}) is used before its definition or out of scope", v.id()),
                );
            }
        }
        match self.registry.lookup(&op.dialect, &op.name) {
            None => self.report(path, format!("unregistered operation {}", op.full_name())),
            Some(sig) => {
                if let Some((pd, pn)) = sig.parent {
                    if !parent.is_some_and(|p| p.is(pd, pn)) {
                        self.report(path, format!("{} must be nested directly in {pd}.{pn}", op.full_name()));
                    }
                }
                if sig.terminator && !is_last {
                    self.report(path, format!("{} must terminate its block", op.full_name()));
                }
                match sig.check_shape(op, &self.module.values) {
                    Err(e) => self.report(path, e),
                    Ok(()) => {
                        if let Some(check) = sig.check {
                            let ctx = OpCheck::new(op, &self.module.values, &self.defs);
                            if let Err(e) = check(&ctx) {
                                self.report(path, e);
                            }
                        }
                    }
                }
            }
        }
        for region in &op.regions {
            if region.blocks.len() != 1 {
                self.report(
                    path,
                    format!("regions must contain exactly one block, found {}", region.blocks.len()),
                );
            }
            for block in &region.blocks {
                self.visit_block(block, path, op);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialects::ops::{arith, func, rvv, scf};
    use crate::ir::TypeKind;

    fn one_func(build: impl FnOnce(&mut ModuleIR, &mut Vec<Operation>, &[Value])) -> ModuleIR {
        let mut m = ModuleIR::new();
        let args = vec![
            m.values.block_arg(TypeKind::Index, 0),
            m.values.block_arg(TypeKind::MemRefF32Dyn, 1),
        ];
        let mut ops = Vec::new();
        build(&mut m, &mut ops, &args);
        ops.push(func::ret(&mut m.values));
        let f = func::func(&mut m.values, "f", Block::new(args, ops));
        m.functions.push(f);
        m
    }

    #[test]
    fn empty_module_is_clean() {
        assert!(verify(&ModuleIR::new()).is_empty());
    }

    #[test]
    fn well_formed_function_is_clean() {
        let m = one_func(|m, ops, args| {
            let c = arith::constant_index(&mut m.values, 4);
            let v = rvv::vle32(&mut m.values, args[1], c.result(), c.result());
            let s = rvv::vse32(&mut m.values, v.result(), args[1], c.result(), args[0]);
            ops.extend([c, v, s]);
        });
        assert_eq!(verify(&m), vec![]);
    }

    #[test]
    fn yield_count_mismatch_reports_the_for_op_once() {
        let m = one_func(|m, ops, args| {
            let zero = arith::constant_index(&mut m.values, 0);
            let one = arith::constant_index(&mut m.values, 1);
            let init = rvv::vle32(&mut m.values, args[1], zero.result(), one.result());
            let inits = vec![init.result(); 4];
            let iv = m.values.block_arg(TypeKind::Index, 0);
            let mut bargs = vec![iv];
            for i in 0..4 {
                bargs.push(m.values.block_arg(TypeKind::RvvVecF32M1, i + 1));
            }
            let y = scf::yield_(&mut m.values, &bargs[1..4]);
            let body = Block::new(bargs, vec![y]);
            let f = scf::for_(&mut m.values, zero.result(), args[0], one.result(), &inits, body);
            ops.extend([zero, one, init, f]);
        });
        let diags = verify(&m);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert!(diags[0].path.contains("scf.for"), "{}", diags[0]);
        assert!(diags[0].message.contains("iter-arg count"));
    }

    #[test]
    fn use_before_definition_is_reported() {
        let m = one_func(|m, ops, args| {
            let c = arith::constant_index(&mut m.values, 2);
            let add = arith::addi(&mut m.values, c.result(), args[0]);
            ops.extend([add, c]);
        });
        let diags = verify(&m);
        assert_eq!(diags.len(), 1, "{diags:?}");
        assert!(diags[0].message.contains("before its definition"));
    }

    #[test]
    fn operand_type_mismatch_is_reported() {
        let m = one_func(|m, ops, args| {
            // vle32 with an index where the buffer belongs
            let v = rvv::vle32(&mut m.values, args[0], args[0], args[0]);
            ops.push(v);
        });
        let diags = verify(&m);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("operand #0"));
    }

    #[test]
    fn duplicate_definition_is_reported() {
        let mut m = one_func(|m, ops, _| {
            ops.push(arith::constant_index(&mut m.values, 1));
            ops.push(arith::constant_index(&mut m.values, 2));
        });
        let body = m.functions[0].regions[0].block_mut();
        let first = body.operations[0].results[0];
        body.operations[1].results[0] = first;
        let diags = verify(&m);
        assert!(diags.iter().any(|d| d.message.contains("2 definitions")), "{diags:?}");
    }

    #[test]
    fn multi_block_region_is_rejected() {
        let mut m = one_func(|_, _, _| {});
        m.functions[0].regions[0].blocks.push(Block::default());
        let diags = verify(&m);
        assert!(diags.iter().any(|d| d.message.contains("exactly one block")));
    }

    #[test]
    fn unregistered_op_is_reported() {
        let mut m = one_func(|_, _, _| {});
        let bogus = Operation::builder("memref", "alloc").finish(&mut m.values);
        m.functions[0].regions[0].block_mut().operations.insert(0, bogus);
        let diags = verify(&m);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("unregistered"));
    }

    #[test]
    fn stale_function_type_is_reported() {
        let mut m = one_func(|_, _, _| {});
        let arg = m.functions[0].regions[0].block().arguments[1];
        m.values.set_type(arg, TypeKind::f32_ptr());
        let diags = verify(&m);
        assert_eq!(diags.len(), 1);
        assert!(diags[0].message.contains("function_type"));
    }
}
