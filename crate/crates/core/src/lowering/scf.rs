use super::precondition;
use crate::dialects::ops::emitc;
use crate::error::PatternError;
use crate::ir::{Block, Operation, Rewrite, RewritePattern, ValueTable};

/// `scf.for` with iter-args → `emitc.for` plus one `emitc.variable` per
/// carried value.
///
/// ```text
/// %r = scf.for %iv = lb to ub step s iter_args(%a = %init) { ...; yield %x }
/// ```
/// becomes
/// ```text
/// %v = emitc.variable; emitc.assign %v, %init
/// emitc.for %iv = lb to ub step s { %a = emitc.load %v; ...; emitc.assign %v, %x }
/// %r = emitc.load %v
/// ```
pub struct ScfForLowering;

impl RewritePattern for ScfForLowering {
    fn name(&self) -> &'static str {
        "scf-for-to-emitc"
    }

    fn matches(&self, op: &Operation) -> bool {
        op.is("scf", "for")
    }

    fn output_dialects(&self) -> &'static [&'static str] {
        &["emitc"]
    }

    fn rewrite(&self, mut op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError> {
        if op.operands.len() < 3 || op.regions.len() != 1 || op.regions[0].blocks.len() != 1 {
            return Err(precondition(self.name(), &op, "it is malformed"));
        }
        let inits = op.operands[3..].to_vec();
        let mut body = std::mem::take(op.regions[0].block_mut());
        if body.arguments.len() != inits.len() + 1 || op.results.len() != inits.len() {
            return Err(precondition(
                self.name(),
                &op,
                "its iter-args, inits and results disagree in number",
            ));
        }
        let yielded = match body.operations.pop() {
            Some(y) if y.is("scf", "yield") && y.operands.len() == inits.len() => y.operands,
            _ => {
                return Err(precondition(
                    self.name(),
                    &op,
                    "its body does not end in a matching scf.yield",
                ))
            }
        };
        let iv = body.arguments[0];
        let iter_args = body.arguments[1..].to_vec();

        let mut ops = Vec::new();
        let mut replacements = Vec::new();
        let mut vars = Vec::with_capacity(inits.len());
        for (arg, init) in iter_args.iter().zip(&inits) {
            let var = emitc::variable(values, values.ty(*arg).clone());
            let v = var.result();
            ops.push(var);
            ops.push(emitc::assign(values, v, *init));
            vars.push(v);
        }

        let mut inner = Vec::with_capacity(body.operations.len() + 2 * vars.len());
        for (arg, var) in iter_args.iter().zip(&vars) {
            let load = emitc::load(values, *var);
            replacements.push((*arg, load.result()));
            inner.push(load);
        }
        inner.append(&mut body.operations);
        for (var, y) in vars.iter().zip(&yielded) {
            inner.push(emitc::assign(values, *var, *y));
        }
        let (lb, ub, step) = (op.operands[0], op.operands[1], op.operands[2]);
        ops.push(emitc::for_(values, lb, ub, step, Block::new(vec![iv], inner)));

        for (res, var) in op.results.iter().zip(&vars) {
            let load = emitc::load(values, *var);
            replacements.push((*res, load.result()));
            ops.push(load);
        }
        Ok(Rewrite { ops, replacements })
    }
}
