use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Block, ModuleIR, Operation, Value};

/// Sequential numbers for every value, in textual definition order.
///
/// An operation's results are numbered before anything nested in its
/// regions, and block arguments before the block's operations. The C
/// emitter uses the same numbering for its `vN` / `iN` names.
pub fn value_numbering(module: &ModuleIR, start: usize) -> HashMap<Value, usize> {
    fn visit(op: &Operation, next: &mut usize, map: &mut HashMap<Value, usize>) {
        for r in &op.results {
            map.insert(*r, *next);
            *next += 1;
        }
        for region in &op.regions {
            for block in &region.blocks {
                for a in &block.arguments {
                    map.insert(*a, *next);
                    *next += 1;
                }
                for inner in &block.operations {
                    visit(inner, next, map);
                }
            }
        }
    }
    let mut map = HashMap::new();
    let mut next = start;
    for func in &module.functions {
        visit(func, &mut next, &mut map);
    }
    map
}

/// Deterministic generic-form text of `module`.
pub fn print_ir(module: &ModuleIR) -> String {
    if module.functions.is_empty() {
        return "module { }\n".to_string();
    }
    let printer = Printer {
        module,
        names: value_numbering(module, 0),
    };
    let mut out = String::from("module {\n");
    for func in &module.functions {
        printer.op(&mut out, func, 1);
    }
    out.push_str("}\n");
    out
}

struct Printer<'a> {
    module: &'a ModuleIR,
    names: HashMap<Value, usize>,
}

impl Printer<'_> {
    fn name(&self, v: Value) -> String {
        match self.names.get(&v) {
            Some(n) => format!("%{n}"),
            // dangling reference; keep the raw id visible
            None => format!("%<{}>", v.id()),
        }
    }

    fn list(&self, vs: &[Value]) -> String {
        vs.iter().map(|v| self.name(*v)).collect::<Vec<_>>().join(", ")
    }

    fn types(&self, vs: &[Value]) -> Vec<String> {
        vs.iter().map(|v| self.module.ty(*v).to_string()).collect()
    }

    fn op(&self, out: &mut String, op: &Operation, depth: usize) {
        let pad = "  ".repeat(depth);
        out.push_str(&pad);
        if !op.results.is_empty() {
            let _ = write!(out, "{} = ", self.list(&op.results));
        }
        let _ = write!(out, "{}({})", op.full_name(), self.list(&op.operands));
        if !op.attributes.is_empty() {
            let attrs: Vec<String> = op
                .attributes
                .iter()
                .map(|(k, v)| format!("{k} = {v}"))
                .collect();
            let _ = write!(out, " {{{}}}", attrs.join(", "));
        }
        if !op.regions.is_empty() {
            out.push_str(" (");
            for (i, region) in op.regions.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str("{\n");
                for block in &region.blocks {
                    self.block(out, block, depth);
                }
                out.push_str(&pad);
                out.push('}');
            }
            out.push(')');
        }
        let results = self.types(&op.results);
        let results = match results.len() {
            1 => results[0].clone(),
            _ => format!("({})", results.join(", ")),
        };
        let _ = writeln!(out, " : ({}) -> {results}", self.types(&op.operands).join(", "));
    }

    fn block(&self, out: &mut String, block: &Block, depth: usize) {
        let pad = "  ".repeat(depth);
        let args: Vec<String> = block
            .arguments
            .iter()
            .map(|a| format!("{}: {}", self.name(*a), self.module.ty(*a)))
            .collect();
        let _ = writeln!(out, "{pad}^bb0({}):", args.join(", "));
        for op in &block.operations {
            self.op(out, op, depth + 1);
        }
    }
}
