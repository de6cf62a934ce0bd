//! Greedy worklist pattern rewriting.
//!
//! Each pattern replaces one matched operation by a sequence of new
//! operations and maps the old results onto new values. Patterns must only
//! produce operations from their declared output dialects, all of which lie in
//! `{emitc, func}`; since no shipped pattern matches those dialects, every
//! rewrite strictly removes a higher-level op and the fixpoint is reached.

use std::collections::HashMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

use super::{verify, Block, Diagnostic, ModuleIR, Operation, Value, ValueTable};
use crate::error::PatternError;

/// Dialects a pattern may produce.
pub const TERMINAL_DIALECTS: [&str; 2] = ["emitc", "func"];

pub trait RewritePattern: Send + Sync {
    fn name(&self) -> &'static str;

    fn matches(&self, op: &Operation) -> bool;

    /// Dialects the replacement operations may belong to.
    fn output_dialects(&self) -> &'static [&'static str];

    /// Consumes the matched operation. Operand types are those after the
    /// driver's pending value substitutions have been applied.
    fn rewrite(&self, op: Operation, values: &mut ValueTable) -> Result<Rewrite, PatternError>;
}

/// Replacement ops plus `(old, new)` value substitutions.
#[derive(Debug, Default)]
pub struct Rewrite {
    pub ops: Vec<Operation>,
    pub replacements: Vec<(Value, Value)>,
}

#[derive(Debug, Clone)]
pub struct PassResult {
    pub module: ModuleIR,
    pub rewrites_applied: usize,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum WorklistOrder {
    /// Pre-order, textual.
    #[default]
    Forward,
    /// Visit the operations of every block in a seeded pseudo-random order.
    Shuffled(u64),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ApplyOptions {
    pub order: WorklistOrder,
}

pub fn apply_patterns(
    module: ModuleIR,
    patterns: &[&dyn RewritePattern],
) -> Result<PassResult, PatternError> {
    apply_patterns_with(module, patterns, ApplyOptions::default())
}

pub fn apply_patterns_with(
    mut module: ModuleIR,
    patterns: &[&dyn RewritePattern],
    options: ApplyOptions,
) -> Result<PassResult, PatternError> {
    for p in patterns {
        if let Some(d) = p
            .output_dialects()
            .iter()
            .find(|d| !TERMINAL_DIALECTS.contains(d))
        {
            return Err(PatternError::UndeclaredOutput {
                pattern: p.name(),
                dialect: d.to_string(),
            });
        }
    }
    let budget = module.op_count().max(1) * patterns.len().max(1) * 4;
    let mut driver = Driver {
        patterns,
        subst: HashMap::new(),
        rng: match options.order {
            WorklistOrder::Forward => None,
            WorklistOrder::Shuffled(seed) => Some(StdRng::seed_from_u64(seed)),
        },
        rewrites: 0,
    };
    loop {
        let before = driver.rewrites;
        let ModuleIR { functions, values } = &mut module;
        for func in functions.iter_mut() {
            driver.visit_regions(func, values)?;
        }
        driver.substitute_all(&mut module);
        if driver.rewrites > budget {
            return Err(PatternError::Budget { budget });
        }
        if driver.rewrites == before {
            break;
        }
    }
    let diagnostics = verify(&module);
    Ok(PassResult {
        module,
        rewrites_applied: driver.rewrites,
        diagnostics,
    })
}

struct Driver<'p> {
    patterns: &'p [&'p dyn RewritePattern],
    subst: HashMap<Value, Value>,
    rng: Option<StdRng>,
    rewrites: usize,
}

impl Driver<'_> {
    fn resolve(&self, mut v: Value) -> Value {
        while let Some(next) = self.subst.get(&v) {
            v = *next;
        }
        v
    }

    fn remap(&self, op: &mut Operation) {
        for v in &mut op.operands {
            *v = self.resolve(*v);
        }
    }

    fn substitute_all(&self, module: &mut ModuleIR) {
        if self.subst.is_empty() {
            return;
        }
        module.walk_mut(|op| self.remap(op));
    }

    fn visit_regions(&mut self, op: &mut Operation, values: &mut ValueTable) -> Result<(), PatternError> {
        for region in &mut op.regions {
            for block in &mut region.blocks {
                self.visit_block(block, values)?;
            }
        }
        Ok(())
    }

    fn visit_block(&mut self, block: &mut Block, values: &mut ValueTable) -> Result<(), PatternError> {
        let ops = std::mem::take(&mut block.operations);
        let mut order: Vec<usize> = (0..ops.len()).collect();
        if let Some(rng) = &mut self.rng {
            order.shuffle(rng);
        }
        let mut slots: Vec<Vec<Operation>> = ops.into_iter().map(|op| vec![op]).collect();
        for idx in order {
            let mut op = slots[idx].pop().expect("each slot starts with one op");
            self.remap(&mut op);
            let pattern = self.patterns.iter().find(|p| p.matches(&op)).copied();
            match pattern {
                Some(pattern) => {
                    let rewrite = pattern.rewrite(op, values)?;
                    let mut new_ops = rewrite.ops;
                    if let Some(stray) = new_ops
                        .iter()
                        .find(|o| !pattern.output_dialects().contains(&o.dialect.as_str()))
                    {
                        return Err(PatternError::UndeclaredOutput {
                            pattern: pattern.name(),
                            dialect: stray.dialect.clone(),
                        });
                    }
                    for (old, new) in rewrite.replacements {
                        if old != new {
                            self.subst.insert(old, new);
                        }
                    }
                    self.rewrites += 1;
                    for new in &mut new_ops {
                        self.remap(new);
                        self.visit_regions(new, values)?;
                    }
                    slots[idx] = new_ops;
                }
                None => {
                    self.visit_regions(&mut op, values)?;
                    slots[idx] = vec![op];
                }
            }
        }
        block.operations = slots.into_iter().flatten().collect();
        Ok(())
    }
}
