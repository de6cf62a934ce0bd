//! Test support: a direct IR interpreter and a scalar reference kernel.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use ukgen_core::ir::{Attribute, Block, ModuleIR, Operation, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Rt {
    Index(usize),
    F32(f32),
    Vector(Vec<f32>),
    /// Buffer id and element offset.
    Ptr(usize, usize),
    Var(usize),
    Unset,
}

/// Executes a module over host buffers, one op at a time.
pub struct Machine<'m> {
    module: &'m ModuleIR,
    pub lanes: usize,
    pub buffers: Vec<Vec<f32>>,
    env: HashMap<Value, Rt>,
    vars: Vec<Rt>,
    pub intrinsic_calls: usize,
}

impl<'m> Machine<'m> {
    pub fn new(module: &'m ModuleIR, vlen_bits: usize) -> Self {
        Machine {
            module,
            lanes: vlen_bits / 32,
            buffers: Vec::new(),
            env: HashMap::new(),
            vars: Vec::new(),
            intrinsic_calls: 0,
        }
    }

    pub fn buffer(&mut self, data: Vec<f32>) -> Rt {
        self.buffers.push(data);
        Rt::Ptr(self.buffers.len() - 1, 0)
    }

    pub fn call(&mut self, name: &str, args: Vec<Rt>) {
        let func = self.module.function(name).expect("function exists");
        let body = func.regions[0].block();
        assert_eq!(body.arguments.len(), args.len());
        for (a, v) in body.arguments.iter().zip(args) {
            self.env.insert(*a, v);
        }
        self.run_block(body);
    }

    fn get(&self, v: Value) -> Rt {
        self.env.get(&v).cloned().unwrap_or_else(|| panic!("value {v:?} read before definition"))
    }

    fn index(&self, v: Value) -> usize {
        match self.get(v) {
            Rt::Index(i) => i,
            other => panic!("expected index, got {other:?}"),
        }
    }

    fn ptr(&self, v: Value) -> (usize, usize) {
        match self.get(v) {
            Rt::Ptr(b, o) => (b, o),
            other => panic!("expected pointer, got {other:?}"),
        }
    }

    fn vector(&self, v: Value) -> Vec<f32> {
        match self.get(v) {
            Rt::Vector(x) => x,
            other => panic!("expected vector, got {other:?}"),
        }
    }

    fn var(&self, v: Value) -> usize {
        match self.get(v) {
            Rt::Var(s) => s,
            other => panic!("expected variable, got {other:?}"),
        }
    }

    fn set(&mut self, op: &Operation, value: Rt) {
        self.env.insert(op.results[0], value);
    }

    fn vle(&mut self, (b, o): (usize, usize), vl: usize) -> Rt {
        assert!(vl >= 1 && vl <= self.lanes, "vl {vl} out of range");
        let mut lanes = vec![0.0; self.lanes];
        lanes[..vl].copy_from_slice(&self.buffers[b][o..o + vl]);
        Rt::Vector(lanes)
    }

    fn vse(&mut self, (b, o): (usize, usize), v: &[f32], vl: usize) {
        assert!(vl >= 1 && vl <= self.lanes, "vl {vl} out of range");
        self.buffers[b][o..o + vl].copy_from_slice(&v[..vl]);
    }

    fn vfmacc(&self, mut vd: Vec<f32>, s: f32, vs: &[f32], vl: usize) -> Rt {
        assert!(vl >= 1 && vl <= self.lanes, "vl {vl} out of range");
        for i in 0..vl {
            let prod = s * vs[i];
            vd[i] += prod;
        }
        Rt::Vector(vd)
    }

    fn run_block(&mut self, block: &Block) -> Option<Vec<Rt>> {
        for op in &block.operations {
            let key = (op.dialect.as_str(), op.name.as_str());
            match key {
                ("func", "return") => return None,
                ("scf", "yield") => {
                    return Some(op.operands.iter().map(|v| self.get(*v)).collect());
                }
                ("arith", "constant") | ("emitc", "constant") => {
                    let v = match op.attr("value") {
                        Some(Attribute::Int(i)) => Rt::Index(*i as usize),
                        Some(Attribute::Float(f)) => Rt::F32(*f as f32),
                        other => panic!("bad constant {other:?}"),
                    };
                    self.set(op, v);
                }
                ("arith", "addi") | ("emitc", "add") => {
                    let v = match self.get(op.operands[0]) {
                        Rt::Ptr(b, o) => Rt::Ptr(b, o + self.index(op.operands[1])),
                        Rt::Index(a) => Rt::Index(a + self.index(op.operands[1])),
                        other => panic!("bad add operand {other:?}"),
                    };
                    self.set(op, v);
                }
                ("arith", "muli") | ("emitc", "mul") => {
                    let v = self.index(op.operands[0]) * self.index(op.operands[1]);
                    self.set(op, Rt::Index(v));
                }
                ("scf", "for") => {
                    let (lb, ub, step) = (
                        self.index(op.operands[0]),
                        self.index(op.operands[1]),
                        self.index(op.operands[2]),
                    );
                    let mut carried: Vec<Rt> = op.operands[3..].iter().map(|v| self.get(*v)).collect();
                    let body = op.regions[0].block();
                    let mut iv = lb;
                    while iv < ub {
                        self.env.insert(body.arguments[0], Rt::Index(iv));
                        for (a, v) in body.arguments[1..].iter().zip(carried) {
                            self.env.insert(*a, v);
                        }
                        carried = self.run_block(body).expect("scf.for body yields");
                        iv += step;
                    }
                    for (r, v) in op.results.iter().zip(carried) {
                        self.env.insert(*r, v);
                    }
                }
                ("emitc", "for") => {
                    let (lb, ub, step) = (
                        self.index(op.operands[0]),
                        self.index(op.operands[1]),
                        self.index(op.operands[2]),
                    );
                    let body = op.regions[0].block();
                    let mut iv = lb;
                    while iv < ub {
                        self.env.insert(body.arguments[0], Rt::Index(iv));
                        self.run_block(body);
                        iv += step;
                    }
                }
                ("rvv", "vle32_v_f32m1Op") => {
                    let (b, o) = self.ptr(op.operands[0]);
                    let v = self.vle((b, o + self.index(op.operands[1])), self.index(op.operands[2]));
                    self.set(op, v);
                }
                ("rvv", "vse32_v_f32m1Op") => {
                    let vec = self.vector(op.operands[0]);
                    let (b, o) = self.ptr(op.operands[1]);
                    let off = self.index(op.operands[2]);
                    let vl = self.index(op.operands[3]);
                    self.vse((b, o + off), &vec, vl);
                }
                ("rvv", "vfmacc_vf_f32m1Op") => {
                    let vd = self.vector(op.operands[0]);
                    let (b, o) = self.ptr(op.operands[1]);
                    let s = self.buffers[b][o + self.index(op.operands[2])];
                    let vs = self.vector(op.operands[3]);
                    let v = self.vfmacc(vd, s, &vs, self.index(op.operands[4]));
                    self.set(op, v);
                }
                ("emitc", "variable") => {
                    self.vars.push(Rt::Unset);
                    let slot = self.vars.len() - 1;
                    self.set(op, Rt::Var(slot));
                }
                ("emitc", "assign") => {
                    let slot = self.var(op.operands[0]);
                    self.vars[slot] = self.get(op.operands[1]);
                }
                ("emitc", "load") => {
                    let v = self.vars[self.var(op.operands[0])].clone();
                    assert_ne!(v, Rt::Unset, "load of unassigned variable");
                    self.set(op, v);
                }
                ("emitc", "subscript") => {
                    let (b, o) = self.ptr(op.operands[0]);
                    let v = self.buffers[b][o + self.index(op.operands[1])];
                    self.set(op, Rt::F32(v));
                }
                ("emitc", "call_opaque") => {
                    self.intrinsic_calls += 1;
                    let callee = op.attr("callee").and_then(Attribute::as_str).unwrap();
                    match callee {
                        "__riscv_vle32_v_f32m1" => {
                            let v = self.vle(self.ptr(op.operands[0]), self.index(op.operands[1]));
                            self.set(op, v);
                        }
                        "__riscv_vse32_v_f32m1" => {
                            let vec = self.vector(op.operands[1]);
                            self.vse(self.ptr(op.operands[0]), &vec, self.index(op.operands[2]));
                        }
                        "__riscv_vfmacc_vf_f32m1" => {
                            let vd = self.vector(op.operands[0]);
                            let s = match self.get(op.operands[1]) {
                                Rt::F32(s) => s,
                                other => panic!("expected f32, got {other:?}"),
                            };
                            let vs = self.vector(op.operands[2]);
                            let v = self.vfmacc(vd, s, &vs, self.index(op.operands[3]));
                            self.set(op, v);
                        }
                        other => panic!("unknown callee {other}"),
                    }
                }
                _ => panic!("interpreter does not know {}", op.full_name()),
            }
        }
        None
    }
}

/// Scalar kernel semantics: `C[i + j*ldc] += sum_p Ac[p*mr + i] * Bc[p*nr + j]`,
/// accumulated in `p` order with a separate multiply and add.
pub fn reference_kernel(mr: usize, nr: usize, kc: usize, ac: &[f32], bc: &[f32], c: &mut [f32], ldc: usize) {
    for j in 0..nr {
        for i in 0..mr {
            let mut acc = c[i + j * ldc];
            for p in 0..kc {
                let prod = ac[p * mr + i] * bc[p * nr + j];
                acc += prod;
            }
            c[i + j * ldc] = acc;
        }
    }
}

/// Runs kernel `name` of `module` over the given packed inputs and returns C.
#[allow(clippy::too_many_arguments)]
pub fn run_kernel(
    module: &ModuleIR,
    name: &str,
    vlen_bits: usize,
    kc: usize,
    ac: &[f32],
    bc: &[f32],
    c: &[f32],
    ldc: usize,
) -> Vec<f32> {
    let mut m = Machine::new(module, vlen_bits);
    let a = m.buffer(ac.to_vec());
    let b = m.buffer(bc.to_vec());
    let cc = m.buffer(c.to_vec());
    m.call(name, vec![Rt::Index(kc), a, b, cc, Rt::Index(ldc)]);
    m.buffers.swap_remove(2)
}

/// A C compiler from `$CC`, else `cc`, if one runs.
pub fn c_compiler() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".to_string());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

pub fn shim_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("c")
}

pub const STRICT_FLAGS: &[&str] = &[
    "-std=c11",
    "-O2",
    "-Wall",
    "-Wextra",
    "-Wpedantic",
    "-Wshadow",
    "-Wunused",
    "-Werror",
    "-ffp-contract=off",
    "-DRVV_EMULATE",
];

/// Compiles `source` to an object file with the strict flag set; returns
/// compiler stderr on failure.
pub fn compile_strict(cc: &str, dir: &Path, file: &str, source: &str, vlen_bits: usize) -> Result<(), String> {
    let path = dir.join(file);
    std::fs::write(&path, source).unwrap();
    let out = Command::new(cc)
        .args(STRICT_FLAGS)
        .arg(format!("-DVLEN_BITS={vlen_bits}"))
        .arg("-I")
        .arg(shim_dir())
        .arg("-c")
        .arg(&path)
        .arg("-o")
        .arg(path.with_extension("o"))
        .output()
        .unwrap();
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}
