//! Micro-kernel configuration and IR construction.
//!
//! A kernel computes `C[0..mr, 0..nr] += Ac · Bc` over `kc` steps, where
//! `Ac` holds `kc` slabs of `mr` floats (element `k*mr + i`), `Bc` holds `kc`
//! slabs of `nr` floats (element `k*nr + j`) and `C` is column-major with
//! leading dimension `ldC` (element `i + j*ldC`). Each column of the C tile
//! lives in `ceil(mr / lanes)` vector registers; B is consumed as scalars by
//! the FMA, never loaded into vector registers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::dialects::ops::{arith, func, rvv, scf};
use crate::error::ConfigError;
use crate::ir::{Block, ModuleIR, Operation, TypeKind, Value, ValueTable};

pub const MAX_TILE: usize = 64;
pub const SUPPORTED_VLENS: [usize; 3] = [128, 256, 512];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DType {
    #[default]
    F32,
    F16,
    F64,
}

impl DType {
    pub fn bits(self) -> usize {
        match self {
            DType::F16 => 16,
            DType::F32 => 32,
            DType::F64 => 64,
        }
    }
}

impl fmt::Display for DType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DType::F16 => "f16",
            DType::F32 => "f32",
            DType::F64 => "f64",
        })
    }
}

impl FromStr for DType {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "f32" | "fp32" => Ok(DType::F32),
            "f16" | "fp16" => Ok(DType::F16),
            "f64" | "fp64" => Ok(DType::F64),
            _ => Err(ConfigError::UnsupportedDtype(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KernelConfig {
    pub mr: usize,
    pub nr: usize,
    pub dtype: DType,
    pub vlen_bits: usize,
}

impl Default for KernelConfig {
    /// 8x4 f32 at VLEN 256.
    fn default() -> Self {
        KernelConfig {
            mr: 8,
            nr: 4,
            dtype: DType::F32,
            vlen_bits: 256,
        }
    }
}

impl KernelConfig {
    /// An f32 configuration, validated.
    pub fn new(mr: usize, nr: usize, vlen_bits: usize) -> Result<Self, ConfigError> {
        let config = KernelConfig {
            mr,
            nr,
            dtype: DType::F32,
            vlen_bits,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=MAX_TILE).contains(&self.mr) {
            return Err(ConfigError::TileOutOfRange { name: "mr", value: self.mr });
        }
        if !(1..=MAX_TILE).contains(&self.nr) {
            return Err(ConfigError::TileOutOfRange { name: "nr", value: self.nr });
        }
        if !SUPPORTED_VLENS.contains(&self.vlen_bits) {
            return Err(ConfigError::InvalidVlen(self.vlen_bits));
        }
        if self.dtype != DType::F32 {
            return Err(ConfigError::UnsupportedDtype(self.dtype.to_string()));
        }
        Ok(())
    }

    /// Same dtype and vector length, different tile.
    pub fn with_tile(&self, mr: usize, nr: usize) -> Self {
        KernelConfig { mr, nr, ..*self }
    }

    pub fn kernel_name(&self) -> String {
        kernel_name(self.mr, self.nr)
    }
}

/// Stable symbol name of the `mr × nr` f32 kernel.
pub fn kernel_name(mr: usize, nr: usize) -> String {
    format!("ukernel_{mr}x{nr}_f32")
}

/// Register layout derived from a [`KernelConfig`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterPlan {
    pub elems_per_vreg: usize,
    pub num_a_regs: usize,
    /// Active lanes of each A register; sums to `mr`.
    pub vl: Vec<usize>,
    pub num_acc_regs: usize,
    pub fmas_per_iter: usize,
}

pub fn plan_registers(config: &KernelConfig) -> Result<RegisterPlan, ConfigError> {
    config.validate()?;
    let elems = config.vlen_bits / config.dtype.bits();
    let num_a_regs = config.mr.div_ceil(elems);
    let vl = (0..num_a_regs)
        .map(|p| elems.min(config.mr - p * elems))
        .collect();
    Ok(RegisterPlan {
        elems_per_vreg: elems,
        num_a_regs,
        vl,
        num_acc_regs: config.nr * num_a_regs,
        fmas_per_iter: config.nr * num_a_regs,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GemmShape {
    pub m: usize,
    pub n: usize,
    pub k: usize,
}

impl GemmShape {
    pub fn new(m: usize, n: usize, k: usize) -> Result<Self, ConfigError> {
        for (name, v) in [("m", m), ("n", n), ("k", k)] {
            if v == 0 {
                return Err(ConfigError::InvalidShape { name });
            }
        }
        Ok(GemmShape { m, n, k })
    }

    pub fn flops(&self) -> f64 {
        2.0 * self.m as f64 * self.n as f64 * self.k as f64
    }
}

impl std::str::FromStr for GemmShape {
    type Err = ConfigError;

    /// Parses `MxNxK`, e.g. `1024x384x64`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dims: Vec<usize> = s
            .split('x')
            .map(|d| d.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| ConfigError::ShapeSyntax(s.to_string()))?;
        match dims.as_slice() {
            &[m, n, k] => GemmShape::new(m, n, k),
            _ => Err(ConfigError::ShapeSyntax(s.to_string())),
        }
    }
}

impl fmt::Display for GemmShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.m, self.n, self.k)
    }
}

/// Builds the verified `{func, arith, scf, rvv}` module for one kernel.
pub fn build_microkernel(config: &KernelConfig) -> Result<ModuleIR, ConfigError> {
    let plan = plan_registers(config)?;
    let mut module = ModuleIR::new();
    let func = KernelBuilder::new(&mut module.values, config, &plan).build();
    module.functions.push(func);
    Ok(module)
}

/// Every kernel from `1×1` up to `mr×nr`, mr-major.
pub fn build_family(config: &KernelConfig) -> Result<Vec<(KernelConfig, ModuleIR)>, ConfigError> {
    config.validate()?;
    let mut family = Vec::with_capacity(config.mr * config.nr);
    for mr in 1..=config.mr {
        for nr in 1..=config.nr {
            let c = config.with_tile(mr, nr);
            family.push((c, build_microkernel(&c)?));
        }
    }
    Ok(family)
}

/// Appends `op` to `ops` and returns its single result.
fn push(ops: &mut Vec<Operation>, op: Operation) -> Value {
    let v = op.results.first().copied();
    ops.push(op);
    v.expect("op has a result")
}

struct KernelBuilder<'a> {
    values: &'a mut ValueTable,
    config: &'a KernelConfig,
    plan: &'a RegisterPlan,
    /// Function-scope ops; index constants are always placed here.
    entry: Vec<Operation>,
    consts: BTreeMap<usize, Value>,
}

impl<'a> KernelBuilder<'a> {
    fn new(values: &'a mut ValueTable, config: &'a KernelConfig, plan: &'a RegisterPlan) -> Self {
        KernelBuilder {
            values,
            config,
            plan,
            entry: Vec::new(),
            consts: BTreeMap::new(),
        }
    }

    fn index(&mut self, v: usize) -> Value {
        if let Some(c) = self.consts.get(&v) {
            return *c;
        }
        let op = arith::constant_index(self.values, v as i64);
        let c = op.result();
        self.entry.push(op);
        self.consts.insert(v, c);
        c
    }

    fn build(mut self) -> Operation {
        let (mr, nr) = (self.config.mr, self.config.nr);
        let elems = self.plan.elems_per_vreg;
        let num_a = self.plan.num_a_regs;

        let kc = self.values.block_arg(TypeKind::Index, 0);
        let a_panel = self.values.block_arg(TypeKind::MemRefF32Dyn, 1);
        let b_panel = self.values.block_arg(TypeKind::MemRefF32Dyn, 2);
        let c_tile = self.values.block_arg(TypeKind::MemRefF32Dyn, 3);
        let ldc = self.values.block_arg(TypeKind::Index, 4);

        // Prologue: C tile into accumulators, j-major, p-minor.
        let mut c_offsets = Vec::with_capacity(nr * num_a);
        let mut inits = Vec::with_capacity(nr * num_a);
        for j in 0..nr {
            for p in 0..num_a {
                let off = if j == 0 {
                    self.index(p * elems)
                } else {
                    let cj = self.index(j);
                    let mul = arith::muli(self.values, cj, ldc);
                    let col = mul.result();
                    self.entry.push(mul);
                    if p == 0 {
                        col
                    } else {
                        let row = self.index(p * elems);
                        let add = arith::addi(self.values, row, col);
                        let off = add.result();
                        self.entry.push(add);
                        off
                    }
                };
                let vl = self.index(self.plan.vl[p]);
                let load = rvv::vle32(self.values, c_tile, off, vl);
                inits.push(load.result());
                self.entry.push(load);
                c_offsets.push(off);
            }
        }

        // Loop L6 over kc.
        let lb = self.index(0);
        let step = self.index(1);
        let iv = self.values.block_arg(TypeKind::Index, 0);
        let accs: Vec<Value> = (0..inits.len())
            .map(|i| self.values.block_arg(TypeKind::RvvVecF32M1, i + 1))
            .collect();
        let mut body = Vec::new();

        let c_mr = self.index(mr);
        let k_mr = push(&mut body, arith::muli(self.values, iv, c_mr));
        let mut a_regs = Vec::with_capacity(num_a);
        for p in 0..num_a {
            let off = if p == 0 {
                k_mr
            } else {
                let row = self.index(p * elems);
                push(&mut body, arith::addi(self.values, k_mr, row))
            };
            let vl = self.index(self.plan.vl[p]);
            let a = push(&mut body, rvv::vle32(self.values, a_panel, off, vl));
            a_regs.push(a);
        }

        let c_nr = self.index(nr);
        let k_nr = push(&mut body, arith::muli(self.values, iv, c_nr));
        let mut updated = Vec::with_capacity(accs.len());
        for j in 0..nr {
            let b_off = if j == 0 {
                k_nr
            } else {
                let cj = self.index(j);
                push(&mut body, arith::addi(self.values, k_nr, cj))
            };
            for (p, a) in a_regs.iter().enumerate() {
                let vl = self.index(self.plan.vl[p]);
                let acc = accs[j * num_a + p];
                let fma = rvv::vfmacc(self.values, acc, b_panel, b_off, *a, vl);
                updated.push(push(&mut body, fma));
            }
        }
        body.push(scf::yield_(self.values, &updated));

        let mut args = vec![iv];
        args.extend(&accs);
        let for_op = scf::for_(self.values, lb, kc, step, &inits, Block::new(args, body));
        let results = for_op.results.clone();
        self.entry.push(for_op);

        // Epilogue: accumulators back to C.
        for (i, r) in results.iter().enumerate() {
            let vl = self.index(self.plan.vl[i % num_a]);
            let store = rvv::vse32(self.values, *r, c_tile, c_offsets[i], vl);
            self.entry.push(store);
        }
        self.entry.push(func::ret(self.values));

        let body = Block::new(vec![kc, a_panel, b_panel, c_tile, ldc], self.entry);
        let mut f = func::func(self.values, &kernel_name(mr, nr), body);
        f.attributes.insert(
            "readonly_args".to_string(),
            crate::ir::Attribute::Str("1,2".to_string()),
        );
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dialects::{RVV_VFMACC, RVV_VLE32, RVV_VSE32};
    use crate::ir::verify;

    fn cfg(mr: usize, nr: usize, vlen: usize) -> KernelConfig {
        KernelConfig::new(mr, nr, vlen).unwrap()
    }

    #[test]
    fn shape_parse() {
        assert_eq!("37x29x53".parse::<GemmShape>().unwrap(), GemmShape { m: 37, n: 29, k: 53 });
        assert_eq!("0x1x1".parse::<GemmShape>(), Err(ConfigError::InvalidShape { name: "m" }));
        assert!(matches!("4x4".parse::<GemmShape>(), Err(ConfigError::ShapeSyntax(_))));
        assert!(matches!("axbxc".parse::<GemmShape>(), Err(ConfigError::ShapeSyntax(_))));
        assert_eq!(GemmShape::new(1, 2, 3).unwrap().to_string(), "1x2x3");
        assert_eq!(GemmShape::new(1000, 1000, 1000).unwrap().flops(), 2.0e9);
    }

    #[test]
    fn plan_8x4_vlen256() {
        let p = plan_registers(&cfg(8, 4, 256)).unwrap();
        assert_eq!(
            p,
            RegisterPlan {
                elems_per_vreg: 8,
                num_a_regs: 1,
                vl: vec![8],
                num_acc_regs: 4,
                fmas_per_iter: 4
            }
        );
    }

    #[test]
    fn plan_1x1_vlen128() {
        let p = plan_registers(&cfg(1, 1, 128)).unwrap();
        assert_eq!(p.elems_per_vreg, 4);
        assert_eq!(p.num_a_regs, 1);
        assert_eq!(p.vl, vec![1]);
        assert_eq!(p.fmas_per_iter, 1);
    }

    #[test]
    fn plan_20x6_vlen128() {
        // 20 rows over 4-lane registers: five full registers, 6 columns each.
        let p = plan_registers(&cfg(20, 6, 128)).unwrap();
        assert_eq!(p.elems_per_vreg, 4);
        assert_eq!(p.num_a_regs, 5);
        assert_eq!(p.vl, vec![4, 4, 4, 4, 4]);
        assert_eq!(p.num_acc_regs, 30);
        assert_eq!(p.fmas_per_iter, 30);
    }

    #[test]
    fn plan_partial_tail_register() {
        let p = plan_registers(&cfg(10, 1, 128)).unwrap();
        assert_eq!(p.vl, vec![4, 4, 2]);
    }

    #[test]
    fn non_f32_dtype_is_rejected() {
        let mut c = cfg(8, 4, 256);
        c.dtype = DType::F16;
        assert_eq!(
            plan_registers(&c),
            Err(ConfigError::UnsupportedDtype("f16".into()))
        );
        assert!(build_microkernel(&c).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(KernelConfig::new(0, 4, 256).is_err());
        assert!(KernelConfig::new(65, 4, 256).is_err());
        assert!(KernelConfig::new(8, 0, 256).is_err());
        assert_eq!(KernelConfig::new(8, 4, 100), Err(ConfigError::InvalidVlen(100)));
        assert!(KernelConfig::new(64, 64, 512).is_ok());
        assert!("fp32".parse::<DType>().is_ok());
        assert!("bf16".parse::<DType>().is_err());
    }

    fn loop_body(m: &ModuleIR) -> &Block {
        let mut found = None;
        m.walk(|op| {
            if op.is("scf", "for") {
                found = Some(op.regions[0].block());
            }
        });
        found.expect("kernel has an scf.for")
    }

    fn count(block: &Block, name: &str) -> usize {
        block.operations.iter().filter(|o| o.is("rvv", name)).count()
    }

    #[test]
    fn kernel_8x4_structure() {
        let m = build_microkernel(&cfg(8, 4, 256)).unwrap();
        assert_eq!(verify(&m), vec![]);
        let body = loop_body(&m);
        assert_eq!(count(body, RVV_VLE32), 1);
        assert_eq!(count(body, RVV_VFMACC), 4);
        assert_eq!(body.arguments.len(), 5);
        assert!(m.function("ukernel_8x4_f32").is_some());
    }

    #[test]
    fn kernel_1x1_structure() {
        let m = build_microkernel(&cfg(1, 1, 128)).unwrap();
        assert_eq!(verify(&m), vec![]);
        let body = loop_body(&m);
        assert_eq!(count(body, RVV_VLE32), 1);
        assert_eq!(count(body, RVV_VFMACC), 1);
        assert_eq!(m.count_ops("rvv", RVV_VLE32), 2);
        assert_eq!(m.count_ops("rvv", RVV_VSE32), 1);
    }

    #[test]
    fn kernel_20x6_structure() {
        let m = build_microkernel(&cfg(20, 6, 128)).unwrap();
        assert_eq!(verify(&m), vec![]);
        let body = loop_body(&m);
        assert_eq!(count(body, RVV_VLE32), 5);
        assert_eq!(count(body, RVV_VFMACC), 30);
        assert_eq!(body.arguments.len(), 31);
    }

    #[test]
    fn family_order_and_size() {
        let fam = build_family(&cfg(8, 4, 256)).unwrap();
        assert_eq!(fam.len(), 32);
        assert_eq!(fam[0].1.functions.len(), 1);
        assert!(fam[0].1.function("ukernel_1x1_f32").is_some());
        assert!(fam[1].1.function("ukernel_1x2_f32").is_some());
        assert!(fam[31].1.function("ukernel_8x4_f32").is_some());
        assert!(fam.iter().all(|(c, _)| c.vlen_bits == 256));
        assert_eq!(build_family(&cfg(1, 1, 128)).unwrap().len(), 1);
    }

    #[test]
    fn family_20x6_verifies() {
        let fam = build_family(&cfg(20, 6, 128)).unwrap();
        assert_eq!(fam.len(), 120);
        for (c, m) in &fam {
            assert_eq!(verify(m), vec![], "{}", c.kernel_name());
        }
    }

    #[test]
    fn b_is_never_loaded_into_a_vector() {
        let m = build_microkernel(&cfg(16, 5, 256)).unwrap();
        let b_panel = m.functions[0].regions[0].block().arguments[2];
        m.walk(|op| {
            if op.is("rvv", RVV_VLE32) {
                assert_ne!(op.operands[0], b_panel);
            }
        });
    }
}
