//! Test-bench generation: blocked GEMM driver, naive oracle, benchmark main,
//! Makefile and run script around an emitted kernel family.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::emit_c::{emit_kernel_set, kernel_set_file_name, EmitOptions};
use crate::error::{ConfigError, GenerateError, PipelineError};
use crate::ir::ModuleIR;
use crate::kernel::{build_family, GemmShape, KernelConfig};
use crate::lowering::run_pipeline;

/// Prebuilt emulation header for host builds.
pub const RVV_SHIM_H: &str = include_str!("../../c/rvv_shim.h");
pub const RVV_COMPAT_H: &str = include_str!("../../c/rvv_compat.h");

const DRIVER_TEMPLATE: &str = include_str!("templates/gemm_driver.c.in");
const NAIVE_REF: &str = include_str!("templates/naive_ref.c");
const MAIN_TEMPLATE: &str = include_str!("templates/bench_main.c.in");
const MAKEFILE_TEMPLATE: &str = include_str!("templates/Makefile.in");
const RUN_HOST: &str = include_str!("templates/run_host.sh");

/// Host defaults for functional testing. They are not tuned for any board.
pub const DEFAULT_MC: usize = 120;
pub const DEFAULT_KC: usize = 256;
pub const DEFAULT_NC: usize = 512;

/// Relative error threshold the bench applies per element.
pub const TOLERANCE: f64 = 1e-4;

pub const CSV_HEADER: &str = "id,m,n,k,mr,nr,gflops,max_rel_err,status";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockingParams {
    pub mc: usize,
    pub kc: usize,
    pub nc: usize,
    pub mr: usize,
    pub nr: usize,
}

impl BlockingParams {
    pub fn new(mc: usize, kc: usize, nc: usize, mr: usize, nr: usize) -> Result<Self, ConfigError> {
        for (name, v) in [("mc", mc), ("kc", kc), ("nc", nc), ("mr", mr), ("nr", nr)] {
            if v == 0 {
                return Err(ConfigError::InvalidBlocking { name });
            }
        }
        Ok(BlockingParams { mc, kc, nc, mr, nr })
    }

    /// Default cache blocking around the register tile of `config`.
    pub fn defaults_for(config: &KernelConfig) -> Self {
        BlockingParams {
            mc: DEFAULT_MC,
            kc: DEFAULT_KC,
            nc: DEFAULT_NC,
            mr: config.mr,
            nr: config.nr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchCase {
    pub id: String,
    pub shape: GemmShape,
    pub repetitions: usize,
    /// Skipped unless the bench runs with `--slow`.
    pub slow: bool,
    /// Fill A, B and C with zeros instead of random data.
    pub zero_fill: bool,
}

impl BenchCase {
    pub fn new(id: impl Into<String>, shape: GemmShape) -> Self {
        BenchCase {
            id: id.into(),
            shape,
            repetitions: 1,
            slow: false,
            zero_fill: false,
        }
    }
}

/// The ten layer shapes S1-S5 (square) and B1-B5 (BERT). S4 and S5 are slow
/// under emulation.
pub fn layer_cases() -> Vec<BenchCase> {
    const ROWS: [(&str, usize, usize, usize); 10] = [
        ("S1", 1000, 1000, 1000),
        ("S2", 2000, 2000, 2000),
        ("S3", 3000, 3000, 3000),
        ("S4", 4000, 4000, 4000),
        ("S5", 5000, 5000, 5000),
        ("B1", 1024, 384, 1024),
        ("B2", 384, 384, 64),
        ("B3", 64, 384, 384),
        ("B4", 4096, 384, 1024),
        ("B5", 1024, 384, 4096),
    ];
    ROWS.iter()
        .map(|&(id, m, n, k)| BenchCase {
            slow: id == "S4" || id == "S5",
            ..BenchCase::new(id, GemmShape { m, n, k })
        })
        .collect()
}

/// One generated output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedFile {
    pub name: String,
    pub contents: String,
    pub executable: bool,
}

impl GeneratedFile {
    fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        GeneratedFile {
            name: name.into(),
            contents: contents.into(),
            executable: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Testbench {
    pub files: Vec<GeneratedFile>,
    pub kernel_count: usize,
}

impl Testbench {
    pub fn file(&self, name: &str) -> Option<&GeneratedFile> {
        self.files.iter().find(|f| f.name == name)
    }
}

fn fill(template: &str, subs: &[(&str, String)]) -> String {
    let mut out = template.to_string();
    for (key, value) in subs {
        out = out.replace(&format!("@{key}@"), value);
    }
    debug_assert!(!out.contains("@MR@") && !out.contains("@NR@"));
    out
}

pub fn generate_driver(params: &BlockingParams) -> String {
    fill(
        DRIVER_TEMPLATE,
        &[
            ("MR", params.mr.to_string()),
            ("NR", params.nr.to_string()),
            ("MC", params.mc.to_string()),
            ("KC", params.kc.to_string()),
            ("NC", params.nc.to_string()),
            ("MR_IDX", (params.mr - 1).to_string()),
            ("NR_IDX", (params.nr - 1).to_string()),
        ],
    )
}

pub fn generate_naive() -> String {
    NAIVE_REF.to_string()
}

fn c_string(id: &str) -> String {
    let mut s = String::from("\"");
    for ch in id.chars() {
        match ch {
            '"' | '\\' => {
                s.push('\\');
                s.push(ch);
            }
            c if c.is_ascii_graphic() || c == ' ' => s.push(c),
            _ => s.push('_'),
        }
    }
    s.push('"');
    s
}

pub fn generate_main(cases: &[BenchCase], params: &BlockingParams) -> String {
    let mut rows = String::new();
    for c in cases {
        let _ = writeln!(
            rows,
            "    {{{}, {}, {}, {}, {}, {}, {}}},",
            c_string(&c.id),
            c.shape.m,
            c.shape.n,
            c.shape.k,
            c.repetitions.max(1),
            c.slow as u8,
            c.zero_fill as u8
        );
    }
    if cases.is_empty() {
        // C forbids empty initializers; case_count keeps this row from running
        rows.push_str("    {\"none\", 0, 0, 0, 1, 0, 0},\n");
    }
    fill(
        MAIN_TEMPLATE,
        &[
            ("MR", params.mr.to_string()),
            ("NR", params.nr.to_string()),
            ("MC", params.mc.to_string()),
            ("KC", params.kc.to_string()),
            ("NC", params.nc.to_string()),
            ("NCASES", cases.len().to_string()),
            ("CASES", rows.trim_end().to_string()),
        ],
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MakefileOptions {
    pub mr: usize,
    pub nr: usize,
    pub vlen_bits: usize,
    pub kernel_file: String,
}

pub fn generate_makefile(options: &MakefileOptions) -> String {
    fill(
        MAKEFILE_TEMPLATE,
        &[
            ("MR", options.mr.to_string()),
            ("NR", options.nr.to_string()),
            ("VLEN", options.vlen_bits.to_string()),
            ("KERNELS", options.kernel_file.clone()),
        ],
    )
}

pub fn generate_run_script() -> String {
    RUN_HOST.to_string()
}

/// Lowers every module of a family, in parallel, preserving order.
pub fn lower_family(
    family: Vec<(KernelConfig, ModuleIR)>,
) -> Result<Vec<(KernelConfig, ModuleIR)>, PipelineError> {
    family
        .into_par_iter()
        .map(|(c, m)| run_pipeline(m).map(|r| (c, r.module)))
        .collect()
}

/// Builds, lowers and emits the family for `config` and wraps it in the full
/// bench file set.
pub fn generate_testbench(
    config: &KernelConfig,
    blocking: &BlockingParams,
    cases: &[BenchCase],
) -> Result<Testbench, GenerateError> {
    config.validate()?;
    if blocking.mr != config.mr || blocking.nr != config.nr {
        return Err(ConfigError::InvalidBlocking { name: "mr/nr" }.into());
    }
    BlockingParams::new(blocking.mc, blocking.kc, blocking.nc, blocking.mr, blocking.nr)?;
    for c in cases {
        GemmShape::new(c.shape.m, c.shape.n, c.shape.k)?;
    }
    let family = lower_family(build_family(config)?)?;
    let kernels = emit_kernel_set(&family, &EmitOptions::default())?;
    let kernel_file = kernel_set_file_name(config);
    let makefile = generate_makefile(&MakefileOptions {
        mr: config.mr,
        nr: config.nr,
        vlen_bits: config.vlen_bits,
        kernel_file: kernel_file.clone(),
    });
    let files = vec![
        GeneratedFile::new(kernel_file, kernels.text),
        GeneratedFile::new("gemm_driver.c", generate_driver(blocking)),
        GeneratedFile::new("naive_ref.c", generate_naive()),
        GeneratedFile::new("bench_main.c", generate_main(cases, blocking)),
        GeneratedFile::new("rvv_compat.h", RVV_COMPAT_H),
        GeneratedFile::new("rvv_shim.h", RVV_SHIM_H),
        GeneratedFile::new("Makefile", makefile),
        GeneratedFile {
            executable: true,
            ..GeneratedFile::new("run_host.sh", generate_run_script())
        },
    ];
    Ok(Testbench {
        files,
        kernel_count: family.len(),
    })
}
