//! `ukgen`: generate RVV GEMM micro-kernels and their test bench.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ukgen_core::emit_c::{emit_c, kernel_file_name, EmitOptions};
use ukgen_core::harness::{generate_testbench, layer_cases, BenchCase, BlockingParams, GeneratedFile};
use ukgen_core::lowering::{lower_to, Stage};
use ukgen_core::{build_microkernel, print_ir, run_pipeline, ConfigError, DType, GemmShape, KernelConfig};

#[derive(Parser, Debug)]
#[command(
    name = "ukgen",
    version = concat!(env!("CARGO_PKG_VERSION"), " (ir format 1)"),
    about = "GEMM micro-kernel generator for the RISC-V Vector extension"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the IR of one kernel after a pipeline stage.
    Ir {
        #[command(flatten)]
        kernel: KernelArgs,
        /// built, memref, arith, scf or rvv.
        #[arg(long, default_value = "rvv")]
        stage: Stage,
    },
    /// Emit one kernel as a C file.
    Emit {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Emit the kernel family plus driver, oracle, bench and Makefile.
    Testbench {
        #[command(flatten)]
        kernel: KernelArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = ukgen_core::harness::DEFAULT_MC)]
        mc: usize,
        #[arg(long, default_value_t = ukgen_core::harness::DEFAULT_KC)]
        kc: usize,
        #[arg(long, default_value_t = ukgen_core::harness::DEFAULT_NC)]
        nc: usize,
        /// Comma-separated MxNxK shapes; defaults to the ten reference layer shapes.
        #[arg(long, value_delimiter = ',')]
        cases: Vec<GemmShape>,
        /// Timed repetitions per case.
        #[arg(long, default_value_t = 1)]
        reps: usize,
    },
}

#[derive(Args, Debug)]
struct KernelArgs {
    #[arg(long, default_value_t = 8)]
    mr: usize,
    #[arg(long, default_value_t = 4)]
    nr: usize,
    /// Vector register width in bits: 128, 256 or 512.
    #[arg(long, default_value_t = 256)]
    vlen: usize,
    #[arg(long, default_value = "f32")]
    dtype: DType,
}

impl KernelArgs {
    fn config(&self) -> Result<KernelConfig, ConfigError> {
        let config = KernelConfig {
            mr: self.mr,
            nr: self.nr,
            dtype: self.dtype,
            vlen_bits: self.vlen,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Failures split by exit code.
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Run(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Ir { kernel, stage } => {
            let config = kernel.config().map_err(|e| Failure::Usage(e.into()))?;
            let module = build_microkernel(&config).map_err(|e| Failure::Usage(e.into()))?;
            let result = lower_to(module, stage).context("lowering failed")?;
            let mut stdout = std::io::stdout().lock();
            write!(stdout, "{}", print_ir(&result.module)).context("writing IR")?;
        }
        Command::Emit { kernel, out } => {
            let config = kernel.config().map_err(|e| Failure::Usage(e.into()))?;
            let module = build_microkernel(&config).map_err(|e| Failure::Usage(e.into()))?;
            let lowered = run_pipeline(module).context("lowering failed")?;
            let unit = emit_c(&lowered.module, &EmitOptions::default()).context("emitting C")?;
            let path = out.join(kernel_file_name(&config));
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write_atomic(&path, &unit.text, false)?;
            println!("{}", path.display());
        }
        Command::Testbench { kernel, out, mc, kc, nc, cases, reps } => {
            let config = kernel.config().map_err(|e| Failure::Usage(e.into()))?;
            let blocking = BlockingParams::new(mc, kc, nc, config.mr, config.nr)
                .map_err(|e| Failure::Usage(e.into()))?;
            if reps == 0 {
                return Err(Failure::Usage(anyhow::anyhow!("--reps must be at least 1")));
            }
            let mut cases: Vec<BenchCase> = if cases.is_empty() {
                layer_cases()
            } else {
                cases.iter().map(|s| BenchCase::new(s.to_string(), *s)).collect()
            };
            for c in &mut cases {
                c.repetitions = reps;
            }
            let tb = generate_testbench(&config, &blocking, &cases).context("generating test bench")?;
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for f in &tb.files {
                write_file(&out, f)?;
            }
            println!(
                "{} kernels ({}x{} family, f32, vlen {}), {} bench cases, blocking mc={mc} kc={kc} nc={nc}",
                tb.kernel_count,
                config.mr,
                config.nr,
                config.vlen_bits,
                cases.len()
            );
            for f in &tb.files {
                println!("  {}", out.join(&f.name).display());
            }
        }
    }
    Ok(())
}

fn write_file(dir: &Path, file: &GeneratedFile) -> Result<()> {
    write_atomic(&dir.join(&file.name), &file.contents, file.executable)
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, contents: &str, executable: bool) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let mode = if executable { 0o755 } else { 0o644 };
        std::fs::set_permissions(tmp.path(), std::fs::Permissions::from_mode(mode))?;
    }
    #[cfg(not(unix))]
    let _ = executable;
    tmp.persist(path)
        .with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}
