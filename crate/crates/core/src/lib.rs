//! GEMM micro-kernel generator for RISC-V Vector.
//!
//! Builds an SSA module for an `mr × nr` f32 kernel, lowers it through
//! memref → arith → scf → rvv into `func` + `emitc`, and prints C that calls
//! the RVV intrinsics. The [`harness`] module writes a blocked GEMM driver
//! and benchmark around a family of such kernels.

pub mod dialects;
pub mod emit_c;
pub mod error;
pub mod ir;
pub mod kernel;
pub mod harness;
pub mod lowering;

pub use error::{ConfigError, EmitError, GenerateError, PatternError, PipelineError};
pub use ir::{print_ir, verify, Diagnostic, ModuleIR, PassResult, TypeKind};
pub use kernel::{build_family, build_microkernel, plan_registers, DType, GemmShape, KernelConfig, RegisterPlan};
pub use lowering::{run_pipeline, Stage};
pub use emit_c::{emit_c, emit_kernel_set, CSourceUnit, EmitOptions};
pub use harness::{generate_testbench, layer_cases, BenchCase, BlockingParams, Testbench};
