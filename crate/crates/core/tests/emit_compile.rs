//! Emitted C must compile warning-free against the emulation header.

mod common;

use common::{c_compiler, compile_strict};
use ukgen_core::emit_c::{emit_c, emit_kernel_set, EmitOptions};
use ukgen_core::harness::lower_family;
use ukgen_core::{build_family, build_microkernel, run_pipeline, KernelConfig};

fn compiler() -> Option<String> {
    let cc = c_compiler();
    if cc.is_none() {
        eprintln!("no C compiler found; skipping");
    }
    cc
}

#[test]
fn single_kernels_compile_strict() {
    let Some(cc) = compiler() else { return };
    let dir = tempfile::tempdir().unwrap();
    for (mr, nr, vlen) in [(8, 4, 256), (1, 1, 128), (20, 6, 128), (16, 15, 256), (3, 1, 512)] {
        let m = build_microkernel(&KernelConfig::new(mr, nr, vlen).unwrap()).unwrap();
        let text = emit_c(&run_pipeline(m).unwrap().module, &EmitOptions::default()).unwrap().text;
        let file = format!("k_{mr}x{nr}_{vlen}.c");
        if let Err(e) = compile_strict(&cc, dir.path(), &file, &text, vlen) {
            panic!("{file} failed to compile:\n{e}\n{text}");
        }
    }
}

#[test]
fn family_20x6_compiles_strict() {
    let Some(cc) = compiler() else { return };
    let dir = tempfile::tempdir().unwrap();
    let config = KernelConfig::new(20, 6, 128).unwrap();
    let family = lower_family(build_family(&config).unwrap()).unwrap();
    let unit = emit_kernel_set(&family, &EmitOptions::default()).unwrap();
    assert_eq!(unit.functions.len(), 120);
    compile_strict(&cc, dir.path(), "ukernels_20x6_vlen128.c", &unit.text, 128).unwrap();
}
