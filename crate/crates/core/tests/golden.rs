//! Guards the emitted text of the 8x4 VLEN-256 kernel. Set UPDATE_GOLDEN=1 to
//! regenerate after an intended change.

use std::path::Path;

use ukgen_core::emit_c::{emit_c, EmitOptions};
use ukgen_core::{build_microkernel, run_pipeline, KernelConfig};

pub fn emit_8x4() -> String {
    let m = build_microkernel(&KernelConfig::new(8, 4, 256).unwrap()).unwrap();
    emit_c(&run_pipeline(m).unwrap().module, &EmitOptions::default()).unwrap().text
}

#[test]
fn golden_8x4_vlen256() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/ukernel_8x4_f32_vlen256.c");
    let text = emit_8x4();
    assert_eq!(text, emit_8x4(), "emission is not deterministic");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden file present");
    assert_eq!(text, golden);
}
