//! Shared fixtures for the pipeline benchmarks.

use ukgen_core::KernelConfig;

/// Kernel shapes the benches sweep: a small, a default and a wide tile.
pub fn configs() -> Vec<KernelConfig> {
    [(8, 4, 256), (16, 8, 128), (20, 6, 128), (32, 4, 512)]
        .into_iter()
        .map(|(mr, nr, vlen_bits)| KernelConfig { mr, nr, vlen_bits, ..KernelConfig::default() })
        .collect()
}

/// Short label used as a criterion parameter.
pub fn label(c: &KernelConfig) -> String {
    format!("{}x{}/{}", c.mr, c.nr, c.vlen_bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn configs_are_valid() {
        for c in configs() {
            c.validate().unwrap();
        }
        assert_eq!(label(&configs()[0]), "8x4/256");
    }
}
