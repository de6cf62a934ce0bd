use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use ukgen_bench::{configs, label};
use ukgen_core::harness::{generate_testbench, BenchCase, BlockingParams};
use ukgen_core::{build_family, build_microkernel, emit_c, run_pipeline, EmitOptions, GemmShape};

fn build(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for cfg in configs() {
        g.bench_with_input(BenchmarkId::from_parameter(label(&cfg)), &cfg, |b, cfg| {
            b.iter(|| build_microkernel(cfg).unwrap())
        });
    }
    g.finish();
}

fn lower(c: &mut Criterion) {
    let mut g = c.benchmark_group("lower");
    for cfg in configs() {
        let module = build_microkernel(&cfg).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(label(&cfg)), &module, |b, m| {
            b.iter_batched(|| m.clone(), |m| run_pipeline(m).unwrap(), BatchSize::SmallInput)
        });
    }
    g.finish();
}

fn emit(c: &mut Criterion) {
    let mut g = c.benchmark_group("emit");
    let opts = EmitOptions::default();
    for cfg in configs() {
        let lowered = run_pipeline(build_microkernel(&cfg).unwrap()).unwrap().module;
        g.bench_with_input(BenchmarkId::from_parameter(label(&cfg)), &lowered, |b, m| {
            b.iter(|| emit_c(m, &opts).unwrap())
        });
    }
    g.finish();
}

fn family(c: &mut Criterion) {
    let mut g = c.benchmark_group("family");
    g.sample_size(10);
    for cfg in configs() {
        g.bench_with_input(BenchmarkId::new("build", label(&cfg)), &cfg, |b, cfg| {
            b.iter(|| build_family(cfg).unwrap())
        });
        let blocking = BlockingParams::defaults_for(&cfg);
        let cases = [BenchCase::new("s", GemmShape::new(64, 64, 64).unwrap())];
        g.bench_with_input(BenchmarkId::new("testbench", label(&cfg)), &cfg, |b, cfg| {
            b.iter(|| generate_testbench(cfg, &blocking, &cases).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, build, lower, emit, family);
criterion_main!(benches);
