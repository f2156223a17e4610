use std::hint::black_box;
use std::path::PathBuf;

use affine_mars::oracle::oracle_mars;
use affine_mars::{
    build_mars, combined_footprint, load_program, offset_families, AffineFn, BuildOptions,
    TilingSpec,
};
use criterion::{criterion_group, criterion_main, Criterion};

fn load(name: &str) -> (Vec<AffineFn>, TilingSpec) {
    let path =
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../programs/{name}.json"));
    let p = load_program(&std::fs::read_to_string(path).unwrap()).unwrap();
    let deps = p.deps.clone();
    let tiling = p.tiling_for(&deps[0].source).unwrap().clone();
    (deps, tiling)
}

const PROGRAMS: [&str; 3] = ["single_dep", "jacobi1d", "matmul"];

fn footprint(c: &mut Criterion) {
    let mut g = c.benchmark_group("footprint");
    for name in PROGRAMS {
        let (deps, tiling) = load(name);
        let zero = vec![0; tiling.count()];
        g.bench_function(name, |b| {
            b.iter(|| combined_footprint(black_box(&deps), &tiling, &zero).unwrap())
        });
    }
    g.finish();
}

fn families(c: &mut Criterion) {
    let mut g = c.benchmark_group("offset_families");
    for name in PROGRAMS {
        let (deps, tiling) = load(name);
        g.bench_function(name, |b| {
            b.iter(|| offset_families(black_box(&deps), &tiling).unwrap())
        });
    }
    g.finish();
}

fn partition(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_mars");
    g.sample_size(20);
    for name in PROGRAMS {
        let (deps, tiling) = load(name);
        let opts = BuildOptions::default();
        g.bench_function(name, |b| {
            b.iter(|| build_mars(black_box(&deps), &tiling, &opts).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("oracle_mars");
    g.sample_size(20);
    for name in PROGRAMS {
        let (deps, tiling) = load(name);
        g.bench_function(name, |b| {
            b.iter(|| oracle_mars(black_box(&deps), &tiling, 2, None).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, footprint, families, partition, oracle);
criterion_main!(benches);
