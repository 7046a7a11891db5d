//! Benchmarks for the enumeration-heavy paths.  Group names carry the
//! execution mode, so running `cargo bench` (rayon) and
//! `cargo bench --no-default-features` (sequential) records comparable
//! side-by-side baselines under `target/criterion`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ulm_orbits::exec;
use ulm_orbits::linear::{height_table_by_enumeration, height_table_by_kernels};
use ulm_orbits::oracle;
use ulm_orbits::orbits::enumerate_tuple_orbits;
use ulm_orbits::{ElementTuple, ModuleShape};

const BOUND: u64 = 1 << 20;

fn mid_shape() -> ModuleShape {
    ModuleShape::integer_local(3, &[(1, 1), (2, 1)]).unwrap()
}

fn wide_shape() -> ModuleShape {
    ModuleShape::integer_local(2, &[(1, 1), (2, 1), (3, 1)]).unwrap()
}

fn bench_tuple_orbits(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("tuple-orbits/{}", exec::execution_mode()));
    group.sample_size(20);
    for (label, shape, n) in [
        ("Z3+Z9", mid_shape(), 2),
        ("Z2+Z4+Z8", wide_shape(), 1),
        ("Z2+Z4+Z8", wide_shape(), 2),
    ] {
        group.bench_function(BenchmarkId::new(label, n), |b| {
            b.iter(|| enumerate_tuple_orbits(&shape, n, BOUND).unwrap())
        });
    }
    group.finish();
}

fn bench_oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("oracle/{}", exec::execution_mode()));
    group.sample_size(20);
    group.bench_function("endomorphisms/Z2+Z4+Z8", |b| {
        let shape = wide_shape();
        b.iter(|| oracle::enumerate_endomorphisms(&shape, BOUND).unwrap())
    });
    group.bench_function("orbit-partition/Z3+Z9 n=2", |b| {
        let shape = mid_shape();
        b.iter(|| oracle::orbit_partition(&shape, 2, BOUND).unwrap())
    });
    group.bench_function("degeneration-relation/Z3+Z9 n=2", |b| {
        let shape = mid_shape();
        b.iter(|| oracle::degeneration_relation(&shape, 2, BOUND).unwrap())
    });
    group.finish();
}

fn bench_height_table_routes(c: &mut Criterion) {
    // Same table twice: the exhaustive coefficient walk against the kernel
    // computation.  Route choice, not scheduling, dominates here.
    let mut group = c.benchmark_group(format!("height-table/{}", exec::execution_mode()));
    let shape = mid_shape();
    let ring = shape.ring().clone();
    let elements = shape.enumerate_elements(BOUND).unwrap();
    let tuple = ElementTuple::new(vec![
        elements[5].clone(),
        elements[11].clone(),
        elements[17].clone(),
        elements[23].clone(),
    ])
    .unwrap();
    group.bench_function("enumeration-route n=4", |b| {
        b.iter(|| height_table_by_enumeration(&shape, &tuple, &ring))
    });
    group.bench_function("kernel-route n=4", |b| {
        b.iter(|| height_table_by_kernels(&shape, &tuple, &ring))
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_tuple_orbits,
    bench_oracle,
    bench_height_table_routes
);
criterion_main!(benches);
