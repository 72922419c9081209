use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use zclass_core::grpcore::{conjugacy_classes, instantiate};
use zclass_core::{make_field, run_experiment, z_partition, FamilySpec, Params};

fn field_arithmetic(c: &mut Criterion) {
    let k = make_field(2, 8).unwrap();
    let units: Vec<_> = k.units().collect();
    c.bench_function("ff/mul_all_units_f256", |b| {
        b.iter(|| units.iter().fold(k.one(), |acc, &x| k.mul(acc, black_box(x))))
    });
    c.bench_function("ff/make_field_3^6", |b| b.iter(|| make_field(3, black_box(6)).unwrap()));
}

fn groups(c: &mut Criterion) {
    let k = make_field(5, 1).unwrap();
    c.bench_function("grpcore/instantiate_gl2_f5", |b| b.iter(|| instantiate(FamilySpec::gl(2), &k).unwrap()));
    let g = instantiate(FamilySpec::gl(2), &k).unwrap();
    c.bench_function("grpcore/conjugacy_classes_gl2_f5", |b| b.iter(|| conjugacy_classes(black_box(&g))));
    c.bench_function("zclass/z_partition_gl2_f5", |b| b.iter(|| z_partition(black_box(&g), None)));
    let k = make_field(2, 2).unwrap();
    let g = instantiate(FamilySpec::sl(3).with_override(), &k).unwrap();
    c.bench_function("zclass/z_partition_sl3_f4", |b| b.iter(|| z_partition(black_box(&g), None)));
}

fn experiments(c: &mut Criterion) {
    let mut group = c.benchmark_group("paperlab");
    group.sample_size(10);
    group.bench_function("E2", |b| b.iter(|| run_experiment("E2", &Params::default()).unwrap()));
    group.finish();
}

criterion_group!(benches, field_arithmetic, groups, experiments);
criterion_main!(benches);
