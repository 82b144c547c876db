use criterion::{criterion_group, criterion_main, Criterion};
use largecolor::closedform::{lovejoy_osburn_fk, DoubleTwistSpec};
use largecolor::jones::colored_jones;
use largecolor::knots::{M_FIVE_2, TEN_139};
use largecolor::statesum::{fk_positive, fk_stratified, Module, StratifiedOptions};
use std::hint::black_box;

fn positive(c: &mut Criterion) {
    let b = TEN_139.braid().unwrap();
    c.bench_function("fk_positive 10_139 x^9", |bench| bench.iter(|| fk_positive(black_box(&b), 9).unwrap()));
}

fn stratified(c: &mut Criterion) {
    let b = M_FIVE_2.braid().unwrap();
    let opts = StratifiedOptions { x_order: 3, q_order: 20, max_strata: 80, ..Default::default() };
    let mut g = c.benchmark_group("stratified");
    g.sample_size(10);
    g.bench_function("m(5_2) lw x^3 q^20", |bench| {
        bench.iter(|| fk_stratified(black_box(&b), Module::Lw, &opts).unwrap())
    });
    g.finish();
}

fn closed_form(c: &mut Criterion) {
    c.bench_function("lovejoy_osburn K(2,1) x^3 q^40", |bench| {
        bench.iter(|| lovejoy_osburn_fk(black_box(DoubleTwistSpec::Full { m: 2, p: 1 }), 3, 40).unwrap())
    });
}

fn jones(c: &mut Criterion) {
    let b = M_FIVE_2.braid().unwrap();
    c.bench_function("colored_jones m(5_2) n=4", |bench| bench.iter(|| colored_jones(black_box(&b), 4, true).unwrap()));
}

criterion_group!(benches, positive, stratified, closed_form, jones);
criterion_main!(benches);
