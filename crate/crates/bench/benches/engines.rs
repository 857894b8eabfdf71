use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use geoblock::blocker::{blocking_threshold, recursion_harness, SolverCaps};
use geoblock::flatspace::{count, rat};
use geoblock::growth::{transform, FnGrowth, TransformParams};
use geoblock::hyperbolic::{orbit_ball, word_ball, OrbitBudget};
use geoblock::{FlatSpace, FuchsianPreset};
use geoblock_bench::{billiard_pair, hyperbolic_pair, torus_pair};

fn flat_counting(c: &mut Criterion) {
    let torus = FlatSpace::unit_torus();
    let billiard = FlatSpace::square_billiard();
    let (x, y) = torus_pair();
    let (bx, by) = billiard_pair();
    let mut group = c.benchmark_group("count");
    for t in [5i128, 20, 50] {
        group.bench_with_input(BenchmarkId::new("unit-torus", t), &t, |b, &t| {
            b.iter(|| count(&torus, &x, &y, rat(t * t, 1)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("square-billiard", t), &t, |b, &t| {
            b.iter(|| count(&billiard, &bx, &by, rat(t * t, 1)).unwrap())
        });
    }
    group.finish();
}

fn blocking(c: &mut Criterion) {
    let torus = FlatSpace::unit_torus();
    let (x, y) = torus_pair();
    let caps = SolverCaps::default();
    let mut group = c.benchmark_group("blocking");
    group.sample_size(10);
    for t in [2i128, 4] {
        group.bench_with_input(BenchmarkId::new("threshold", t), &t, |b, &t| {
            b.iter(|| blocking_threshold(&torus, &x, &y, rat(t * t, 1), &caps).unwrap())
        });
    }
    group.bench_function("recursion t=3", |b| b.iter(|| recursion_harness(&torus, &x, &y, rat(9, 1), &caps).unwrap()));
    group.finish();
}

fn growth(c: &mut Criterion) {
    let params = TransformParams::new(1.0).unwrap();
    let f = FnGrowth(|t: f64| t * t + 1.0);
    c.bench_function("transform t=1e6", |b| b.iter(|| transform(&f, params, 1e6, None).unwrap()));
}

fn hyperbolic(c: &mut Criterion) {
    let budget = OrbitBudget::default();
    let octagon = FuchsianPreset::genus2_octagon();
    let (x, y) = hyperbolic_pair(&octagon);
    let schottky = FuchsianPreset::schottky();
    let mut group = c.benchmark_group("orbit");
    group.sample_size(10);
    for r in [4.0, 6.0] {
        group.bench_with_input(BenchmarkId::new("octagon-ball", r), &r, |b, &r| {
            b.iter(|| orbit_ball(&octagon, x, y, r, &budget).unwrap())
        });
    }
    group.bench_function("schottky-words-8", |b| b.iter(|| word_ball(&schottky, 8, &budget).unwrap()));
    group.finish();
}

criterion_group!(benches, flat_counting, blocking, growth, hyperbolic);
criterion_main!(benches);
