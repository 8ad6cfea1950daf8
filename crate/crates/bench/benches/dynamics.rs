//! Benchmarks for the step rules, product update, the model checker, and
//! orbit detection.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use tam_bench::fixture_model;
use tam_core::action::{canonical_product_threshold, e1, catalog_entry};
use tam_core::belief::{automaton_step, influence_automaton, random_belief_model};
use tam_core::dynamics::{step_eq1, step_eq2};
use tam_core::logic::{extension, parse};
use tam_core::orbit::{detect_orbit, orbit_cap_for};
use tam_core::UpdateRule;

fn bench_direct_steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("direct_step");
    for agents in [10usize, 30, 100] {
        let model = fixture_model(agents);
        group.bench_with_input(BenchmarkId::new("eq1", agents), &model, |b, m| {
            b.iter(|| step_eq1(black_box(m)))
        });
        group.bench_with_input(BenchmarkId::new("eq2", agents), &model, |b, m| {
            b.iter(|| step_eq2(black_box(m)))
        });
    }
    group.finish();
}

fn bench_product_update(c: &mut Criterion) {
    let mut group = c.benchmark_group("canonical_product");
    let entry6 = catalog_entry(6).unwrap();
    let inflating = e1();
    for agents in [10usize, 30, 100] {
        let model = fixture_model(agents);
        group.bench_with_input(BenchmarkId::new("am6", agents), &model, |b, m| {
            b.iter(|| canonical_product_threshold(black_box(m), &entry6).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("e1", agents), &model, |b, m| {
            b.iter(|| canonical_product_threshold(black_box(m), &inflating).unwrap())
        });
    }
    group.finish();
}

fn bench_model_checking(c: &mut Criterion) {
    let model = fixture_model(50);
    let formula = parse("<lt> B & ~[le] ~B | (=) B").unwrap();
    c.bench_function("extension_depth4_50_agents", |b| {
        b.iter(|| extension(black_box(model.general()), black_box(&formula)).unwrap())
    });
    c.bench_function("parse_formula", |b| {
        b.iter(|| parse(black_box("<le> (B & ~(=) B) -> [gt] ~B | <lt> B")).unwrap())
    });
}

fn bench_orbits(c: &mut Criterion) {
    let model = fixture_model(12);
    c.bench_function("detect_orbit_eq2_12_agents", |b| {
        b.iter(|| detect_orbit(black_box(&model), &UpdateRule::Eq2, orbit_cap_for(12)).unwrap())
    });
}

fn bench_belief_step(c: &mut Criterion) {
    let automaton = influence_automaton();
    let model = random_belief_model(0xFEED, 30, 0.3).unwrap();
    c.bench_function("automaton_step_30_agents", |b| {
        b.iter(|| automaton_step(black_box(&model), &automaton).unwrap())
    });
}

criterion_group!(
    benches,
    bench_direct_steps,
    bench_product_update,
    bench_model_checking,
    bench_orbits,
    bench_belief_step
);
criterion_main!(benches);
