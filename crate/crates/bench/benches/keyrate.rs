use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use phaseref_bench::{all_scenarios, canonical};
use phaseref_core::analysis::zero_key_distance;
use phaseref_core::{holevo_bound, sweep, AttackSpec, Scenario};

fn holevo(c: &mut Criterion) {
    c.bench_function("holevo_bound", |b| {
        b.iter(|| {
            holevo_bound(
                black_box(4.0),
                black_box(0.2512),
                black_box(3.011),
                black_box(3.4136),
            )
        })
    });
}

fn sweeps(c: &mut Criterion) {
    let params = canonical();
    let scenarios = all_scenarios();
    c.bench_function("sweep 0-80 km, 5 scenarios", |b| {
        b.iter(|| sweep(&params, black_box(&scenarios), 0.0, 80.0, 1.0).unwrap())
    });
}

fn zero_key(c: &mut Criterion) {
    let params = canonical();
    let pia = Scenario::attack(AttackSpec::pia(2.0, 1.0));
    c.bench_function("zero_key_distance pia g=2", |b| {
        b.iter(|| zero_key_distance(&params, black_box(&pia)).unwrap())
    });
}

criterion_group!(benches, holevo, sweeps, zero_key);
criterion_main!(benches);
