use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use fhr_core::analytic::open_survival_table;
use fhr_core::multi_armed::{g_curve, peak_armed_count};
use fhr_core::oracle::{simulate_open, Strategy, TrialConfig};
use fhr_core::policy::optimal_deviation;
use fhr_core::{HorizonRule, OpenScenario};

fn analytic_tables(c: &mut Criterion) {
    let s = OpenScenario::new(4000, 15, 25, 60).unwrap();
    c.bench_function("open_table_100_minutes", |b| {
        b.iter(|| {
            black_box(open_survival_table(
                black_box(&s),
                0.3,
                0.1,
                HorizonRule::ProductExtended,
            ))
        })
    });
    let table = open_survival_table(&s, 0.3, 0.1, HorizonRule::ArrivalCapped);
    c.bench_function("optimal_deviation_60_minutes", |b| {
        b.iter(|| black_box(optimal_deviation(black_box(&table))))
    });
}

fn oracle_throughput(c: &mut Criterion) {
    let s = OpenScenario::new(210, 15, 25, 4).unwrap();
    c.bench_function("simulate_open_10k_trials", |b| {
        b.iter(|| {
            let cfg = TrialConfig::new(10_000, 42);
            black_box(simulate_open(black_box(&s), 0.3, 0.1, Strategy::HideThroughout, &cfg))
        })
    });
}

fn joint_fight_scans(c: &mut Criterion) {
    c.bench_function("g_curve_pool_200", |b| {
        b.iter(|| black_box(g_curve(0.45, 0.2, black_box(200))))
    });
    c.bench_function("peak_armed_count_pool_200", |b| {
        b.iter(|| black_box(peak_armed_count(0.45, 0.2, black_box(200))))
    });
}

criterion_group!(benches, analytic_tables, oracle_throughput, joint_fight_scans);
criterion_main!(benches);
