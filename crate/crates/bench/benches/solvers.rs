use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use mvmdp_bench::{random_instance, workloads};
use mvmdp_core::frequency::FrequencyPolytope;
use mvmdp_core::games::zero_variance_values;
use mvmdp_core::geometry::{MomentPolygon, Point};
use mvmdp_core::rational::{int, rat};
use mvmdp_core::setdp::compute_pmq;
use mvmdp_core::tradeoff::approximate_v_star;

fn set_valued_dp(c: &mut Criterion) {
    let mut g = c.benchmark_group("compute_pmq");
    g.sample_size(10);
    for (name, mdp) in workloads() {
        g.bench_with_input(BenchmarkId::new("exact", &name), &mdp, |b, m| {
            b.iter(|| compute_pmq(black_box(m), None).unwrap())
        });
        let eps = rat(1, 4);
        g.bench_with_input(BenchmarkId::new("pruned", &name), &mdp, |b, m| {
            b.iter(|| compute_pmq(black_box(m), Some(&eps)).unwrap())
        });
    }
    g.finish();
}

fn tradeoff_grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("approximate_v_star");
    g.sample_size(10);
    let mdp = random_instance(20_003, 2, 3);
    for eps in [int(4), int(2), int(1)] {
        g.bench_with_input(BenchmarkId::from_parameter(&eps), &eps, |b, e| {
            b.iter(|| approximate_v_star(&mdp, e, e).unwrap())
        });
    }
    g.finish();
}

fn lp_queries(c: &mut Criterion) {
    let mut g = c.benchmark_group("frequency_lp");
    g.sample_size(10);
    let mdp = random_instance(20_004, 3, 4);
    g.bench_function("exact_pair_cold", |b| {
        b.iter(|| {
            let mut poly = FrequencyPolytope::new(&mdp).unwrap();
            poly.exact_pair_feasible(&rat(1, 2), &int(1)).feasible
        })
    });
    let mut poly = FrequencyPolytope::new(&mdp).unwrap();
    g.bench_function("interval_min_warm", |b| {
        let mut k = 0i64;
        b.iter(|| {
            k = (k + 1) % 8;
            let lo = rat(k - 4, 2);
            poly.min_q_over_interval(&lo, &(&lo + rat(1, 2))).qhat
        })
    });
    g.finish();
}

fn geometry(c: &mut Criterion) {
    let ring = |n: i64, shift: i64| {
        MomentPolygon::hull((0..n).map(|i| {
            let x = rat(i - n / 2 + shift, 1);
            Point::new(x.clone(), &x * &x + int(shift))
        }))
    };
    let (a, b) = (ring(64, 0), ring(64, 3));
    c.bench_function("minkowski_64x64", |bn| bn.iter(|| black_box(&a).minkowski(black_box(&b))));
    let sum = a.minkowski(&b);
    c.bench_function("prune_128", |bn| bn.iter(|| black_box(&sum).prune(&rat(1, 2))));
}

fn reachability_game(c: &mut Criterion) {
    let mut g = c.benchmark_group("zero_variance_values");
    g.sample_size(10);
    for (name, mdp) in workloads() {
        g.bench_with_input(BenchmarkId::from_parameter(&name), &mdp, |b, m| {
            b.iter(|| zero_variance_values(black_box(m)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, set_valued_dp, tradeoff_grid, lp_queries, geometry, reachability_game);
criterion_main!(benches);
