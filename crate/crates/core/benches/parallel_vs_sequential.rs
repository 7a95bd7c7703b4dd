use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use matched::constructions::{interior_grid, interpolation_scan_with, ZParams};
use matched::matching::check_matched_with;
use matched::model::{hamming_metric, make_bac, make_bsc};
use matched::rational::rat;
use matched::solver::{bac_scan_with, find_matched_semimetric_with};
use matched::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn triple_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_matched");
    for n in [4, 6] {
        let w = make_bsc(n, &rat(1, 10)).unwrap();
        let d = hamming_metric(n).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| check_matched_with(&w, &d, exec))
            });
        }
    }
    group.finish();
}

fn solver(c: &mut Criterion) {
    let mut group = c.benchmark_group("find_matched_semimetric");
    group.sample_size(10);
    let w = make_bac(5, &rat(1, 10), &rat(2, 10)).unwrap();
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| find_matched_semimetric_with(&w, exec)));
    }
    group.finish();
}

fn scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("scans");
    group.sample_size(10);
    let grid: Vec<_> = (1..5).map(|k| (rat(k, 20), rat(k + 4, 20))).collect();
    let samples = vec![(rat(1, 10), rat(2, 10)), (rat(1, 10), rat(4, 10))];
    let params = ZParams::default();
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new("bac_scan", name), |b| {
            b.iter(|| bac_scan_with(3, &grid, exec))
        });
        group.bench_function(BenchmarkId::new("interpolation", name), |b| {
            b.iter(|| interpolation_scan_with(3, &interior_grid(10), &params, &samples, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, triple_scan, solver, scans);
criterion_main!(benches);
