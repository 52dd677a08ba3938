use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use parok::grid::{example_3_2, search_towers, SearchParams};
use parok::harness::{check_free_iff_finite, corpus, HarnessOptions};
use parok::par::Exec;
use parok::rokhlin::{rokhlin_dimension, SearchOptions};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn solver(c: &mut Criterion) {
    let instances = corpus(7, 40);
    let mut group = c.benchmark_group("rokhlin_dimension");
    for (name, exec) in MODES {
        let opts = SearchOptions { exec, ..SearchOptions::default() };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                for pa in &instances {
                    rokhlin_dimension(pa, &opts).unwrap();
                }
            })
        });
    }
    group.finish();
}

fn harness(c: &mut Criterion) {
    let mut group = c.benchmark_group("check_free_iff_finite");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = HarnessOptions { exec, search: SearchOptions { exec, ..SearchOptions::default() } };
        group.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| check_free_iff_finite(7, 40, &opts)));
    }
    group.finish();
}

fn grid_search(c: &mut Criterion) {
    let ex = example_3_2(32).unwrap();
    let mut group = c.benchmark_group("search_towers");
    group.sample_size(10);
    for (name, exec) in MODES {
        let params = SearchParams { iterations: 100, exec, ..SearchParams::new(1, 0.01, 3, 8) };
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| search_towers(&ex.grid, &ex.test_set, &params).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, solver, harness, grid_search);
criterion_main!(benches);
