// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

use cfcc::generators;
use cfcc::graph::laplacian;
use cfcc::solver::{setup, solve_many, SolverConfig};
use cfcc::Exec;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn supplies(n: usize, count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| {
            let mut b = vec![0.0; n];
            b[(i * 7919) % n] += 1.0;
            b[n - 1 - i] -= 1.0;
            b
        })
        .collect()
}

fn bench_setup(c: &mut Criterion) {
    let mut group = c.benchmark_group("setup");
    group.sample_size(10);
    for side in [100usize, 200] {
        let l = laplacian(&generators::grid(side));
        group.bench_with_input(BenchmarkId::new("grid", side), &l, |b, l| {
            b.iter(|| setup(l, &SolverConfig::default()).unwrap())
        });
    }
    let l = laplacian(&generators::barabasi_albert(20_000, 2, 1));
    group.bench_function("ba/20000", |b| b.iter(|| setup(&l, &SolverConfig::default()).unwrap()));
    group.finish();
}

fn bench_solve_many(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_many");
    group.sample_size(10);
    let g = generators::grid(150);
    let rhs = supplies(g.n(), 16);
    let h = setup(&laplacian(&g), &SolverConfig::default()).unwrap();
    for exec in [Exec::Sequential, Exec::Parallel] {
        let cfg = SolverConfig::default().with_exec(exec);
        group.bench_function(BenchmarkId::new("grid150x16", format!("{exec:?}")), |b| {
            b.iter(|| solve_many(&h, &rhs, &cfg))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_setup, bench_solve_many);
criterion_main!(benches);
