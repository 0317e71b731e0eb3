use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dynwidth::engine::{EngineConfig, WidthEngine};
use dynwidth::gen::{generate, Mode};
use dynwidth::harness::{oracle_widths, verify_trace};
use dynwidth::oracle::calipers_width;
use dynwidth::par::{self, Execution};
use dynwidth::Op;

const EXECUTIONS: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn oracle_replay(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_replay");
    group.sample_size(10);
    for n in [256usize, 1024] {
        let ops = generate(Mode::Mixed, n, 1);
        for (name, exec) in EXECUTIONS {
            group.bench_with_input(BenchmarkId::new(name, n), &ops, |b, ops| {
                b.iter(|| oracle_widths(black_box(ops), exec))
            });
        }
    }
    group.finish();
}

fn batch_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("batch_verify");
    group.sample_size(10);
    let traces: Vec<Vec<Op>> = (0..16).map(|seed| generate(Mode::Churn, 128, seed)).collect();
    for (name, exec) in EXECUTIONS {
        group.bench_function(name, |b| {
            b.iter(|| {
                par::map(&traces, exec, |ops| {
                    verify_trace(ops, EngineConfig::default(), Execution::Sequential).expect("valid trace")
                })
            })
        });
    }
    group.finish();
}

fn engine_vs_recompute(c: &mut Criterion) {
    let mut group = c.benchmark_group("incremental_trace");
    group.sample_size(10);
    for n in [1usize << 10, 1 << 12] {
        let ops = generate(Mode::Incremental, n, 3);
        group.bench_with_input(BenchmarkId::new("engine", n), &ops, |b, ops| {
            b.iter(|| {
                let mut e = WidthEngine::default();
                for op in ops {
                    black_box(e.apply(*op).expect("valid trace"));
                }
            })
        });
        group.bench_with_input(BenchmarkId::new("recompute", n), &ops, |b, ops| {
            b.iter(|| {
                let mut live = Vec::with_capacity(ops.len());
                for op in ops {
                    if let Op::Insert(p) = op {
                        live.push(p.coord());
                    }
                    black_box(calipers_width(&live));
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, oracle_replay, batch_verify, engine_vs_recompute);
criterion_main!(benches);
