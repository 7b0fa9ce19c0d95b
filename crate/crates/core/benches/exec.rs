//! Sequential against parallel execution on the three data-parallel hot loops.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gbs_core::hgraph::SaturateOptions;
use gbs_core::semidirect::{stabilizer_words, RoseRep};
use gbs_core::{random, samples, Exec, HGraph, Lattice};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn saturation(c: &mut Criterion) {
    let gog = samples::h0();
    let start = HGraph::single_vertex(gog, 0, Lattice::zero(2)).unwrap().graph;
    let mut group = c.benchmark_group("saturate_zero_label");
    group.sample_size(10);
    for depth in [4usize, 5] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, depth), &depth, |b, &depth| {
                b.iter(|| start.saturate_with(SaturateOptions { depth, max_vertices: usize::MAX, exec }).unwrap())
            });
        }
    }
    group.finish();
}

fn stabilizer_search(c: &mut Criterion) {
    let rose = RoseRep::from_gog(&samples::rose2()).unwrap();
    let l = Lattice::from_i64(2, &[&[1, 0]]);
    let mut group = c.benchmark_group("stabilizer_words");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, 7), |b| b.iter(|| stabilizer_words(&rose, black_box(&l), 7, exec).unwrap()));
    }
    group.finish();
}

fn batch_hnf(c: &mut Criterion) {
    let mut rng = random::rng(1);
    let mats: Vec<_> = (0..2000).map(|_| random::matrix(&mut rng, 3, 5, 50)).collect();
    let mut group = c.benchmark_group("batch_hnf");
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| exec.map(&mats, |m| m.hnf())));
    }
    group.finish();
}

criterion_group!(benches, saturation, stabilizer_search, batch_hnf);
criterion_main!(benches);
