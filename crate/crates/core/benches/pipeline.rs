use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dyntree::criteria::check_all;
use dyntree::cuts::{exact_min_cuts, reduce_vertex_cover, ExactOptions, UndirectedGraph};
use dyntree::generate::{disjoint_copies, skeleton_sequence};
use dyntree::layout::{layout_acyclic, layout_dynamic_tree_with, ContourStrategy, LayoutOptions};
use dyntree::parser::parse_document;
use dyntree::{Execution, LayoutParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn complete_graph(n: usize) -> UndirectedGraph {
    let mut g = UndirectedGraph::new();
    for a in 0..n {
        for b in a + 1..n {
            g.add_edge(&format!("v{a}"), &format!("v{b}"));
        }
    }
    g
}

fn exact(c: &mut Criterion) {
    let t = reduce_vertex_cover(&complete_graph(5));
    let mut group = c.benchmark_group("exact_min_cuts/k5");
    for (name, execution) in MODES {
        let opts = ExactOptions {
            execution,
            limit: 32,
            ..Default::default()
        };
        group.bench_function(name, |b| {
            b.iter(|| exact_min_cuts(black_box(&t), opts).unwrap())
        });
    }
    group.finish();
}

fn criteria(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let t = disjoint_copies(&skeleton_sequence(&mut rng, 8, 40), 16);
    let out =
        layout_dynamic_tree_with(&t, &LayoutParams::default(), &LayoutOptions::default()).unwrap();
    let mut group = c.benchmark_group("check_all");
    for (name, execution) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| check_all(black_box(&out.tree), &out.layout, &out.cuts, execution))
        });
    }
    group.finish();
}

fn layout(c: &mut Criterion) {
    let avl = parse_document(include_str!("../fixtures/avl.dtree")).unwrap();
    let opts = LayoutOptions::default();
    let cut = layout_dynamic_tree_with(&avl, &LayoutParams::default(), &opts)
        .unwrap()
        .tree;
    let mut group = c.benchmark_group("layout/avl");
    for copies in [1, 4, 16] {
        let t = disjoint_copies(&cut, copies);
        for (name, s) in [
            ("threaded", ContourStrategy::Threaded),
            ("naive", ContourStrategy::Naive),
        ] {
            group.bench_with_input(BenchmarkId::new(name, copies), &t, |b, t| {
                b.iter(|| layout_acyclic(black_box(t), &LayoutParams::default(), s).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, exact, criteria, layout);
criterion_main!(benches);
