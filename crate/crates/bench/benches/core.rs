use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mflow_core::branching::{all_trivalent_trees, tree_polytope_count};
use mflow_core::flow::{integrate_flow, FlowConfig};
use mflow_core::gt::{enumerate_gt, GtPatterns};
use mflow_core::matrix::{eig_hermitian, polar_decompose, random_complex, random_hermitian, random_sl};
use mflow_core::HighestWeight;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn flow(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate_flow");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for n in [2, 3, 4, 6] {
        let b = random_sl(n, &mut rng);
        group.bench_with_input(BenchmarkId::from_parameter(n), &b, |bench, b| {
            bench.iter(|| integrate_flow(black_box(b), &FlowConfig::default()).unwrap())
        });
    }
    group.finish();
}

fn linear_algebra(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in [4, 16, 64] {
        let a = random_hermitian(n, &mut rng);
        c.bench_function(&format!("eig_hermitian/{n}"), |bench| {
            bench.iter(|| eig_hermitian(black_box(&a)))
        });
        let b = random_complex(n, &mut rng);
        c.bench_function(&format!("polar_decompose/{n}"), |bench| {
            bench.iter(|| polar_decompose(black_box(&b)))
        });
    }
}

fn gt(c: &mut Criterion) {
    let lambda = HighestWeight::new(vec![8, 6, 4, 2, 0]).unwrap();
    c.bench_function("enumerate_gt/86420", |bench| {
        bench.iter(|| enumerate_gt(black_box(&lambda)))
    });
    let small = HighestWeight::new(vec![5, 3, 1, 0]).unwrap();
    c.bench_function("gt_patterns_stream/5310", |bench| {
        bench.iter(|| GtPatterns::new(black_box(&small)).count())
    });
}

fn trees(c: &mut Criterion) {
    let trees = all_trivalent_trees(8);
    let r = [4u64, 4, 4, 4, 4, 4, 4, 4];
    c.bench_function("tree_polytope_count/8 leaves, all trees", |bench| {
        bench.iter(|| {
            trees
                .iter()
                .map(|t| tree_polytope_count(t, black_box(&r)).unwrap())
                .sum::<u128>()
        })
    });
}

criterion_group!(benches, flow, linear_algebra, gt, trees);
criterion_main!(benches);
