use aggconc::analysis::{check_relative_lipschitz, LipConfig};
use aggconc::asymptotics::{analyze_dense, analyze_sparse, SparseConfig};
use aggconc::eval::{EvalOptions, Evaluator};
use aggconc::graph::ExtensionPair;
use aggconc::term::parse;
use aggconc::types::{closure, count_extensions};
use aggconc::{Graph, Registry};
use aggconc_bench::{dense_graph, sparse_graph, TRIANGLE};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn eval(c: &mut Criterion) {
    let t = parse(TRIANGLE).unwrap();
    let ev = Evaluator::with_options(&t, EvalOptions { cache: true }).unwrap();
    let mut group = c.benchmark_group("eval_triangles_sparse");
    for n in [500, 1000, 2000] {
        let g = sparse_graph(n, 0.7, 1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| b.iter(|| ev.eval(g, &[]).unwrap()));
    }
    group.finish();
}

fn sampling(c: &mut Criterion) {
    c.bench_function("sample_dense_1000", |b| b.iter(|| dense_graph(black_box(1000), 0.5, 3)));
    c.bench_function("sample_sparse_10000", |b| b.iter(|| sparse_graph(black_box(10_000), 0.7, 3)));
}

fn counting(c: &mut Criterion) {
    let g = sparse_graph(2000, 0.5, 2);
    let cherry = ExtensionPair::rooted(Graph::from_edges(3, &[(0, 2), (1, 2)]).unwrap(), vec![0, 1]).unwrap();
    let path = ExtensionPair::rooted(Graph::path(3), vec![0]).unwrap();
    c.bench_function("extcount_cherry", |b| b.iter(|| count_extensions(&g, &[0, 1], &cherry).unwrap()));
    c.bench_function("extcount_path_from_root", |b| b.iter(|| count_extensions(&g, &[0], &path).unwrap()));
    let h = sparse_graph(300, 0.72, 5);
    c.bench_function("closure_s2", |b| b.iter(|| closure(&h, &[0, 1], 2, 0.72).unwrap()));
}

fn engines(c: &mut Criterion) {
    let reg = Registry::builtin();
    let t = parse(TRIANGLE).unwrap();
    c.bench_function("analyze_dense_triangle", |b| b.iter(|| analyze_dense(&t, 0.5, &reg).unwrap()));
    c.bench_function("analyze_sparse_triangle", |b| {
        b.iter(|| analyze_sparse(&t, &SparseConfig::new(0.7), &reg).unwrap())
    });
    let sigmoid = reg.get("sigmoid").unwrap();
    let cfg = LipConfig {
        samples: 5000,
        ..LipConfig::default()
    };
    c.bench_function("lipcheck_sigmoid_5000", |b| b.iter(|| check_relative_lipschitz(&sigmoid, &cfg).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = eval, sampling, counting, engines
}
criterion_main!(benches);
