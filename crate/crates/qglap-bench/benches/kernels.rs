use criterion::{black_box, criterion_group, criterion_main, Criterion};
use qglap::edge_secular::secular_edge;
use qglap::graph::fixtures;
use qglap::mfunction::secular_vertex_real;
use qglap::spectrum::find_spectrum;
use qglap::ScanConfig;

fn bench_secular(c: &mut Criterion) {
    let g = fixtures::by_name("example_3_4").unwrap();
    c.bench_function("secular_edge example_3_4", |b| {
        b.iter(|| secular_edge(&g, black_box(7.3)))
    });
    c.bench_function("secular_vertex example_3_4", |b| {
        b.iter(|| secular_vertex_real(&g, black_box(7.3)).unwrap())
    });
}

fn bench_spectrum(c: &mut Criterion) {
    let g = fixtures::by_name("lasso").unwrap();
    let cfg = ScanConfig::default();
    let mut group = c.benchmark_group("spectrum");
    group.sample_size(10);
    group.bench_function("find_spectrum lasso to 50", |b| {
        b.iter(|| find_spectrum(&g, black_box(50.0), &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_secular, bench_spectrum);
criterion_main!(benches);
