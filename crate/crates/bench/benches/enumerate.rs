use burnlab_core::{build_lists, extend_level, BuildOptions, ListKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn full_lists(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_lists");
    g.sample_size(10);
    for (n, m) in [(4usize, 13u32), (5, 15), (6, 16)] {
        g.bench_with_input(BenchmarkId::new(format!("n{n}"), m), &(n, m), |b, &(n, m)| {
            b.iter(|| build_lists(n, m, None, &BuildOptions::default()).unwrap())
        });
    }
    g.finish();
}

fn floored_lists(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_lists_floored");
    g.sample_size(10);
    g.bench_function("n7_m19_l46", |b| {
        b.iter(|| build_lists(7, 19, Some(46), &BuildOptions::default()).unwrap())
    });
    g.finish();
}

fn one_level(c: &mut Criterion) {
    let fam = build_lists(5, 15, None, &BuildOptions::default()).unwrap();
    let four = fam.get(4, 14).unwrap();
    let five = fam.get(5, 14).unwrap();
    assert_eq!(five.kind(), ListKind::Well);
    c.bench_function("extend_level_n5_m14", |b| b.iter(|| extend_level(Some(four), five).unwrap()));
}

criterion_group!(benches, full_lists, floored_lists, one_level);
criterion_main!(benches);
