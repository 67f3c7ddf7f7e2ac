use adaprox::problems::{parse_libsvm, write_libsvm};
use adaprox_bench::dataset_path;
use criterion::{criterion_group, criterion_main, Criterion, Throughput};

fn parse(c: &mut Criterion) {
    let bytes = std::fs::read(dataset_path()).expect("vendored dataset");
    let ds = parse_libsvm(&bytes).unwrap();
    let mut g = c.benchmark_group("libsvm");
    g.throughput(Throughput::Bytes(bytes.len() as u64));
    g.bench_function("parse", |b| b.iter(|| parse_libsvm(&bytes).unwrap()));
    g.bench_function("write", |b| b.iter(|| write_libsvm(&ds)));
    g.finish();
}

criterion_group!(benches, parse);
criterion_main!(benches);
