use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use grassorth::maps::{
    null_preservation_residuals, null_preservation_residuals_seq, standard_embedding, whitney_map,
};

fn bench_verification(c: &mut Criterion) {
    let mut group = c.benchmark_group("null_preservation_residuals");
    for (name, map) in [
        ("standard_3_3_5", standard_embedding(3, 3, 5).unwrap()),
        ("whitney_4_3", whitney_map(4, 3).unwrap()),
    ] {
        for n in [256usize, 2048] {
            group.bench_with_input(
                BenchmarkId::new(format!("{name}/parallel"), n),
                &n,
                |b, &n| b.iter(|| null_preservation_residuals(&map, n, 7)),
            );
            group.bench_with_input(
                BenchmarkId::new(format!("{name}/sequential"), n),
                &n,
                |b, &n| b.iter(|| null_preservation_residuals_seq(&map, n, 7)),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_verification);
criterion_main!(benches);
