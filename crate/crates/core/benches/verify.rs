use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spr_core::verify::{run_verification, Execution, VerifyOptions};

fn bench_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for max_labels in [2, 3] {
        for (name, execution) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            let opts = VerifyOptions {
                max_labels,
                execution,
                ..VerifyOptions::default()
            };
            group.bench_with_input(BenchmarkId::new(name, max_labels), &opts, |b, opts| {
                b.iter(|| run_verification(opts))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_verify);
criterion_main!(benches);
