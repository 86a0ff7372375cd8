use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacobi_series::hypergeometric::expand_monomial_with;
use jacobi_series::{Execution, Layout, MonomialSpec};

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("expand_monomial");
    group.sample_size(10);
    for (d, k, n) in [(4, 2, 4), (5, 3, 4), (6, 3, 3)] {
        let layout = Layout::for_branch(d, k);
        let spec = MonomialSpec::unit(&layout, 1);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(format!("{exec:?}"), format!("d{d}_k{k}_N{n}"));
            group.bench_with_input(id, &spec, |b, spec| {
                b.iter(|| expand_monomial_with(black_box(spec), &layout, n, exec).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, enumeration);
criterion_main!(benches);
