use criterion::{criterion_group, criterion_main, Criterion};

use tbn_core::fixtures;
use tbn_core::hilbert::{polymer_basis, HilbertBudget};

fn basis_bench(c: &mut Criterion) {
    let budget = HilbertBudget::default();
    let mut group = c.benchmark_group("polymer_basis");
    group.sample_size(10);
    for (name, text) in [
        ("grid", fixtures::GRID),
        ("translator", fixtures::TRANSLATOR),
    ] {
        let t = fixtures::tbn(text);
        group.bench_function(name, |b| b.iter(|| polymer_basis(&t, &budget).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, basis_bench);
criterion_main!(benches);
