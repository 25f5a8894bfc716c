use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use koszul_bench::{boolean_lattice, random_sparse};
use koszul_core::homology::bar_complex_ring;
use koszul_core::linalg::rank;
use koszul_core::{incidence_ring, FieldSpec};

fn random_matrices(c: &mut Criterion) {
    let fp = FieldSpec::prime_field(1_048_583).unwrap();
    let mut group = c.benchmark_group("rank_random");
    for n in [50usize, 100, 200] {
        let m = random_sparse(n, n, 0.05, n as u64);
        group.bench_with_input(BenchmarkId::new("rational", n), &m, |b, m| {
            b.iter(|| rank(m, FieldSpec::Rationals).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("prime", n), &m, |b, m| b.iter(|| rank(m, fp).unwrap()));
    }
    group.finish();
}

/// Ranks of every block of the bar differentials of the Boolean lattice on four atoms.
fn bar_differentials(c: &mut Criterion) {
    let a = incidence_ring(&boolean_lattice(4), FieldSpec::Rationals).unwrap();
    let slice = bar_complex_ring(&a, 4).unwrap();
    c.bench_function("rank_bar_boolean4_weight4", |b| {
        b.iter(|| slice.maps().iter().map(|d| d.rank().unwrap()).sum::<usize>())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = random_matrices, bar_differentials
}
criterion_main!(benches);
