use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gippa_core::linalg::{lu_solve, svd, sym_eig, Mat, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> Mat {
    Mat::new(n, n, (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

fn bench_factorizations(c: &mut Criterion) {
    let mut group = c.benchmark_group("factorizations");
    for n in [3usize, 8] {
        let mut rng = ChaCha8Rng::seed_from_u64(7 + n as u64);
        let a = random_matrix(&mut rng, n);
        let sym = a.sym_part().unwrap();
        let spd = a
            .transpose()
            .mul(&a)
            .unwrap()
            .add(&Mat::identity(n).scale(n as f64))
            .unwrap();
        let rhs = Vector::new((0..n).map(|i| i as f64 + 1.0).collect());

        group.bench_with_input(BenchmarkId::new("lu_solve", n), &n, |b, _| {
            b.iter(|| lu_solve(black_box(&spd), black_box(&rhs)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sym_eig", n), &n, |b, _| {
            b.iter(|| sym_eig(black_box(&sym)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("svd", n), &n, |b, _| {
            b.iter(|| svd(black_box(&a)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_factorizations);
criterion_main!(benches);
