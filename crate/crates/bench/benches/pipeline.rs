use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qmfiber::barcode::{bottleneck_distance, Barcode, Interval};
use qmfiber::harness::generate::{generate, GenKind, GenParams, Generated};
use qmfiber::homology::Homology;
use qmfiber::poset::{FinitePoset, Side};
use qmfiber::reduction::verify_main_bound;
use qmfiber::simplicial::order_complex;
use qmfiber::Prime;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_barcode(rng: &mut ChaCha8Rng, t: usize, len: usize) -> Barcode {
    let intervals = (0..len)
        .map(|_| {
            let b = rng.gen_range(0..=t);
            if b == t || rng.gen_bool(0.2) {
                Interval::infinite(b)
            } else {
                Interval::finite(b, rng.gen_range(b + 1..=t))
            }
        })
        .collect();
    Barcode::new(t, intervals).unwrap()
}

fn bottleneck(c: &mut Criterion) {
    let mut group = c.benchmark_group("bottleneck");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for len in [8, 32, 128] {
        let a = random_barcode(&mut rng, 20, len);
        let b = random_barcode(&mut rng, 20, len);
        group.bench_with_input(BenchmarkId::from_parameter(len), &(a, b), |bench, (a, b)| {
            bench.iter(|| bottleneck_distance(black_box(a), black_box(b)))
        });
    }
    group.finish();
}

/// Product of two chains, whose order complex is a triangulated square.
fn grid(n: usize) -> FinitePoset {
    let name = |i: usize, j: usize| format!("{i},{j}");
    let elements: Vec<String> = (0..n).flat_map(|i| (0..n).map(move |j| name(i, j))).collect();
    let mut relations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                relations.push((name(i, j), name(i + 1, j)));
            }
            if j + 1 < n {
                relations.push((name(i, j), name(i, j + 1)));
            }
        }
    }
    FinitePoset::new(elements, relations).unwrap()
}

fn homology(c: &mut Criterion) {
    let mut group = c.benchmark_group("order_complex_homology");
    for n in [3, 4, 5] {
        let k = order_complex(&grid(n));
        group.bench_with_input(BenchmarkId::from_parameter(n * n), &k, |bench, k| {
            bench.iter(|| Homology::compute(black_box(k), Prime::TWO, 2))
        });
    }
    group.finish();
}

fn reduction(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify_main_bound");
    group.sample_size(20);
    for n in [2, 4, 6] {
        let params = GenParams { n, t: 3, delay: 1, density: 0.4 };
        let Generated::Map(f) = generate(GenKind::FiberedMap, 7, params).unwrap() else {
            unreachable!()
        };
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |bench, f| {
            bench.iter(|| verify_main_bound(black_box(f), Side::Lower, Prime::TWO, 2, false).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bottleneck, homology, reduction);
criterion_main!(benches);
