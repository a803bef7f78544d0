use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use streampart::bitvec::PlaConfig;
use streampart::cpi::{ArrayIndex, AssignmentIndex, BatchedRlcVector, RlcVector};

const LEN: usize = 200_000;

fn sequence(mean_run: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(mean_run);
    let mut seq = Vec::with_capacity(LEN);
    while seq.len() < LEN {
        let run = rng.random_range(1..=2 * mean_run) as usize;
        let sym = rng.random_range(0..64);
        seq.extend(std::iter::repeat_n(sym, run.min(LEN - seq.len())));
    }
    seq
}

type MakeIndex = fn() -> Box<dyn AssignmentIndex>;

fn indexes() -> Vec<(&'static str, MakeIndex)> {
    vec![
        ("array", || Box::new(ArrayIndex::new())),
        ("cpi", || {
            Box::new(RlcVector::new(Some(64), PlaConfig::default()))
        }),
        ("cpi-batch-1000", || {
            Box::new(BatchedRlcVector::new(1000, Some(64), PlaConfig::default()))
        }),
    ]
}

fn bench_append(c: &mut Criterion) {
    let mut group = c.benchmark_group("append");
    for mean_run in [2, 50] {
        let seq = sequence(mean_run);
        for (name, make) in indexes() {
            group.bench_with_input(BenchmarkId::new(name, mean_run), &seq, |b, seq| {
                b.iter(|| {
                    let mut idx = make();
                    for &s in seq {
                        idx.append(s);
                    }
                    black_box(idx.size_in_bytes())
                })
            });
        }
    }
    group.finish();
}

fn bench_get(c: &mut Criterion) {
    let mut group = c.benchmark_group("get");
    let seq = sequence(50);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let probes: Vec<u64> = (0..10_000)
        .map(|_| rng.random_range(0..LEN as u64))
        .collect();
    for (name, make) in indexes() {
        let mut idx = make();
        for &s in &seq {
            idx.append(s);
        }
        group.bench_function(name, |b| {
            b.iter(|| {
                probes
                    .iter()
                    .map(|&i| idx.get(i).unwrap() as u64)
                    .sum::<u64>()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_append, bench_get);
criterion_main!(benches);
