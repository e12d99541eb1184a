use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use fuzzyshell::fuzzy::defuzzify_centroid_with;
use fuzzyshell::{fixture, parse_kb, Engine, Execution, Inputs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn synthetic_batch(n: usize) -> Vec<Inputs> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..n)
        .map(|_| {
            (1..=4)
                .map(|i| (format!("f{i}"), rng.gen_range(0.0..=10.0)))
                .collect()
        })
        .collect()
}

fn batch_consultations(c: &mut Criterion) {
    let kb = parse_kb(&fixture::synthetic_kb_document(150)).unwrap();
    let engine = Engine::new(&kb).unwrap();
    let mut group = c.benchmark_group("batch_150_rules");
    for n in [64, 1000] {
        let batch = synthetic_batch(n);
        group.throughput(Throughput::Elements(n as u64));
        for (name, mode) in MODES {
            group.bench_with_input(BenchmarkId::new(name, n), &batch, |b, batch| {
                b.iter(|| engine.infer_batch(black_box(batch), mode))
            });
        }
    }
    group.finish();
}

fn high_resolution_centroid(c: &mut Criterion) {
    let kb = fixture::speech_therapy_kb();
    let result = Engine::new(&kb)
        .unwrap()
        .infer(&fixture::example_inputs())
        .unwrap();
    let output = kb.variable("weekly_session_number").unwrap();
    let mut group = c.benchmark_group("centroid");
    for resolution in [1001, 100_001, 1_000_001] {
        group.throughput(Throughput::Elements(resolution as u64));
        for (name, mode) in MODES {
            group.bench_with_input(
                BenchmarkId::new(name, resolution),
                &resolution,
                |b, &res| {
                    b.iter(|| {
                        defuzzify_centroid_with(&result.aggregate, output, res, mode).unwrap()
                    })
                },
            );
        }
    }
    group.finish();
}

criterion_group!(benches, batch_consultations, high_resolution_centroid);
criterion_main!(benches);
