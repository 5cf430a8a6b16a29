use binpv::eval::CodeIndex;
use binpv::hashing::itq_fit;
use binpv::model::{forward_backward, Gradients, ModelKind, ModelShape, SoftmaxSupport};
use binpv::train::{SamplerTable, SoftmaxMode};
use binpv_bench::{gaussian_like, params, random_codes, rng};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::Rng;
use std::hint::black_box;

fn hamming_scan(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank_by_code");
    for bits in [32usize, 128] {
        let index = CodeIndex::new(random_codes(10_000, bits, 1)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(bits), &index, |b, index| {
            b.iter(|| index.rank_by_code(black_box("d17")).unwrap())
        });
    }
    group.finish();
}

fn softmax_step(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward_backward");
    for kind in [ModelKind::BinaryPvdbow, ModelKind::RealBinaryPvdbow] {
        let (doc_dim, bits) = match kind {
            ModelKind::RealBinaryPvdbow => (300, 28),
            _ => (128, 128),
        };
        let shape = ModelShape {
            kind,
            vocab_size: 20_000,
            doc_dim,
            code_bits: bits,
            word_dim: 0,
            context_window: 0,
        };
        let p = params(shape, 2);
        let sampler = SamplerTable::unigram(p.vocabulary.counts(), 0.75).unwrap();
        let mut r = rng(3);
        let x: Vec<f64> = (0..doc_dim).map(|_| r.random_range(-0.5..0.5)).collect();
        let mut support = SoftmaxSupport::default();
        let mut g = Gradients::new();
        group.bench_function(kind.name(), |b| {
            b.iter(|| {
                let target = r.random_range(0..shape.vocab_size as u32);
                sampler.draw_support(target, SoftmaxMode::Sampled { negatives: 64 }, &mut r, &mut support);
                forward_backward(&p, black_box(&x), &support, kind.activation(), &mut g).unwrap()
            })
        });
    }
    group.finish();
}

fn itq(c: &mut Criterion) {
    let data = gaussian_like(2_000, 128, 4);
    let mut group = c.benchmark_group("itq_fit");
    group.sample_size(10);
    group.bench_function("2000x128_to_32", |b| b.iter(|| itq_fit(black_box(&data), 32, 50).unwrap()));
    group.finish();
}

criterion_group!(benches, hamming_scan, softmax_step, itq);
criterion_main!(benches);
