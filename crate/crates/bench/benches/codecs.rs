use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use polyred::ring::{pack_basic, unpack_basic};
use polyred::{
    compress_blocked, decode_container, decompress_blocked, encode_container, generate,
    pack_advanced, unpack_advanced, BaseParams, BlockPlan, CodecPolicy, DistributionSpec, Payload,
    Seed, Width,
};

const N: usize = 100_000;

fn noisy() -> Vec<u32> {
    let spec = DistributionSpec::new(3000.0, 500.0, 2000, 45000, N * 4 / 1855, N);
    generate(&spec, Width::W32, Seed(1)).unwrap().into_values()
}

fn word_codecs(c: &mut Criterion) {
    let mut group = c.benchmark_group("word_codecs");
    group.throughput(Throughput::Elements(N as u64));
    for base in [17u32, 3200, 65536, 1 << 30] {
        let params = BaseParams::new(0, base - 1).unwrap();
        let values: Vec<u32> = (0..N as u64)
            .map(|i| (i.wrapping_mul(0x9E37_79B9_7F4A_7C15) >> 20) as u32 % base)
            .collect();
        let basic = pack_basic(&values, &params).unwrap();
        let advanced = pack_advanced(&values, &params).unwrap();
        group.bench_with_input(BenchmarkId::new("pack_basic", base), &values, |b, v| {
            b.iter(|| pack_basic(black_box(v), &params).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("unpack_basic", base), &basic, |b, w| {
            b.iter(|| unpack_basic(black_box(w), &params, N).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("pack_advanced", base), &values, |b, v| {
            b.iter(|| pack_advanced(black_box(v), &params).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("unpack_advanced", base),
            &advanced,
            |b, w| b.iter(|| unpack_advanced(black_box(w), &params, N).unwrap()),
        );
    }
    group.finish();
}

fn blocked(c: &mut Criterion) {
    let values = noisy();
    let mut group = c.benchmark_group("blocked");
    group.throughput(Throughput::Elements(N as u64));
    for block_len in [10usize, 154, 1000, 0] {
        let plan = BlockPlan::new(block_len, CodecPolicy::Auto);
        let blocks = compress_blocked(&values, &plan).unwrap();
        group.bench_with_input(BenchmarkId::new("compress", block_len), &values, |b, v| {
            b.iter(|| compress_blocked(black_box(v), &plan).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("decompress", block_len),
            &blocks,
            |b, bl| b.iter(|| decompress_blocked(black_box(bl)).unwrap()),
        );
    }
    group.finish();
}

fn container(c: &mut Criterion) {
    let spec = DistributionSpec::new(3000.0, 500.0, 2000, 45000, N * 4 / 1855, N);
    let payload = Payload::Vector(generate(&spec, Width::W32, Seed(2)).unwrap());
    let plan = BlockPlan::new(154, CodecPolicy::Auto);
    let bytes = encode_container(&payload, &plan).unwrap();
    let mut group = c.benchmark_group("container");
    group.throughput(Throughput::Bytes((N * 4) as u64));
    group.bench_function("encode", |b| {
        b.iter(|| encode_container(black_box(&payload), &plan).unwrap())
    });
    group.bench_function("decode", |b| {
        b.iter(|| decode_container(black_box(&bytes)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, word_codecs, blocked, container);
criterion_main!(benches);
