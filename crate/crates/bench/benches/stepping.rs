use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use tagforge::enumeration::search_winners;
use tagforge::{detect_halt, evolve_fast, parse_state_id, step_compressed, CompressedState};

/// A state well into the long run of 15:30074:0, where strings are a few
/// thousand symbols long.
fn warm_state() -> CompressedState {
    let mut c = parse_state_id("15:30074:0").unwrap();
    evolve_fast(&mut c, 1 << 24);
    c
}

fn fast_path(c: &mut Criterion) {
    let start = warm_state();
    let mut g = c.benchmark_group("evolve_fast");
    for steps in [1u64 << 16, 1 << 22] {
        g.throughput(Throughput::Elements(steps));
        g.bench_function(format!("{steps} steps"), |b| {
            b.iter_batched(|| start.clone(), |mut s| black_box(evolve_fast(&mut s, steps)), BatchSize::SmallInput)
        });
    }
    g.finish();

    let mut g = c.benchmark_group("step_compressed");
    g.throughput(Throughput::Elements(1024));
    g.bench_function("1024 single steps", |b| {
        b.iter(|| {
            let mut s = start.clone();
            for _ in 0..1024 {
                s = step_compressed(&s).unwrap();
            }
            black_box(s)
        })
    });
    g.finish();
}

fn halting(c: &mut Criterion) {
    let mut g = c.benchmark_group("detect_halt");
    g.sample_size(10);
    for id in ["6:58:0", "12:3962:0"] {
        let s = parse_state_id(id).unwrap();
        g.bench_function(id, |b| b.iter(|| black_box(detect_halt(&s, 1 << 30))));
    }
    g.bench_function("search m<=10", |b| b.iter(|| black_box(search_winners(10, 1 << 30))));
    g.finish();
}

criterion_group!(benches, fast_path, halting);
criterion_main!(benches);
