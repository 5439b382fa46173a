use clockrace_bench::{ring, warmed};
use clockrace_core::sampler::{PrefixSumTree, PutativeQueue};
use clockrace_core::{ClockId, ClockRng, HazardSpec, SamplerKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

fn step_cost(c: &mut Criterion) {
    let mut group = c.benchmark_group("ring step");
    group.throughput(Throughput::Elements(1));
    for exponent in [10, 12, 14] {
        let model = ring(1 << exponent);
        for name in SamplerKind::NAMES {
            let kind: SamplerKind = name.parse().unwrap();
            // first reaction is linear per step; skip the large rings
            if kind == SamplerKind::FirstReaction && exponent > 10 {
                continue;
            }
            let mut kernel = warmed(&model, &kind, 10_000);
            group.bench_function(BenchmarkId::new(name, 1 << exponent), |b| {
                b.iter(|| kernel.step(f64::INFINITY).unwrap())
            });
        }
    }
    group.finish();
}

fn first_draws(c: &mut Criterion) {
    let mut group = c.benchmark_group("sample_first");
    let specs = [
        ("exponential", HazardSpec::exponential(1.0).unwrap()),
        ("weibull", HazardSpec::weibull(2.0, 1.0).unwrap()),
        ("gamma", HazardSpec::gamma(2.0, 1.0).unwrap()),
        ("piecewise", HazardSpec::piecewise(vec![0.0, 0.5, 1.0], vec![0.4, 2.0, 1.0]).unwrap()),
    ];
    for (name, spec) in specs {
        let mut rng = ClockRng::from_seed(3);
        group.bench_function(name, |b| b.iter(|| spec.sample_first(black_box(rng.uniform()))));
    }
    group.finish();
}

fn structures(c: &mut Criterion) {
    let n = 1 << 14;
    let mut rng = ClockRng::from_seed(5);
    let mut tree = PrefixSumTree::with_capacity(n);
    let mut queue = PutativeQueue::with_capacity(n);
    for i in 0..n {
        tree.set(i, rng.uniform());
        queue.set(ClockId(i as u32), rng.uniform());
    }
    c.bench_function("prefix tree update+find 2^14", |b| {
        b.iter(|| {
            let i = (rng.uniform() * n as f64) as usize;
            tree.set(i, rng.uniform());
            black_box(tree.find(rng.uniform() * tree.total()))
        })
    });
    c.bench_function("putative queue reschedule+peek 2^14", |b| {
        b.iter(|| {
            let clock = ClockId((rng.uniform() * n as f64) as u32);
            queue.set(clock, rng.uniform());
            black_box(queue.peek())
        })
    });
}

criterion_group!(benches, step_cost, first_draws, structures);
criterion_main!(benches);
