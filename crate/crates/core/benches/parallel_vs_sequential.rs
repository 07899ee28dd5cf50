use arithdyn::algebra::Rat;
use arithdyn::heights::canonical_height;
use arithdyn::maps::RationalMap;
use arithdyn::par::{par_map, seq_map};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

/// `(λ, x)` pairs for a height sweep over `x² + λ`.
fn grid(n: i64) -> Vec<(Rat, Rat)> {
    let mut out = vec![];
    for a in -n..=n {
        for b in 1..=3 {
            out.push((Rat::frac(a, b), Rat::frac(b, a.abs() + 1)));
        }
    }
    out
}

fn height(job: &(Rat, Rat)) -> f64 {
    let (lambda, x) = job;
    let p = arithdyn::algebra::UniPoly::new(vec![lambda.clone(), Rat::zero(), Rat::one()]);
    let map = RationalMap::polynomial(p).unwrap();
    canonical_height(&map, x, 1e-10).unwrap().value
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("height_sweep");
    group.sample_size(10);
    for n in [8i64, 32] {
        let jobs = grid(n);
        group.bench_with_input(BenchmarkId::new("sequential", jobs.len()), &jobs, |b, jobs| {
            b.iter(|| seq_map(jobs, height))
        });
        group.bench_with_input(BenchmarkId::new("parallel", jobs.len()), &jobs, |b, jobs| {
            b.iter(|| par_map(jobs, height))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
