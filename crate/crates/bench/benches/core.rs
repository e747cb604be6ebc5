use adelic_bench::{ball, fields};
use adelic_core::hecke::{hecke_degree, tamagawa_inversion_check, DegreeMode};
use adelic_core::meanvalue::{degree_one_prime, primitive_density, siegel_hecke_average};
use adelic_core::schanuel::{count_projective_points, ProjectiveCountConfig};
use adelic_core::NumberField;
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn hecke(c: &mut Criterion) {
    c.bench_function("hecke_degree brute force m=3 q=5 k=3", |b| {
        b.iter(|| hecke_degree(3, black_box(5), 3, DegreeMode::BruteForce).unwrap())
    });
    c.bench_function("inversion m=2 n=3 q=3 e=1", |b| b.iter(|| tamagawa_inversion_check(2, 3, 3, 1, 0).unwrap()));
}

fn siegel(c: &mut Criterion) {
    let mut g = c.benchmark_group("siegel average");
    g.sample_size(10);
    let q = NumberField::rational();
    let f = ball(3, 3.5);
    for p in [11u64, 31] {
        let prime = degree_one_prime(&q, p).unwrap();
        g.bench_with_input(BenchmarkId::new("Q n=3", p), &prime, |b, prime| {
            b.iter(|| siegel_hecke_average(&q, 3, &f, prime, false).unwrap())
        });
    }
    g.finish();
}

fn projective(c: &mut Criterion) {
    let mut g = c.benchmark_group("projective count n=2 B=20");
    g.sample_size(10);
    for f in fields() {
        let cfg = ProjectiveCountConfig::new(f.clone(), 2, 20.0).unwrap();
        g.bench_function(f.label(), |b| b.iter(|| count_projective_points(&cfg).unwrap()));
    }
    g.finish();
}

fn densities(c: &mut Criterion) {
    let mut g = c.benchmark_group("primitive density");
    g.sample_size(10);
    g.bench_function("m=1 n=2 N=100", |b| b.iter(|| primitive_density(2, 1, 100, 0).unwrap()));
    g.finish();
}

criterion_group!(benches, hecke, siegel, projective, densities);
criterion_main!(benches);
