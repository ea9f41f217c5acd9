use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dispersal_core::experiments::random_band_function;
use dispersal_core::extremals::{pm_witness_check, BourgainDatum, PmDatum};
use dispersal_core::propagator::{continuum_evolve, maximal_field, synthesize_field, EvalPath, TimeGrid};
use dispersal_core::{BallQuadrature, FrequencyLattice, Symbol};

fn synthesis(c: &mut Criterion) {
    let mut group = c.benchmark_group("synthesize_field");
    group.sample_size(20);
    for cutoff in [16.0, 32.0, 64.0] {
        let lattice = FrequencyLattice::new(2, 0.5, cutoff).unwrap();
        let f = random_band_function(&lattice, 256, 1, |_| true).unwrap();
        let spacing = BallQuadrature::commensurate_spacing(&lattice, BallQuadrature::default_spacing(&lattice));
        let ball = BallQuadrature::new(&[0.0, 0.0], 1.0, spacing).unwrap();
        for path in [EvalPath::Direct, EvalPath::Fft] {
            group.bench_with_input(BenchmarkId::new(format!("{path:?}"), cutoff), &cutoff, |b, _| {
                b.iter(|| synthesize_field(black_box(&f), &ball, path).unwrap())
            });
        }
    }
    group.finish();
}

fn maximal(c: &mut Criterion) {
    let lattice = FrequencyLattice::new(2, 0.5, 16.0).unwrap();
    let f = random_band_function(&lattice, 128, 2, |_| true).unwrap();
    let ball = BallQuadrature::default_for(&lattice).unwrap();
    let tg = TimeGrid::uniform(0.0, 1.0, 64).unwrap();
    let mut group = c.benchmark_group("maximal_field_64_times");
    group.sample_size(10);
    for path in [EvalPath::Direct, EvalPath::Fft] {
        group.bench_function(format!("{path:?}"), |b| {
            b.iter(|| maximal_field(black_box(&f), &Symbol::Boussinesq, &ball, &tg, path).unwrap())
        });
    }
    group.finish();
}

fn continuum(c: &mut Criterion) {
    let mut group = c.benchmark_group("continuum");
    group.sample_size(10);
    for r in [64.0, 256.0] {
        let d = BourgainDatum::new(r).unwrap();
        group.bench_with_input(BenchmarkId::new("bourgain_elliptic", r), &r, |b, &r| {
            b.iter(|| continuum_evolve(d.strips(), &Symbol::Elliptic, &[0.01, -0.02], black_box(1.0 / r)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("bourgain_boussinesq", r), &r, |b, &r| {
            b.iter(|| continuum_evolve(d.strips(), &Symbol::Boussinesq, &[0.01, -0.02], black_box(1.0 / r)).unwrap())
        });
    }
    let pm = PmDatum::new(128.0, 1.5).unwrap();
    group.bench_function("pm_witness_check_16", |b| b.iter(|| pm_witness_check(black_box(&pm), 16).unwrap()));
    group.finish();
}

criterion_group!(benches, synthesis, maximal, continuum);
criterion_main!(benches);
