use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use quasisym_core::convexity::{certify_hprime_convex, find_pk, CertificateMode};
use quasisym_core::nonlin::{bundle_for, solve_g, NonlinearitySpec};
use quasisym_core::planar::{reflection_diagnostics, solve_planar, PlanarControls, PlanarProblemSpec};
use quasisym_core::radial::{morse_index, solve_radial, MorseOptions, RadialControls, RadialDomain, RadialProblemSpec};

fn transform(c: &mut Criterion) {
    let spec = NonlinearitySpec::power(2.0, 5.0, 3).unwrap();
    c.bench_function("tabulate g (k=2, smax=20)", |b| b.iter(|| solve_g(black_box(&spec), 20.0, 1e-12).unwrap()));
    let bundle = bundle_for(spec, 20.0, 1e-12).unwrap();
    c.bench_function("h''' at 1000 points", |b| {
        b.iter(|| {
            (0..1000)
                .map(|i| bundle.h_eval(&[0.0], 1e-3 + 0.01 * i as f64, 3).unwrap())
                .sum::<f64>()
        })
    });
}

fn certificates(c: &mut Criterion) {
    c.bench_function("sharp certificate", |b| {
        b.iter(|| certify_hprime_convex(black_box(7.0), black_box(2.0), CertificateMode::Sharp).unwrap())
    });
    c.bench_function("find p_k (k=2, tol=1e-3)", |b| {
        b.iter(|| find_pk(black_box(2.0), CertificateMode::Sharp, 1e-3).unwrap())
    });
}

fn radial(c: &mut Criterion) {
    let spec = NonlinearitySpec::power(2.0, 5.0, 3).unwrap();
    let bundle = bundle_for(spec, 20.0, 1e-12).unwrap();
    let problem = RadialProblemSpec {
        domain: RadialDomain::Ball { radius: 1.0 },
        dim: 3,
        target_nodes: 0,
    };
    let controls = RadialControls {
        grid_intervals: 1000,
        ..Default::default()
    };
    let mut group = c.benchmark_group("radial");
    group.sample_size(20);
    group.bench_function("shooting, 1000 intervals", |b| {
        b.iter(|| solve_radial(&problem, &bundle, &controls).unwrap())
    });
    let sol = solve_radial(&problem, &bundle, &controls).unwrap();
    group.bench_function("morse index, 1000 intervals", |b| {
        b.iter(|| morse_index(&sol, &bundle, &MorseOptions::default()).unwrap())
    });
    group.finish();
}

fn planar(c: &mut Criterion) {
    let spec = NonlinearitySpec::power(2.0, 5.0, 2).unwrap();
    let bundle = bundle_for(spec, 200.0, 1e-12).unwrap();
    let problem = PlanarProblemSpec {
        half_width: 1.0,
        height: 1.0,
        n1: 64,
        n2: 32,
    };
    let mut group = c.benchmark_group("planar");
    group.sample_size(10);
    group.bench_function("newton, 64x32", |b| {
        b.iter(|| solve_planar(&problem, &bundle, &PlanarControls::default()).unwrap())
    });
    let field = solve_planar(&problem, &bundle, &PlanarControls::default()).unwrap();
    group.bench_function("reflection diagnostics, 64x32", |b| {
        b.iter(|| reflection_diagnostics(&field, &bundle, 1e-6).unwrap())
    });
    group.finish();
}

criterion_group!(benches, transform, certificates, radial, planar);
criterion_main!(benches);
