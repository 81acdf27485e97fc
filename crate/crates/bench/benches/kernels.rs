use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use planarlab_core::algebra::{chebyshev_t, moments};
use planarlab_core::builtins;
use planarlab_core::cycles::{return_map, ReturnOptions, Section};
use planarlab_core::flow::{integrate, IntegrateOptions};
use planarlab_core::interval::{census_positive, eval_box, IBox};
use planarlab_core::pwl::{chebyshev_system, crossing_return};
use planarlab_core::seq::{parse_biguint, reverse_add_steps};
use planarlab_core::stability::{mc_probability, EquationKind};

fn interval(c: &mut Criterion) {
    let kou = builtins::kou();
    let b = IBox::from_bounds(&[(0.5, 0.6), (0.8, 0.9)]);
    c.bench_function("eval_box kou", |bch| bch.iter(|| eval_box(black_box(&kou[0]), black_box(&b))));
    let dom = IBox::from_bounds(&[(0.01, 2.0), (0.01, 2.0)]);
    c.bench_function("census kou depth 14", |bch| bch.iter(|| census_positive(&kou, &dom, 14).count));
}

fn flow(c: &mut Criterion) {
    let vf = builtins::field("loud:-1/2,1/2").unwrap();
    let opts = IntegrateOptions::with_tol(1e-10);
    c.bench_function("integrate loud t=20", |bch| {
        bch.iter(|| integrate(&vf, black_box(&[0.5, 0.0]), 0.0, 20.0, &opts, &[]).unwrap())
    });
    let mel = builtins::field("melnikov-two-cycles").unwrap();
    let sec = Section::positive_x((0.2, 8.0));
    let ro = ReturnOptions::default();
    c.bench_function("return_map melnikov r=2", |bch| bch.iter(|| return_map(&mel, &sec, black_box(2.0), &ro).unwrap()));
    let sys = chebyshev_system(10, 1e-3).unwrap();
    c.bench_function("crossing_return chebyshev10", |bch| bch.iter(|| crossing_return(&sys, black_box(0.5), 1e-12).unwrap()));
}

fn stats(c: &mut Criterion) {
    let mut g = c.benchmark_group("monte carlo");
    g.sample_size(10);
    g.bench_function("order 3 diff, 1e5 trials", |bch| {
        bch.iter(|| mc_probability(3, EquationKind::Differential, 100_000, 1, None).unwrap().successes)
    });
    g.bench_function("order 3 ddiff, 1e5 trials", |bch| {
        bch.iter(|| mc_probability(3, EquationKind::Difference, 100_000, 1, None).unwrap().successes)
    });
    g.finish();
}

fn exact(c: &mut Criterion) {
    let t = chebyshev_t(8);
    c.bench_function("moments T8 m≤6", |bch| bch.iter(|| moments(black_box(&t), 6, 200).unwrap()));
    let n = parse_biguint("196").unwrap();
    c.bench_function("reverse-and-add 196 x1000", |bch| bch.iter(|| reverse_add_steps(black_box(&n), 10, 1000).unwrap()));
}

criterion_group!(benches, interval, flow, stats, exact);
criterion_main!(benches);
