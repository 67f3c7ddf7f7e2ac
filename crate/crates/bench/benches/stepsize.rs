use std::hint::black_box;

use adaprox::solvers::{adapg_mm_stepsize, adapg_original_stepsize};
use adaprox::stepsize::{adapg_stepsize, general_stepsize, preset_table1, StepsizePair};
use adaprox::CurvatureEstimates;
use criterion::{criterion_group, criterion_main, Criterion};

fn rules(c: &mut Criterion) {
    let sp = StepsizePair { gamma_prev: 0.8, gamma_curr: 1.0, rho: 1.25 };
    let est = CurvatureEstimates { ell: 0.4, big_l: 1.1 };
    let p = preset_table1()[3].params();
    let sched = p.schedule();

    let mut g = c.benchmark_group("stepsize");
    g.bench_function("adapg", |b| b.iter(|| adapg_stepsize(black_box(&sp), black_box(est), &p)));
    g.bench_function("general", |b| {
        b.iter(|| general_stepsize(black_box(&sp), black_box(est), &sched, &sched))
    });
    g.bench_function("adapg_orig", |b| b.iter(|| adapg_original_stepsize(black_box(&sp), black_box(est))));
    g.bench_function("adapg_mm", |b| b.iter(|| adapg_mm_stepsize(black_box(&sp), black_box(est))));
    g.finish();
}

criterion_group!(benches, rules);
criterion_main!(benches);
