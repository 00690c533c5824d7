use criterion::{criterion_group, criterion_main, BatchSize, Criterion};

use fuzzmech_bench::{charged_vortex, free_packet, harmonic_packet, ramp};
use fuzzmech_core::dynamics::{continuity_residual, evolve_wave};
use fuzzmech_core::topology::{winding_number, GridLoop};
use fuzzmech_core::variational::certify_constancy;
use fuzzmech_core::{EvolutionConfig, Scheme};

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("ten steps");
    for n in [256, 1024] {
        let (s, h) = free_packet(n);
        for scheme in [Scheme::SplitStep, Scheme::CrankNicolson] {
            let cfg = EvolutionConfig::new(scheme, 1e-3, 10);
            group.bench_function(format!("{scheme} n={n}"), |b| {
                b.iter_batched(|| s.clone(), |s| evolve_wave(&s, &h, &cfg, |_, _, _| Ok(())).unwrap(), BatchSize::SmallInput)
            });
        }
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let (s, h) = harmonic_packet(1024);
    c.bench_function("continuity residual n=1024", |b| b.iter(|| continuity_residual(&s, &h).unwrap()));

    let v = charged_vortex(128, 1);
    let l = GridLoop::circle(v.grid(), [0.0, 0.0], 2.0, &[]).unwrap();
    c.bench_function("winding number 128^2", |b| b.iter(|| winding_number(&v, &l).unwrap()));

    let f = ramp(256);
    c.bench_function("constancy scan n_max=6", |b| b.iter(|| certify_constancy(&f, 6).unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = steps, checks
}
criterion_main!(benches);
