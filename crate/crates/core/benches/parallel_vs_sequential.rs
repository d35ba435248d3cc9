use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use magnonq_core::analytics::{numeric_peak_search, TimeWindow};
use magnonq_core::exec::map_indexed;
use magnonq_core::hilbert::{initial_state, Mode, TimeGrid};
use magnonq_core::open::{qsd_ensemble, BathConfig, CouplingConvention, EnsembleOptions};
use magnonq_core::params::{validate_params, SystemParams, UnitMode};
use magnonq_core::Execution;

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn ensemble(c: &mut Criterion) {
    let p = validate_params(
        &SystemParams::resonant(UnitMode::Dimensionless, 0.0, 0.4, 0.3, 0.35).with_gamma_c(0.3),
    )
    .unwrap();
    let bath = BathConfig::new(0.7, 0.3, CouplingConvention::Linear).unwrap();
    let grid = TimeGrid::linspace(0.0, 20.0, 41).unwrap();
    let psi0 = initial_state(Mode::Q1);
    let mut g = c.benchmark_group("qsd_ensemble_200");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                let opts = EnsembleOptions {
                    trajectories: 200,
                    probes: 0,
                    exec,
                    ..Default::default()
                };
                black_box(qsd_ensemble(&p, &bath, &grid, &psi0, opts).unwrap())
            })
        });
    }
    g.finish();
}

fn peak_sweep(c: &mut Criterion) {
    let mut g = c.benchmark_group("peak_search_sweep_32");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                black_box(map_indexed(32, exec, |i| {
                    let j = 0.05 + 1.15 * i as f64 / 31.0;
                    let p = validate_params(&SystemParams::resonant(
                        UnitMode::Dimensionless,
                        0.0,
                        0.4,
                        0.3,
                        j,
                    ))
                    .unwrap();
                    numeric_peak_search(&p, Mode::M1, Mode::M2, TimeWindow::new(0.0, 40.0).unwrap())
                        .unwrap()
                        .c
                }))
            })
        });
    }
    g.finish();
}

criterion_group!(benches, ensemble, peak_sweep);
criterion_main!(benches);
