use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use varsens::model::presets::{table1, TauPreset};
use varsens::model::SqueezeConfig;
use varsens::oracle::{validate, ValidationSettings};
use varsens::spectra::{case_spectrum, FrequencyGrid, SpectrumCase};
use varsens::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn spectrum_grid(c: &mut Criterion) {
    let base = table1(TauPreset::Table1);
    let g0 = base.cavity().gamma0();
    let cfg = base.with_squeeze(SqueezeConfig::TwoPhoton { kappa: 0.9 * g0 }).unwrap();
    let mut group = c.benchmark_group("spectrum_grid");
    for points in [400, 10_000] {
        let grid = FrequencyGrid::log(1e-3 * g0, 10.0 * g0, points).unwrap();
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, points), &grid, |b, grid| {
                b.iter(|| case_spectrum(SpectrumCase::NondegSub, black_box(&cfg), grid, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn oracle_trials(c: &mut Criterion) {
    let cfg = table1(TauPreset::Table1);
    let settings =
        ValidationSettings { segments: 32, omega_min_g0: 0.1, points: 10, coverage: 0.0, ..Default::default() };
    let mut group = c.benchmark_group("oracle_trials");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| validate(&cfg, SpectrumCase::Baseline, &settings, exec).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, spectrum_grid, oracle_trials);
criterion_main!(benches);
