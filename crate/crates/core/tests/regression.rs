//! Pinned pipeline values for the reference configuration.

use varsens::model::presets::{table1, TauPreset};
use varsens::model::SqueezeConfig;
use varsens::spectra::figures::{figure, FigureId};
use varsens::spectra::threshold::{spectral_threshold_force, time_domain_threshold};
use varsens::spectra::{case_spectrum, FrequencyGrid, SpectrumCase};
use varsens::Execution;

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got / want - 1.0).abs() <= rel
}

#[test]
fn nondeg_subtracted_strong_squeezing_grid() {
    let base = table1(TauPreset::Table1);
    let g0 = base.cavity().gamma0();
    let cfg = base.with_squeeze(SqueezeConfig::TwoPhoton { kappa: 0.9 * g0 }).unwrap();
    let grid = FrequencyGrid::default_for(&cfg);
    let s = case_spectrum(SpectrumCase::NondegSub, &cfg, &grid, Execution::Parallel).unwrap();
    assert_eq!(s.values.len(), 400);
    assert!(close(s.grid[0], 2.2484434349999998e2, 1e-15));
    assert!(close(s.values[0], 5.237051761846436e4, 1e-9), "{}", s.values[0]);
}

#[test]
fn reference_thresholds() {
    let c = table1(TauPreset::Table1);
    let t = time_domain_threshold(&c, 28e-6);
    assert!(close(t.f_sql, 6.551543e-13, 1e-6), "F_SQL {}", t.f_sql);
    assert!(close(t.k_star, 1.295571e5, 1e-6), "K* {}", t.k_star);
    assert!(close(t.band_integrated, 7.183147e-13, 1e-6));
    assert!(close(t.sql_form, 9.111488e-13, 1e-6));
    // the band-integrated form sits between F_SQL and the SQL-spectrum form
    assert!(t.f_sql < t.band_integrated && t.band_integrated < t.sql_form);

    let grid = FrequencyGrid::default_for(&c);
    let (w, psd) = case_spectrum(SpectrumCase::Baseline, &c, &grid, Execution::Sequential).unwrap().min().unwrap();
    assert!(close(w, 2.395802e5, 1e-6), "{w}");
    assert!(close(spectral_threshold_force(&c, psd, 28e-6), 7.059358e-13, 1e-6));
}

#[test]
fn figure_shapes() {
    let f5 = figure(FigureId::Fig5, None, Execution::Parallel).unwrap();
    let f4 = figure(FigureId::Fig4, None, Execution::Parallel).unwrap();
    // subtraction helps at low frequency for every squeezed curve
    for (raw, sub) in f4.curves.iter().zip(&f5.curves).skip(1) {
        assert!(sub.series.values[0] < raw.series.values[0], "{}", raw.label);
    }
    let f9 = figure(FigureId::Fig9, None, Execution::Parallel).unwrap();
    let strong = &f9.curves[2].series.values;
    assert!(strong[0] > strong[100], "υ = 0.9γ₀ curve should rise towards Ω → 0");
}
