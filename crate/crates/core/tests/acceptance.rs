//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use varsens::exec::Execution;
use varsens::model::presets::{table1, TauPreset};
use varsens::model::{power_for_k0, DriveConfig, SqueezeConfig, SystemConfig};
use varsens::oracle::{validate, ValidationSettings};
use varsens::spectra::figures::{figure, FigureData, FigureId};
use varsens::spectra::threshold::time_domain_threshold;
use varsens::spectra::{
    case_psd, closed_form_psd, minimize_quantum_psd, sf_deg_raw, sf_nondeg_raw, sql_psd, FrequencyGrid, SpectrumCase,
};
use varsens::transfer::{mu, subtracted_transfer, subtraction_pair, xi, NoiseChannel, Quadrature, QuadratureFamily, Sign};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if took >= limit {
        o.passed = false;
    }
    o.detail = format!("{}; runtime {:.3?} (limit {:?})", o.detail, took, limit);
    o
}

fn lossless_mechanics(c: &SystemConfig) -> SystemConfig {
    c.with_mechanical(c.mechanical().with_gamma_m(0.0).unwrap()).unwrap()
}

fn thermal_occupancy() -> Outcome {
    let c = table1(TauPreset::Table1);
    let n = c.mechanical().thermal_occupancy();
    let rel = (n / 1.2e6 - 1.0).abs();
    outcome(rel <= 0.03, format!("n_T = {n:.6e}, deviation {:.2}%", rel * 100.0))
}

fn braginsky() -> Outcome {
    let c = table1(TauPreset::Table1);
    let b = c.derived().braginsky;
    let rel = (b / 0.75 - 1.0).abs();
    outcome(rel <= 0.05, format!("B = {b:.4}, deviation {:.2}%", rel * 100.0))
}

fn sql_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let gm = 10f64.powf(rng.random_range(-3.0..6.0));
        let w = 10f64.powf(rng.random_range(-3.0..7.0));
        let (_, s) = minimize_quantum_psd(gm, w);
        worst = worst.max((s / sql_psd(gm, w) - 1.0).abs());
    }
    outcome(worst <= 1e-10, format!("worst relative error {worst:.2e} over 100 points"))
}

fn passive_unitarity() -> Outcome {
    let c = table1(TauPreset::Table1);
    let cav = c.cavity();
    let mut worst: f64 = 0.0;
    for &w in FrequencyGrid::default_for(&c).points() {
        for sign in [Sign::Plus, Sign::Minus] {
            let x = xi(cav, 0.0, w, sign).unwrap();
            let m = mu(cav, 0.0, w, sign).unwrap();
            worst = worst.max((x.norm_sqr() + m.norm_sqr() - 1.0).abs());
        }
    }
    outcome(worst <= 1e-12, format!("max ||xi|^2 + |mu|^2 - 1| = {worst:.2e}"))
}

fn complete_cancellation() -> Outcome {
    let c = table1(TauPreset::Table1);
    let c = c.with_cavity(c.cavity().with_loss(0.0).unwrap()).unwrap();
    let g0 = c.cavity().gamma0();
    let mut worst: f64 = 0.0;
    for sq in [
        SqueezeConfig::None,
        SqueezeConfig::TwoPhoton { kappa: 0.5 * g0 },
        SqueezeConfig::Degenerate { upsilon: 0.5 * g0 },
    ] {
        let cfg = c.with_squeeze(sq).unwrap();
        for &w in FrequencyGrid::default_for(&cfg).points() {
            let tv = subtracted_transfer(&cfg, QuadratureFamily::Amplitude, w).unwrap();
            // relative to the back-action coefficient before subtraction
            let (sig, _, _) = subtraction_pair(&cfg, QuadratureFamily::Amplitude, w).unwrap();
            let scale = sig.coeff(Quadrature::Amplitude, NoiseChannel::AlphaPlus).norm();
            for ch in [NoiseChannel::AlphaPlus, NoiseChannel::EpsPlus] {
                worst = worst.max(tv.coeff(Quadrature::Amplitude, ch).norm() / scale);
            }
        }
    }
    outcome(worst <= 1e-14, format!("max residual relative to the uncancelled back action {worst:.2e}"))
}

fn dual_path() -> Outcome {
    let base = table1(TauPreset::Table1);
    let lossless = base.with_cavity(base.cavity().with_loss(0.0).unwrap()).unwrap();
    let g0 = base.cavity().gamma0();
    let mut worst: f64 = 0.0;
    let mut evaluated = 0usize;
    for case in SpectrumCase::ALL {
        for frac in [0.0, 0.5, 0.9] {
            let cfg = match case {
                SpectrumCase::Baseline | SpectrumCase::LosslessSub => lossless.clone(),
                SpectrumCase::NondegRaw | SpectrumCase::NondegSub => {
                    base.with_squeeze(SqueezeConfig::TwoPhoton { kappa: frac * g0 }).unwrap()
                }
                SpectrumCase::DegRaw | SpectrumCase::DegSub => {
                    base.with_squeeze(SqueezeConfig::Degenerate { upsilon: frac * g0 }).unwrap()
                }
            };
            for &w in FrequencyGrid::default_for(&cfg).points() {
                let a = case_psd(case, &cfg, w).unwrap();
                let b = closed_form_psd(case, &cfg, w).unwrap();
                worst = worst.max((a / b - 1.0).abs());
                evaluated += 1;
            }
        }
    }
    outcome(worst <= 1e-10, format!("worst relative difference {worst:.2e} over {evaluated} evaluations"))
}

fn back_action_ratio() -> Outcome {
    let base = lossless_mechanics(&table1(TauPreset::Table1));
    let cav = base.cavity();
    let (g0, ge) = (cav.gamma0(), cav.gamma_e());
    let pump = PI / TauPreset::Table1.seconds();
    let nondeg = base
        .with_drive(DriveConfig::K0(pump))
        .unwrap()
        .with_squeeze(SqueezeConfig::TwoPhoton { kappa: 0.5 * g0 })
        .unwrap();
    let deg = base.with_n0(pump).unwrap().with_squeeze(SqueezeConfig::Degenerate { upsilon: 0.5 * g0 }).unwrap();
    // at Ω = 0 and γ_m = 0 only the back-action terms survive
    let ratio = sf_nondeg_raw(&nondeg, 0.5 * g0, 0.0).unwrap() / sf_deg_raw(&deg, 0.5 * g0, 0.0).unwrap();
    let expect = (g0 - ge) / (g0 + ge);
    let rel = (ratio / expect - 1.0).abs();
    outcome(rel <= 1e-8, format!("ratio {ratio:.6}, expected {expect:.6}, relative error {rel:.2e}"))
}

fn figure_shapes() -> Outcome {
    let curve = |f: &FigureData, frac: f64| f.curves.iter().find(|c| c.squeeze_g0 == Some(frac)).unwrap().series.clone();
    let exec = Execution::default();
    let fig4 = figure(FigureId::Fig4, None, exec).unwrap();
    let fig5 = figure(FigureId::Fig5, None, exec).unwrap();
    let fig9 = figure(FigureId::Fig9, None, exec).unwrap();

    let (_, min0) = curve(&fig4, 0.0).min().unwrap();
    let a = (0.98..=1.05).contains(&min0);
    let min4 = curve(&fig4, 0.9).min().unwrap().1;
    let min5 = curve(&fig5, 0.9).min().unwrap().1;
    let b = min4 < 1.0 && min5 < 1.0;
    let c = [0.0, 0.5, 0.9].iter().all(|&frac| {
        let (raw, sub) = (curve(&fig4, frac), curve(&fig5, frac));
        sub.values.iter().zip(&raw.values).all(|(s, r)| s <= r)
    });
    // the default grid starts at 10⁻³γ₀
    let (v9, v5) = (curve(&fig9, 0.9), curve(&fig9, 0.5));
    let d = v9.values[0] > v5.values[0];
    outcome(
        a && b && c && d,
        format!(
            "(a) min R = {min0:.4} {}; (b) min R(0.9g0) fig4 {min4:.3} fig5 {min5:.3} {}; (c) subtracted <= raw {}; (d) fig9 R(0.9g0) {:.3e} vs R(0.5g0) {:.3e} {}",
            ok(a),
            ok(b),
            ok(c),
            v9.values[0],
            v5.values[0],
            ok(d)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fails"
    }
}

fn oracle_validation() -> Outcome {
    let c = table1(TauPreset::Table1);
    let g0 = c.cavity().gamma0();
    let settings = ValidationSettings::default();
    let exec = Execution::default();
    let runs = [
        ("baseline", SpectrumCase::Baseline, SqueezeConfig::None),
        ("nondeg-raw", SpectrumCase::NondegRaw, SqueezeConfig::TwoPhoton { kappa: 0.5 * g0 }),
        ("nondeg-sub", SpectrumCase::NondegSub, SqueezeConfig::TwoPhoton { kappa: 0.5 * g0 }),
        ("deg-raw", SpectrumCase::DegRaw, SqueezeConfig::Degenerate { upsilon: 0.5 * g0 }),
    ];
    let mut all = true;
    let mut parts = Vec::new();
    for (name, case, sq) in runs {
        let cfg = c.with_squeeze(sq).unwrap();
        let r = validate(&cfg, case, &settings, exec).unwrap();
        all &= r.passed;
        parts.push(format!("{name} {:.0}% {}", r.fraction_within * 100.0, if r.passed { "pass" } else { "fail" }));
    }
    let neg = ValidationSettings { perturb_kappa: Some(0.2), ..settings };
    let r = validate(&c, SpectrumCase::Baseline, &neg, exec).unwrap();
    all &= !r.passed;
    parts.push(format!(
        "negative control {:.0}% {}",
        r.fraction_within * 100.0,
        if r.passed { "passes (should fail)" } else { "fails as required" }
    ));
    outcome(all, parts.join(", "))
}

fn threshold_consistency() -> Outcome {
    let c = lossless_mechanics(&table1(TauPreset::Table1));
    let tau = TauPreset::Table1.seconds();
    let t = time_domain_threshold(&c, tau);
    let ratio = t.band_quantum_term / t.sql_quantum_term;
    let rel = (ratio * 3f64.sqrt() - 1.0).abs();
    let p = power_for_k0(c.cavity(), c.mechanical(), PI / tau).unwrap();
    let band = p / 1e-2;
    let a = rel <= 1e-12;
    let b = (0.1..=10.0).contains(&band);
    outcome(
        a && b,
        format!("quantum-term ratio x sqrt(3) - 1 = {rel:.1e} {}; P_in = {p:.3e} W ({band:.3} x 10 mW) {}", ok(a), ok(b)),
    )
}

fn main() {
    let ms = Duration::from_millis(1);
    let s = Duration::from_secs(1);
    let criteria: [(&str, Box<dyn FnOnce() -> Outcome>); 10] = [
        ("thermal occupancy", Box::new(move || timed(ms, thermal_occupancy))),
        ("Braginsky factor", Box::new(move || timed(ms, braginsky))),
        ("SQL identity", Box::new(move || timed(s, sql_identity))),
        ("passive unitarity", Box::new(move || timed(s, passive_unitarity))),
        ("complete cancellation", Box::new(complete_cancellation)),
        ("dual-path consistency", Box::new(move || timed(5 * s, dual_path))),
        ("back-action ratio", Box::new(back_action_ratio)),
        ("figure shapes", Box::new(move || timed(5 * s, figure_shapes))),
        ("oracle validation", Box::new(move || timed(180 * s, oracle_validation))),
        ("threshold consistency", Box::new(threshold_consistency)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let o = run();
        println!("criterion {:>2} {:<22} {}  {}", i + 1, name, if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
