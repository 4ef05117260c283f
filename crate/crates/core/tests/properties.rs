use proptest::prelude::*;

use varsens::model::presets::{table1, TauPreset};
use varsens::model::{power_for_k0, DriveConfig, OpticalCavity, SqueezeConfig, SystemConfig};
use varsens::oracle::sde::{NoiseMask, SdeSystem};
use varsens::spectra::{
    case_psd, closed_form_psd, quantum_psd, sf_nondeg_raw, sf_nondeg_subtracted, sql_psd, SpectrumCase,
};
use varsens::transfer::{mu, xi, Quadrature, Sign};

fn base() -> SystemConfig {
    table1(TauPreset::Table1)
}

/// Table 1 with the loss replaced, total decay rate kept.
fn with_loss_fraction(frac: f64) -> SystemConfig {
    let c = base();
    let ge = frac * c.cavity().gamma();
    c.with_cavity(c.cavity().with_loss(ge).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quantum_noise_never_beats_sql(k in 1e-3f64..1e7, gm in 0.0f64..1e4, w in 1e-3f64..1e7) {
        prop_assert!(quantum_psd(k, gm, w) >= sql_psd(gm, w) * (1.0 - 1e-12));
    }

    #[test]
    fn two_photon_subtraction_never_hurts(frac in 0.0f64..0.95, w in 1.0f64..3e6, loss in 0.0f64..0.3) {
        let c = with_loss_fraction(loss);
        let kappa = frac * c.cavity().gamma0();
        let raw = sf_nondeg_raw(&c, kappa, w).unwrap();
        let sub = sf_nondeg_subtracted(&c, kappa, w).unwrap();
        prop_assert!(sub <= raw * (1.0 + 1e-12));
    }

    #[test]
    fn assembled_equals_closed_form(frac in 0.0f64..0.95, w in 1.0f64..3e6, loss in 0.0f64..0.3, deg in any::<bool>()) {
        let c = with_loss_fraction(loss);
        let rate = frac * c.cavity().gamma0();
        let (sq, cases) = if deg {
            (SqueezeConfig::Degenerate { upsilon: rate }, [SpectrumCase::DegRaw, SpectrumCase::DegSub])
        } else {
            (SqueezeConfig::TwoPhoton { kappa: rate }, [SpectrumCase::NondegRaw, SpectrumCase::NondegSub])
        };
        let c = c.with_squeeze(sq).unwrap();
        for case in cases {
            let a = case_psd(case, &c, w).unwrap();
            let b = closed_form_psd(case, &c, w).unwrap();
            prop_assert!((a / b - 1.0).abs() < 1e-10, "{case}: {a} vs {b}");
        }
    }

    #[test]
    fn passive_cavity_is_unitary(w in 0.0f64..1e7, loss in 0.0f64..0.45) {
        let c = with_loss_fraction(loss);
        for sign in [Sign::Plus, Sign::Minus] {
            let x = xi(c.cavity(), 0.0, w, sign).unwrap();
            let m = mu(c.cavity(), 0.0, w, sign).unwrap();
            prop_assert!((x.norm_sqr() + m.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn power_round_trip(p in 1e-6f64..1.0) {
        let c = base().with_drive(DriveConfig::InputPower(p)).unwrap();
        let back = power_for_k0(c.cavity(), c.mechanical(), c.k0()).unwrap();
        prop_assert!((back / p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_json_round_trip_is_exact(
        g0 in 1e3f64..1e7,
        ge_frac in 0.0f64..0.5,
        k0 in 1.0f64..1e7,
        sq_frac in 0.0f64..0.9,
        deg in any::<bool>(),
    ) {
        let c = base();
        let cav = OpticalCavity::new(g0, ge_frac * g0, c.cavity().length(), c.cavity().omega0()).unwrap();
        let sq = if deg {
            SqueezeConfig::Degenerate { upsilon: sq_frac * g0 }
        } else {
            SqueezeConfig::TwoPhoton { kappa: sq_frac * g0 }
        };
        let c = c.with_cavity(cav).unwrap().with_drive(DriveConfig::K0(k0)).unwrap().with_squeeze(sq).unwrap();
        let text = c.to_file().to_json_pretty();
        let back = SystemConfig::from_json_str(&text).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn state_space_signal_gain_matches_transfer(frac in 0.0f64..0.9, w in 1.0f64..3e6, deg in any::<bool>()) {
        // the signal path agrees for both variants even where back action does not
        let c = base();
        let rate = frac * c.cavity().gamma0();
        let sq = if deg { SqueezeConfig::Degenerate { upsilon: rate } } else { SqueezeConfig::TwoPhoton { kappa: rate } };
        let c = c.with_squeeze(sq).unwrap();
        let sys = SdeSystem::new(&c, Quadrature::Amplitude, NoiseMask::default()).unwrap();
        let h = sys.frequency_response(w).unwrap()[SdeSystem::DIFFERENCE][5];
        let case = SpectrumCase::NondegRaw;
        let m = if deg { SpectrumCase::DegRaw.measurement(&c) } else { case.measurement(&c) }.unwrap();
        let tv = varsens::transfer::output_transfer(&m, &c, w).unwrap();
        let s = tv.signal_gain();
        prop_assert!((h - s).norm() <= 1e-9 * s.norm());
    }
}
