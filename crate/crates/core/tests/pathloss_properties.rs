use proptest::prelude::*;
use subthz_core::pathloss::{ci_path_loss_db, fspl_db, registry_lookup, ModelRegistry};
use subthz_core::{AntennaMode, BeamSelection, CiModelParams, Scenario};

fn free_space_model(freq_ghz: f64) -> CiModelParams {
    CiModelParams::new(
        freq_ghz,
        2.0,
        Some(0.0),
        Scenario::Los,
        AntennaMode::Omnidirectional,
        BeamSelection::NotApplicable,
    )
    .unwrap()
}

/// Published (band, scenario, mode, beam, n, sigma) rows.
#[test]
fn registry_golden() {
    use AntennaMode::{Directional as D, Omnidirectional as O};
    use BeamSelection::{Arbitrary as A, Best as B, NotApplicable as NA};
    use Scenario::{Los, Nlos};
    let golden: [(f64, Scenario, AntennaMode, BeamSelection, f64, Option<f64>); 15] = [
        (142.0, Los, D, NA, 2.1, Some(2.8)),
        (142.0, Nlos, D, B, 3.1, Some(8.3)),
        (142.0, Nlos, D, A, 3.6, Some(9.1)),
        (142.0, Los, O, NA, 1.9, Some(2.7)),
        (142.0, Nlos, O, NA, 2.9, Some(8.2)),
        (73.0, Los, D, NA, 2.0, Some(1.9)),
        (73.0, Nlos, D, B, 3.1, None),
        (73.0, Nlos, D, A, 4.6, None),
        (73.0, Los, O, NA, 1.9, Some(1.7)),
        (73.0, Nlos, O, NA, 2.8, Some(8.7)),
        (28.0, Los, D, NA, 1.9, Some(1.1)),
        (28.0, Nlos, D, B, 3.5, None),
        (28.0, Nlos, D, A, 4.1, None),
        (28.0, Los, O, NA, 2.1, Some(3.6)),
        (28.0, Nlos, O, NA, 3.4, Some(9.7)),
    ];
    assert_eq!(ModelRegistry::builtin().len(), golden.len());
    for (f, s, m, b, n, sigma) in golden {
        let p = registry_lookup(f, s, m, b).unwrap();
        assert_eq!(p.ple_n, n, "{f} {s} {m} {b}");
        assert_eq!(p.sigma_db, sigma, "{f} {s} {m} {b}");
        assert_eq!(p.freq_ghz, f);
    }
}

#[test]
fn registry_csv_for_one_band() {
    let mut out = Vec::new();
    ModelRegistry::builtin()
        .write_csv(Some(subthz_core::Band::Ghz142), &mut out)
        .unwrap();
    let text = String::from_utf8(out).unwrap();
    let expected = "\
freq_ghz,scenario,antenna_mode,beam_selection,ple_n,sigma_db,censored
142,LOS,directional,na,2.1,2.8,false
142,NLOS,directional,best,3.1,8.3,false
142,NLOS,directional,arbitrary,3.6,9.1,true
142,LOS,omni,na,1.9,2.7,false
142,NLOS,omni,na,2.9,8.2,false
";
    assert_eq!(text, expected);
}

proptest! {
    #[test]
    fn ci_strictly_increasing_in_distance(
        n in 0.1f64..6.0,
        d in 1.0f64..10_000.0,
        step in 1e-3f64..1_000.0,
    ) {
        let p = free_space_model(142.0).with_ple(n);
        let near = ci_path_loss_db(&p, d, 0.0).unwrap();
        let far = ci_path_loss_db(&p, d + step, 0.0).unwrap();
        prop_assert!(far > near);
    }

    #[test]
    fn ci_with_exponent_two_is_free_space(f in 0.5f64..1000.0, d in 1.0f64..100_000.0) {
        let ci = ci_path_loss_db(&free_space_model(f), d, 0.0).unwrap();
        prop_assert!((ci - fspl_db(f, d).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn doubling_frequency_adds_6db(f in 0.5f64..500.0, d in 0.01f64..100_000.0) {
        let delta = fspl_db(2.0 * f, d).unwrap() - fspl_db(f, d).unwrap();
        prop_assert!((delta - 20.0 * 2f64.log10()).abs() <= 1e-9);
    }
}
