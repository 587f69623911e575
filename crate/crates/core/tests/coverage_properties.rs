use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};
use subthz_core::coverage::{
    analytic_outage_probability, compare_bands, max_range_m, outage_probability_mc_with_workers,
    ShadowSampler,
};
use subthz_core::pathloss::registry_lookup;
use subthz_core::{AntennaMode, BeamSelection, LinkBudget, OutageQuery, Scenario};

fn omni(scenario: Scenario) -> subthz_core::CiModelParams {
    registry_lookup(
        142.0,
        scenario,
        AntennaMode::Omnidirectional,
        BeamSelection::NotApplicable,
    )
    .unwrap()
}

#[test]
fn shadow_sampler_moments() {
    let sigma = 8.2;
    let s = ShadowSampler::new(sigma, 11).unwrap();
    let n = 1_000_000u64;
    let draws: Vec<f64> = (0..n).map(|i| s.sample(i)).collect();
    let mean = draws.iter().sum::<f64>() / n as f64;
    let sd = (draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    // 4 standard errors
    assert!(mean.abs() <= 4.0 * sigma / (n as f64).sqrt(), "mean {mean}");
    assert!(
        (sd - sigma).abs() <= 4.0 * sigma / (2.0 * n as f64).sqrt(),
        "sd {sd}"
    );
}

#[test]
fn max_range_with_sigma_matches_quantile_inversion() {
    // outage <= t  <=>  PL(d) <= PL_max - sigma * z_(1-t)
    let p = omni(Scenario::Nlos);
    let b = LinkBudget::sounder_142ghz();
    let z = Normal::new(0.0, 1.0).unwrap();
    for target in [0.01, 0.1, 0.5, 0.9] {
        let allowed = b.max_measurable_pl_db - 8.2 * z.inverse_cdf(1.0 - target);
        let anchor = 32.4 + 20.0 * 142f64.log10();
        let exact = 10f64.powf((allowed - anchor) / 29.0);
        let d = max_range_m(&p, &b, target).unwrap();
        assert!(
            (d - exact).abs() <= 0.01 + 1e-6 * exact,
            "t={target}: {d} vs {exact}"
        );
    }
}

#[test]
fn cross_band_los_difference() {
    let rows = compare_bands(
        Scenario::Los,
        AntennaMode::Omnidirectional,
        BeamSelection::NotApplicable,
        &LinkBudget::sounder_142ghz(),
        &[1.0, 10.0, 117.4, 500.0],
    )
    .unwrap();
    for row in rows {
        let d: f64 = row.distance_m;
        let expected = 20.0 * (142f64 / 28.0).log10() + 10.0 * (1.9 - 2.1) * d.log10();
        let got = row.bands[2].path_loss_db - row.bands[0].path_loss_db;
        assert!((got - expected).abs() < 1e-9);
    }
}

#[test]
fn nlos_best_beam_loses_less_at_142ghz() {
    let rows = compare_bands(
        Scenario::Nlos,
        AntennaMode::Directional,
        BeamSelection::Best,
        &LinkBudget::sounder_142ghz(),
        &[100.0],
    )
    .unwrap();
    let b = &rows[0].bands;
    let distance_term = |i: usize| b[i].path_loss_db - (32.4 + 20.0 * b[i].band.freq_ghz().log10());
    assert!((distance_term(0) - distance_term(2) - 8.0).abs() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn analytic_outage_monotone_in_distance(d in 1.0f64..5_000.0, step in 0.1f64..500.0) {
        let p = omni(Scenario::Nlos);
        let b = LinkBudget::sounder_142ghz();
        let a = analytic_outage_probability(&p, &b, d).unwrap();
        let c = analytic_outage_probability(&p, &b, d + step).unwrap();
        prop_assert!(c >= a);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn analytic_outage_monotone_in_exponent(n in 1.0f64..5.0, dn in 0.0f64..2.0, d in 1.0f64..2_000.0) {
        let b = LinkBudget::sounder_142ghz();
        let p = omni(Scenario::Nlos);
        let a = analytic_outage_probability(&p.with_ple(n), &b, d).unwrap();
        let c = analytic_outage_probability(&p.with_ple(n + dn), &b, d).unwrap();
        prop_assert!(c >= a);
    }

    #[test]
    fn analytic_outage_non_increasing_in_eirp(eirp in 0.0f64..40.0, de in 0.0f64..20.0, d in 1.0f64..2_000.0) {
        let p = omni(Scenario::Nlos);
        let base = LinkBudget::sounder_142ghz();
        let a = analytic_outage_probability(&p, &base.with_eirp_dbm(eirp).unwrap(), d).unwrap();
        let c = analytic_outage_probability(&p, &base.with_eirp_dbm(eirp + de).unwrap(), d).unwrap();
        prop_assert!(c <= a);
    }

    #[test]
    fn mc_independent_of_parallelism(seed in any::<u64>(), d in 50.0f64..2_000.0) {
        let q = OutageQuery {
            params: omni(Scenario::Nlos),
            budget: LinkBudget::sounder_142ghz(),
            distance_m: d,
            sample_count: 2_000,
            seed,
        };
        let one = outage_probability_mc_with_workers(&q, 1).unwrap();
        let four = outage_probability_mc_with_workers(&q, 4).unwrap();
        let sixteen = outage_probability_mc_with_workers(&q, 16).unwrap();
        prop_assert_eq!(one.outage_probability.to_bits(), four.outage_probability.to_bits());
        prop_assert_eq!(one.outage_probability.to_bits(), sixteen.outage_probability.to_bits());
    }
}
