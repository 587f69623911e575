use proptest::prelude::*;
use subthz_core::linkbudget::{
    detectable, foliage_slant_length_m, received_power_fs_dbm, ROOFTOP_LINKS_142GHZ,
};
use subthz_core::LinkBudget;

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[test]
fn free_space_column_reproduced() {
    let budget = LinkBudget::rooftop_142ghz();
    for link in &ROOFTOP_LINKS_142GHZ {
        let pr = received_power_fs_dbm(&budget, link.distance_m).unwrap();
        assert!(
            (pr - link.reported_pr_fs_dbm).abs() <= 0.1,
            "{}: {pr:.3} vs {}",
            link.label,
            link.reported_pr_fs_dbm
        );
    }
}

#[test]
fn reported_rows_close() {
    for link in &ROOFTOP_LINKS_142GHZ {
        let loss = link.reported_pr_fs_dbm - link.measured_pr_dbm;
        assert!(
            (loss - link.reported_foliage_loss_db).abs() <= 0.1,
            "{}",
            link.label
        );
    }
}

#[test]
fn foliage_loss_statistics() {
    let losses: Vec<f64> = ROOFTOP_LINKS_142GHZ
        .iter()
        .filter(|l| l.foliage_blocked)
        .map(|l| l.reported_foliage_loss_db)
        .collect();
    assert_eq!(losses.len(), 7);
    let (mean, sd) = mean_sd(&losses);
    assert!((mean - 6.9).abs() <= 0.1, "{mean}");
    assert!((sd - 3.0).abs() <= 0.1, "{sd}");
}

#[test]
fn slant_length_sweep_statistics() {
    let lengths: Vec<f64> = [80.0, 70.0, 60.0, 50.0, 40.0, 30.0, 20.0]
        .iter()
        .map(|&el| foliage_slant_length_m(el, 5.0).unwrap())
        .collect();
    // direct evaluation of 5 / sin(theta)
    for (l, el) in lengths
        .iter()
        .zip([80.0f64, 70.0, 60.0, 50.0, 40.0, 30.0, 20.0])
    {
        assert!((l - 5.0 / el.to_radians().sin()).abs() < 1e-12);
    }
    let (mean, sd) = mean_sd(&lengths);
    assert!((mean - 7.9).abs() <= 0.1, "{mean}");
    assert!((sd - 3.4).abs() <= 0.1, "{sd}");
}

proptest! {
    #[test]
    fn received_power_drops_6db_per_doubling(d in 1.0f64..50_000.0) {
        let b = LinkBudget::rooftop_142ghz();
        let near = received_power_fs_dbm(&b, d).unwrap();
        let far = received_power_fs_dbm(&b, 2.0 * d).unwrap();
        prop_assert!(far < near);
        prop_assert!((near - far - 20.0 * 2f64.log10()).abs() <= 1e-9);
    }

    #[test]
    fn slant_length_decreases_with_elevation(a in 0.1f64..89.0, step in 0.01f64..1.0) {
        let lower = foliage_slant_length_m(a, 5.0).unwrap();
        let higher = foliage_slant_length_m((a + step).min(90.0), 5.0).unwrap();
        prop_assert!(higher < lower);
    }

    #[test]
    fn detectability_is_monotone(pl1 in 0.0f64..300.0, pl2 in 0.0f64..300.0) {
        let b = LinkBudget::sounder_142ghz();
        let (lo, hi) = if pl1 <= pl2 { (pl1, pl2) } else { (pl2, pl1) };
        if detectable(&b, hi) {
            prop_assert!(detectable(&b, lo));
        }
    }
}
