use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn subthz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subthz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = subthz(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn stderr_line(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(text.lines().count(), 1, "stderr: {text}");
    text.trim_end().to_string()
}

#[test]
fn predict_los_omni_at_100m() {
    let out = stdout(&[
        "predict",
        "--band",
        "142",
        "--scenario",
        "los",
        "--mode",
        "omni",
        "--d",
        "100",
    ]);
    assert_eq!(
        out,
        "freq_ghz,scenario,antenna_mode,beam_selection,distance_m,pl_db\n142,LOS,omni,na,100.00,113.45\n"
    );
}

#[test]
fn precision_flag_widens_output() {
    let out = stdout(&[
        "predict",
        "--scenario",
        "los",
        "--mode",
        "omni",
        "--d",
        "100",
        "--precision",
        "4",
    ]);
    assert!(out.ends_with(",100.0000,113.4458\n"), "{out}");
}

#[test]
fn registry_band_142() {
    let out = stdout(&["registry", "--band", "142"]);
    assert_eq!(
        out,
        "freq_ghz,scenario,antenna_mode,beam_selection,ple_n,sigma_db,censored\n\
         142,LOS,directional,na,2.1,2.8,false\n\
         142,NLOS,directional,best,3.1,8.3,false\n\
         142,NLOS,directional,arbitrary,3.6,9.1,true\n\
         142,LOS,omni,na,1.9,2.7,false\n\
         142,NLOS,omni,na,2.9,8.2,false\n"
    );
    assert_eq!(stdout(&["registry"]).lines().count(), 16);
}

#[test]
fn rooftop_free_space_row_matches_reported() {
    let out = stdout(&[
        "rooftop",
        "--config",
        data("rooftop_links.json").to_str().unwrap(),
    ]);
    let row = out.lines().find(|l| l.starts_with("pr_fs_dbm,")).unwrap();
    let computed: Vec<f64> = row.split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    let reported = [
        -55.2, -55.6, -56.3, -57.3, -58.8, -60.5, -63.7, -68.5, -60.5, -63.7,
    ];
    assert_eq!(computed.len(), reported.len());
    for (c, r) in computed.iter().zip(reported) {
        assert!((c - r).abs() <= 0.1, "{c} vs {r}");
    }
    assert!(out.starts_with("tx,TX1,TX2"));
}

#[test]
fn fit_reports_censoring_for_arbitrary_beams() {
    let out = stdout(&[
        "fit",
        "--input",
        data("example_measurements.csv").to_str().unwrap(),
    ]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 6);
    let arbitrary = lines
        .iter()
        .find(|l| l.starts_with("NLOS,directional,arbitrary"))
        .unwrap();
    assert!(arbitrary.ends_with(",true"), "{arbitrary}");
    let omni_los = lines.iter().find(|l| l.starts_with("LOS,omni")).unwrap();
    let n: f64 = omni_los.split(',').nth(3).unwrap().parse().unwrap();
    assert!((n - 2.0).abs() < 0.2, "{omni_los}");
}

#[test]
fn synth_with_pdp_files() {
    let out = stdout(&[
        "synth",
        "--input",
        data("pdp_sweep.csv").to_str().unwrap(),
        "--pdp",
        &format!("1={}", data("pdp/beam1.txt").display()),
        "--pdp",
        &format!("2={}", data("pdp/beam2.txt").display()),
    ]);
    assert!(out.starts_with("tx_id,rx_id,omni_path_loss_db,contributing,deduplicated\nTX1,RX27,"));
}

#[test]
fn synth_without_pdp_for_empty_power_is_domain_error() {
    let out = subthz(&["synth", "--input", data("pdp_sweep.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("error[domain]:"));
}

#[test]
fn coverage_is_independent_of_workers() {
    let base = [
        "coverage",
        "--distances",
        "100,250,400",
        "--samples",
        "30000",
        "--seed",
        "11",
    ];
    let one = stdout(&[&base[..], &["--workers", "1"]].concat());
    let many = stdout(&[&base[..], &["--workers", "7"]].concat());
    assert_eq!(one, many);
    assert!(one.starts_with("distance_m,pl_db,outage_mc,outage_analytic\n"));
}

#[test]
fn coverage_eirp_boost_lowers_outage() {
    let col = |eirp: &str| -> f64 {
        let out = stdout(&[
            "coverage",
            "--distances",
            "300",
            "--samples",
            "1000",
            "--eirp",
            eirp,
        ]);
        out.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(3)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(col("37") < col("27"));
}

#[test]
fn foliage_default_sweep() {
    let out = stdout(&["foliage"]);
    assert_eq!(out.lines().count(), 8);
    assert!(out.contains("\n30.00,10.00,9.00\n"), "{out}");
}

#[test]
fn exit_codes() {
    let unknown = subthz(&["teleport"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert!(stderr_line(&unknown).starts_with("error[usage]:"));

    let missing = subthz(&["fit", "--input", "/nonexistent/measurements.csv"]);
    assert_eq!(missing.status.code(), Some(2));
    stderr_line(&missing);

    let domain = subthz(&[
        "predict",
        "--scenario",
        "los",
        "--mode",
        "omni",
        "--d",
        "0.5",
    ]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(stderr_line(&domain).starts_with("error[domain]:"));

    let no_model = subthz(&[
        "predict",
        "--band",
        "60",
        "--scenario",
        "los",
        "--mode",
        "omni",
        "--d",
        "5",
    ]);
    assert_eq!(no_model.status.code(), Some(1));
    assert!(stderr_line(&no_model).contains("valid keys"));

    assert_eq!(subthz(&["--help"]).status.code(), Some(0));
    assert_eq!(subthz(&[]).status.code(), Some(2));
}

#[test]
fn failed_run_leaves_no_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("pl.csv");
    let out = subthz(&[
        "predict",
        "--scenario",
        "los",
        "--mode",
        "omni",
        "--d",
        "10,0.2",
        "-o",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn run_config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command":"predict","precision":1,
            "args":{"scenario":"nlos","mode":"omni","distances":[100]}}"#,
    )
    .unwrap();
    let from_file = stdout(&["--run-config", cfg.to_str().unwrap()]);
    assert!(
        from_file.ends_with("142,NLOS,omni,na,100.0,133.4\n"),
        "{from_file}"
    );
    let overridden = stdout(&[
        "--run-config",
        cfg.to_str().unwrap(),
        "predict",
        "--scenario",
        "los",
    ]);
    assert!(
        overridden.ends_with("142,LOS,omni,na,100.0,113.4\n"),
        "{overridden}"
    );

    let clash = subthz(&["--run-config", cfg.to_str().unwrap(), "registry"]);
    assert_eq!(clash.status.code(), Some(2));
}
