use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use subthz_core::channel_data::{parse_measurement_csv_with_pdps, parse_pdp_file};
use subthz_core::coverage::{
    analytic_outage_probability, max_range_m, outage_probability_mc_with_workers,
};
use subthz_core::linkbudget::{
    foliage_loss_db, foliage_slant_length_m, predict_received_power_foliage_dbm,
    received_power_fs_dbm,
};
use subthz_core::pathloss::{ci_path_loss_db, registry_lookup};
use subthz_core::pdp::{directional_path_loss_db, synthesize_omni};
use subthz_core::plfit::fit_with_censoring_report;
use subthz_core::{
    AntennaMode, Band, BeamSelection, CiFitResult, CiModelParams, DirectionalRecord, FoliageModel,
    LinkBudget, MeasurementSet, ModelRegistry, OutageQuery, PathLossSample, PowerDelayProfile,
    Scenario,
};

use crate::cli::{
    Command, CoverageArgs, FitArgs, FoliageArgs, ModelSelect, PredictArgs, RegistryArgs,
    RooftopArgs, SynthArgs,
};
use crate::error::{CliError, CliResult};
use crate::output::Format;

const DEFAULT_BAND_GHZ: f64 = 142.0;
const DEFAULT_MAX_PL_DB: f64 = 152.0;
const DEFAULT_ELEVATIONS_DEG: [f64; 7] = [80.0, 70.0, 60.0, 50.0, 40.0, 30.0, 20.0];
const DEFAULT_FOLIAGE_SAMPLES: u64 = 1_000;
const DEFAULT_MC_SAMPLES: u64 = 100_000;

/// Executes `command` and returns the CSV text it produces.
pub fn execute(command: &Command, seed: u64, fmt: Format) -> CliResult<String> {
    match command {
        Command::Registry(a) => registry(a),
        Command::Predict(a) => predict(a, fmt),
        Command::Fit(a) => fit(a, fmt),
        Command::Synth(a) => synth(a, fmt),
        Command::Rooftop(a) => rooftop(a, fmt),
        Command::Foliage(a) => foliage(a, seed, fmt),
        Command::Coverage(a) => coverage(a, seed, fmt),
    }
}

fn parse_flag<T: FromStr>(flag: &str, value: &str) -> CliResult<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::usage(format!("--{flag}: {e}")))
}

fn require<'a, T>(value: &'a Option<T>, flag: &str) -> CliResult<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

fn open(path: &Path) -> CliResult<std::fs::File> {
    std::fs::File::open(path)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))
}

/// Resolves a registry model. `default_scenario`/`default_mode` are used
/// when the flag is absent; `None` makes the flag mandatory.
fn select_model(
    sel: &ModelSelect,
    default_scenario: Option<Scenario>,
    default_mode: Option<AntennaMode>,
) -> CliResult<CiModelParams> {
    let band = sel.band.unwrap_or(DEFAULT_BAND_GHZ);
    let scenario = match (&sel.scenario, default_scenario) {
        (Some(s), _) => parse_flag("scenario", s)?,
        (None, Some(s)) => s,
        (None, None) => return Err(CliError::usage("--scenario is required")),
    };
    let mode = match (&sel.mode, default_mode) {
        (Some(m), _) => parse_flag("mode", m)?,
        (None, Some(m)) => m,
        (None, None) => return Err(CliError::usage("--mode is required")),
    };
    let beam = match &sel.beam {
        Some(b) => parse_flag("beam", b)?,
        None => BeamSelection::default_for(scenario, mode),
    };
    Ok(registry_lookup(band, scenario, mode, beam)?)
}

fn model_columns(p: &CiModelParams) -> String {
    format!(
        "{},{},{},{}",
        p.freq_ghz, p.scenario, p.antenna_mode, p.beam_selection
    )
}

fn registry(args: &RegistryArgs) -> CliResult<String> {
    let band = args.band.map(Band::from_ghz).transpose()?;
    let mut buf = Vec::new();
    ModelRegistry::builtin().write_csv(band, &mut buf)?;
    String::from_utf8(buf).map_err(|e| CliError::Io(e.to_string()))
}

fn predict(args: &PredictArgs, fmt: Format) -> CliResult<String> {
    let params = select_model(&args.model, None, None)?;
    if args.distances.is_empty() {
        return Err(CliError::usage("--d is required"));
    }
    let shadow = args.shadow.unwrap_or(0.0);
    let mut out = String::from("freq_ghz,scenario,antenna_mode,beam_selection,distance_m,pl_db\n");
    for &d in &args.distances {
        let pl = ci_path_loss_db(&params, d, shadow)?;
        writeln!(
            out,
            "{},{},{}",
            model_columns(&params),
            fmt.num(d),
            fmt.num(pl)
        )
        .unwrap();
    }
    Ok(out)
}

fn load_measurements(
    input: &Path,
    pdps: &BTreeMap<usize, PowerDelayProfile>,
) -> CliResult<MeasurementSet> {
    Ok(parse_measurement_csv_with_pdps(open(input)?, pdps)?)
}

/// Records grouped by (tx_id, rx_id), in input order within each group.
fn by_location(
    records: &[DirectionalRecord],
) -> BTreeMap<(String, String), Vec<DirectionalRecord>> {
    let mut groups: BTreeMap<(String, String), Vec<DirectionalRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.tx_id.clone(), r.rx_id.clone()))
            .or_default()
            .push(r.clone());
    }
    groups
}

fn best_beam_sample(group: &[DirectionalRecord]) -> CliResult<PathLossSample> {
    let mut best: Option<PathLossSample> = None;
    for r in group {
        let s = PathLossSample::new(r.distance_3d_m, directional_path_loss_db(r)?)?;
        if best.is_none_or(|b| s.path_loss_db < b.path_loss_db) {
            best = Some(s);
        }
    }
    Ok(best.expect("groups are non-empty"))
}

fn fit(args: &FitArgs, fmt: Format) -> CliResult<String> {
    let input = require(&args.input, "input")?;
    let max_pl = args.max_pl.unwrap_or(DEFAULT_MAX_PL_DB);
    let set = load_measurements(input, &BTreeMap::new())?;
    let Some(freq) = set.freq_ghz() else {
        return Err(CliError::Domain(subthz_core::Error::DegenerateFit(
            "measurement file has no records".into(),
        )));
    };

    let mut rows: Vec<(Scenario, AntennaMode, BeamSelection, Vec<PathLossSample>)> = Vec::new();
    for scenario in [Scenario::Los, Scenario::Nlos] {
        let records: Vec<DirectionalRecord> = set
            .records()
            .iter()
            .filter(|r| r.scenario == scenario)
            .cloned()
            .collect();
        if records.is_empty() {
            continue;
        }
        let groups = by_location(&records);
        let best = groups
            .values()
            .map(|g| best_beam_sample(g))
            .collect::<CliResult<Vec<_>>>()?;
        let directional_beam = BeamSelection::default_for(scenario, AntennaMode::Directional);
        rows.push((scenario, AntennaMode::Directional, directional_beam, best));
        if scenario == Scenario::Nlos {
            let all = records
                .iter()
                .map(|r| {
                    Ok(PathLossSample::new(
                        r.distance_3d_m,
                        directional_path_loss_db(r)?,
                    )?)
                })
                .collect::<CliResult<Vec<_>>>()?;
            rows.push((
                scenario,
                AntennaMode::Directional,
                BeamSelection::Arbitrary,
                all,
            ));
        }
        let omni = groups
            .values()
            .map(|g| {
                let o = synthesize_omni(g)?;
                Ok(PathLossSample::new(
                    g[0].distance_3d_m,
                    o.omni_path_loss_db,
                )?)
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push((
            scenario,
            AntennaMode::Omnidirectional,
            BeamSelection::NotApplicable,
            omni,
        ));
    }
    // directional rows first, then omni
    rows.sort_by_key(|(s, m, b, _)| {
        (
            *m == AntennaMode::Omnidirectional,
            *s == Scenario::Nlos,
            *b == BeamSelection::Arbitrary,
        )
    });

    let mut out = String::from(
        "scenario,antenna_mode,beam_selection,ple_n,sigma_db,sample_count,censored_count,censoring_warning\n",
    );
    for (scenario, mode, beam, samples) in rows {
        let r: CiFitResult = fit_with_censoring_report(&samples, freq, max_pl)?;
        writeln!(
            out,
            "{scenario},{mode},{beam},{},{},{},{},{}",
            fmt.num(r.ple_n),
            fmt.num(r.sigma_db),
            r.sample_count,
            r.censored_count,
            r.censoring_warning
        )
        .unwrap();
    }
    Ok(out)
}

fn parse_pdp_args(args: &[String]) -> CliResult<BTreeMap<usize, PowerDelayProfile>> {
    let mut map = BTreeMap::new();
    for arg in args {
        let (row, path) = arg
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--pdp expects ROW=PATH, got '{arg}'")))?;
        let row: usize = parse_flag("pdp", row.trim())?;
        let path = PathBuf::from(path);
        let pdp = parse_pdp_file(open(&path)?)?;
        if map.insert(row, pdp).is_some() {
            return Err(CliError::usage(format!("--pdp given twice for row {row}")));
        }
    }
    Ok(map)
}

fn synth(args: &SynthArgs, fmt: Format) -> CliResult<String> {
    let input = require(&args.input, "input")?;
    let pdps = parse_pdp_args(&args.pdps)?;
    let set = load_measurements(input, &pdps)?;
    let mut out = String::from("tx_id,rx_id,omni_path_loss_db,contributing,deduplicated\n");
    for ((tx, rx), group) in by_location(set.records()) {
        let o = synthesize_omni(&group)?;
        writeln!(
            out,
            "{tx},{rx},{},{},{}",
            fmt.num(o.omni_path_loss_db),
            o.contributing_records,
            o.deduplicated_records
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RooftopFoliage {
    canopy_depth_m: Option<f64>,
    attenuation_rate_db_per_m: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RooftopLinkSpec {
    label: String,
    distance_m: f64,
    elevation_deg: f64,
    foliage_blocked: bool,
    measured_dbm: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RooftopScenario {
    budget: Option<LinkBudget>,
    #[serde(default)]
    foliage: RooftopFoliage,
    links: Vec<RooftopLinkSpec>,
}

fn rooftop(args: &RooftopArgs, fmt: Format) -> CliResult<String> {
    let path = require(&args.config, "config")?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot open {}: {e}", path.display())))?;
    let scenario: RooftopScenario = serde_json::from_str(&text)
        .map_err(|e| CliError::usage(format!("invalid rooftop config {}: {e}", path.display())))?;
    let budget = scenario.budget.unwrap_or_else(LinkBudget::rooftop_142ghz);
    budget.validate()?;
    let mut model = FoliageModel::at_142ghz();
    if let Some(depth) = scenario.foliage.canopy_depth_m {
        model.canopy_depth_m = depth;
    }
    if let Some(rate) = scenario.foliage.attenuation_rate_db_per_m {
        model = model.with_rate(rate);
    }
    model.validate()?;

    let mut rows: [Vec<String>; 7] = [
        vec!["tx".into()],
        vec!["distance_m".into()],
        vec!["elevation_deg".into()],
        vec!["pr_fs_dbm".into()],
        vec!["pr_pred_dbm".into()],
        vec!["pr_measured_dbm".into()],
        vec!["foliage_loss_db".into()],
    ];
    for link in &scenario.links {
        let fs = received_power_fs_dbm(&budget, link.distance_m)?;
        let pred = if link.foliage_blocked {
            predict_received_power_foliage_dbm(
                &budget,
                link.distance_m,
                link.elevation_deg,
                &model,
            )?
        } else {
            fs
        };
        let reference = link.measured_dbm.unwrap_or(pred);
        rows[0].push(link.label.clone());
        rows[1].push(fmt.num(link.distance_m));
        rows[2].push(fmt.num(link.elevation_deg));
        rows[3].push(fmt.num(fs));
        rows[4].push(fmt.num(pred));
        rows[5].push(fmt.opt(link.measured_dbm));
        rows[6].push(fmt.num(fs - reference));
    }
    Ok(rows.iter().map(|r| r.join(",") + "\n").collect())
}

fn foliage(args: &FoliageArgs, seed: u64, fmt: Format) -> CliResult<String> {
    let mut model = FoliageModel::at_142ghz();
    if let Some(depth) = args.depth {
        model.canopy_depth_m = depth;
    }
    if let Some(rate) = args.rate {
        model = model.with_rate(rate);
    }
    model.validate()?;

    let mut out = String::new();
    if args.statistical {
        let sampler = model.loss_sampler()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        out.push_str("sample,foliage_loss_db\n");
        for i in 0..args.samples.unwrap_or(DEFAULT_FOLIAGE_SAMPLES) {
            writeln!(out, "{i},{}", fmt.num(sampler.sample(&mut rng))).unwrap();
        }
        return Ok(out);
    }
    let elevations: &[f64] = if args.elevations.is_empty() {
        &DEFAULT_ELEVATIONS_DEG
    } else {
        &args.elevations
    };
    out.push_str("elevation_deg,slant_length_m,foliage_loss_db\n");
    for &el in elevations {
        let slant = foliage_slant_length_m(el, model.canopy_depth_m)?;
        let loss = foliage_loss_db(&model, slant)?;
        writeln!(out, "{},{},{}", fmt.num(el), fmt.num(slant), fmt.num(loss)).unwrap();
    }
    Ok(out)
}

fn sweep(args: &CoverageArgs) -> CliResult<Vec<f64>> {
    if !args.distances.is_empty() {
        return Ok(args.distances.clone());
    }
    let start = args.d_start.unwrap_or(10.0);
    let stop = args.d_stop.unwrap_or(500.0);
    let step = args.d_step.unwrap_or(10.0);
    if !(step.is_finite() && step > 0.0) {
        return Err(CliError::usage(format!("--d-step must be > 0, got {step}")));
    }
    if !(start.is_finite() && stop.is_finite() && stop >= start) {
        return Err(CliError::usage(format!(
            "sweep needs finite --d-start <= --d-stop, got {start}..{stop}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as u64 + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn coverage(args: &CoverageArgs, seed: u64, fmt: Format) -> CliResult<String> {
    let params = select_model(
        &args.model,
        Some(Scenario::Nlos),
        Some(AntennaMode::Omnidirectional),
    )?;
    let mut budget = LinkBudget::sounder_142ghz();
    budget.freq_ghz = params.freq_ghz;
    if let Some(max_pl) = args.max_pl {
        budget.max_measurable_pl_db = max_pl;
    }
    budget.validate()?;
    if let Some(eirp) = args.eirp {
        budget = budget.with_eirp_dbm(eirp)?;
    }
    let distances = sweep(args)?;
    let samples = args.samples.unwrap_or(DEFAULT_MC_SAMPLES);
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let range = args
        .outage_target
        .map(|t| max_range_m(&params, &budget, t))
        .transpose()?;

    let mut out = String::from("distance_m,pl_db,outage_mc,outage_analytic");
    if range.is_some() {
        out.push_str(",max_range_m");
    }
    out.push('\n');
    for d in distances {
        let query = OutageQuery {
            params,
            budget,
            distance_m: d,
            sample_count: samples,
            seed,
        };
        let mc = outage_probability_mc_with_workers(&query, workers)?;
        let analytic = analytic_outage_probability(&params, &budget, d)?;
        let pl = ci_path_loss_db(&params, d, 0.0)?;
        write!(
            out,
            "{},{},{},{}",
            fmt.num(d),
            fmt.num(pl),
            fmt.prob(mc.outage_probability),
            fmt.prob(analytic)
        )
        .unwrap();
        if let Some(r) = range {
            write!(out, ",{}", fmt.num(r)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}
