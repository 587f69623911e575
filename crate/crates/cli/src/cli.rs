use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

/// Sub-THz urban microcell propagation toolkit.
#[derive(Debug, Parser)]
#[command(name = "subthz", version)]
pub struct Cli {
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub run_config: Option<PathBuf>,

    /// Output file (written atomically). Defaults to stdout.
    #[arg(long, short, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Decimal places for dB, meters and exponents (probabilities get four more).
    #[arg(long, global = true)]
    pub precision: Option<usize>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "lowercase")]
pub enum Command {
    /// Export the built-in CI model registry.
    Registry(RegistryArgs),
    /// Evaluate CI path loss from the registry.
    Predict(PredictArgs),
    /// Fit CI exponents and shadow fading from a measurement CSV.
    Fit(FitArgs),
    /// Synthesize omnidirectional path loss per TX/RX location pair.
    Synth(SynthArgs),
    /// Free space and foliage predictions for ground-to-rooftop links.
    Rooftop(RooftopArgs),
    /// Foliage slant length and loss over elevation angles.
    Foliage(FoliageArgs),
    /// Outage probability over a distance sweep.
    Coverage(CoverageArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Registry(_) => "registry",
            Command::Predict(_) => "predict",
            Command::Fit(_) => "fit",
            Command::Synth(_) => "synth",
            Command::Rooftop(_) => "rooftop",
            Command::Foliage(_) => "foliage",
            Command::Coverage(_) => "coverage",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegistryArgs {
    /// Only this band (28, 73 or 142 GHz).
    #[arg(long)]
    pub band: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelSelect {
    /// Carrier band in GHz: 28, 73 or 142 [default: 142].
    #[arg(long)]
    pub band: Option<f64>,
    /// los or nlos.
    #[arg(long)]
    pub scenario: Option<String>,
    /// directional or omni.
    #[arg(long)]
    pub mode: Option<String>,
    /// best or arbitrary (directional NLOS only) [default: best].
    #[arg(long)]
    pub beam: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct PredictArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelSelect,
    /// 3D distance(s) in meters.
    #[arg(long = "d", value_delimiter = ',', num_args = 1..)]
    pub distances: Vec<f64>,
    /// Shadow fading realization added to the median, dB.
    #[arg(long, allow_hyphen_values = true)]
    pub shadow: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitArgs {
    /// Measurement CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Path loss at or beyond which samples are censored [default: 152].
    #[arg(long)]
    pub max_pl: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthArgs {
    /// Measurement CSV.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// PDP file for a data row, as ROW=PATH (1-based row). Repeatable.
    #[arg(long = "pdp", value_name = "ROW=PATH")]
    pub pdps: Vec<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RooftopArgs {
    /// Scenario JSON listing links and (optionally) budget and foliage model.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FoliageArgs {
    /// Elevation angles in degrees [default: 80,70,60,50,40,30,20].
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub elevations: Vec<f64>,
    /// Canopy depth in meters [default: 5].
    #[arg(long)]
    pub depth: Option<f64>,
    /// Attenuation rate in dB/m [default: 0.9].
    #[arg(long)]
    pub rate: Option<f64>,
    /// Draw losses from the statistical (6.9 dB mean, 3.0 dB sd) model instead.
    #[arg(long)]
    pub statistical: bool,
    /// Number of statistical draws [default: 1000].
    #[arg(long)]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CoverageArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub model: ModelSelect,
    /// Override the transmitter EIRP in dBm (sounder default 27).
    #[arg(long, allow_hyphen_values = true)]
    pub eirp: Option<f64>,
    /// Measurable path loss at the default EIRP [default: 152].
    #[arg(long)]
    pub max_pl: Option<f64>,
    /// Explicit distances in meters.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub distances: Vec<f64>,
    /// Sweep start in meters (used when --distances is absent) [default: 10].
    #[arg(long)]
    pub d_start: Option<f64>,
    /// Sweep stop in meters, inclusive [default: 500].
    #[arg(long)]
    pub d_stop: Option<f64>,
    /// Sweep step in meters [default: 10].
    #[arg(long)]
    pub d_step: Option<f64>,
    /// Monte Carlo samples per distance [default: 100000].
    #[arg(long)]
    pub samples: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Also report the largest range meeting this outage probability.
    #[arg(long)]
    pub outage_target: Option<f64>,
}
