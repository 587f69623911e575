//! Propagation models for sub-THz urban microcells.
//!
//! The crate covers the full chain from measured directional sweeps to
//! system-level predictions:
//!
//! - [`channel_data`]: measurement records, power delay profiles and their
//!   CSV / text file formats.
//! - [`pathloss`]: free space path loss, the 1 m close-in (CI) model and the
//!   built-in registry of fitted 28 / 73 / 142 GHz parameters.
//! - [`plfit`]: closed-form MMSE fitting of the path loss exponent and
//!   shadow fading deviation, with dynamic-range censoring bookkeeping.
//! - [`pdp`]: PDP thresholding, averaging, multipath extraction, time
//!   clusters, RMS delay spread and omnidirectional synthesis.
//! - [`linkbudget`]: free space link budgets, detectability, rooftop
//!   elevation geometry and foliage slant loss.
//! - [`coverage`]: Monte Carlo and analytic outage under lognormal shadowing.

pub mod channel_data;
pub mod coverage;
mod error;
pub mod linkbudget;
pub mod pathloss;
pub mod pdp;
pub mod plfit;
pub mod units;

pub use channel_data::{
    DirectionalRecord, MeasurementSet, MultipathComponent, PointingDirection, PowerDelayProfile,
    Scenario,
};
pub use coverage::{OutageQuery, OutageResult};
pub use error::{Error, Result};
pub use linkbudget::{FoliageModel, LinkBudget, RooftopGeometry};
pub use pathloss::{AntennaMode, Band, BeamSelection, CiModelParams, ModelKey, ModelRegistry};
pub use pdp::{OmniSynthesisResult, TimeCluster};
pub use plfit::{CiFitResult, PathLossSample};
