//! Fixed-intercept MMSE fitting of the CI model.
//!
//! With the intercept pinned at `FSPL(f, 1 m)`, the exponent has a closed
//! form. Writing `a_i = PL_i - FSPL(f, 1 m)` and `b_i = 10 log10(d_i)`:
//!
//! ```text
//! n     = sum(a_i b_i) / sum(b_i^2)
//! sigma = sqrt(sum((a_i - n b_i)^2) / N)
//! ```
//!
//! Links whose loss exceeds the measurable dynamic range never produce a
//! sample, so a fit over detected links is biased low. The censoring-aware
//! entry point excludes such samples and reports how many were dropped.

use serde::{Deserialize, Serialize};

use crate::channel_data::REFERENCE_DISTANCE_M;
use crate::error::{Error, Result};
use crate::pathloss::fspl_db;
use crate::units::compensated_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossSample {
    pub distance_m: f64,
    /// Path loss with antenna gains removed.
    pub path_loss_db: f64,
    /// At or beyond the measurable path loss.
    pub censored: bool,
}

impl PathLossSample {
    pub fn new(distance_m: f64, path_loss_db: f64) -> Result<Self> {
        let s = Self {
            distance_m,
            path_loss_db,
            censored: false,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance_m.is_finite() && self.distance_m >= REFERENCE_DISTANCE_M) {
            return Err(Error::invalid(
                "path loss sample",
                format!(
                    "distance {} m is below the reference distance",
                    self.distance_m
                ),
            ));
        }
        if !self.path_loss_db.is_finite() {
            return Err(Error::invalid(
                "path loss sample",
                format!("path loss {} dB", self.path_loss_db),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiFitResult {
    pub ple_n: f64,
    pub sigma_db: f64,
    /// Samples that entered the fit.
    pub sample_count: usize,
    pub censored_count: usize,
    pub censoring_warning: bool,
}

impl CiFitResult {
    /// True when censored links were excluded, so `ple_n` underestimates
    /// the exponent of the full population.
    pub fn is_lower_biased(&self) -> bool {
        self.censored_count > 0
    }
}

/// Fits every sample as given. Samples flagged `censored` still enter the
/// fit; they only raise the warning. Use [`fit_with_censoring_report`] to
/// exclude them.
pub fn fit_ci_mmse(samples: &[PathLossSample], freq_ghz: f64) -> Result<CiFitResult> {
    if samples.is_empty() {
        return Err(Error::DegenerateFit("no samples".into()));
    }
    for s in samples {
        s.validate()?;
    }
    let anchor = fspl_db(freq_ghz, REFERENCE_DISTANCE_M)?;

    let terms = || {
        samples
            .iter()
            .map(move |s| (s.path_loss_db - anchor, 10.0 * s.distance_m.log10()))
    };
    let sum_bb = compensated_sum(terms().map(|(_, b)| b * b));
    if sum_bb == 0.0 {
        return Err(Error::DegenerateFit(
            "all samples sit at the 1 m reference distance".into(),
        ));
    }
    let sum_ab = compensated_sum(terms().map(|(a, b)| a * b));
    let ple_n = sum_ab / sum_bb;
    let sse = compensated_sum(terms().map(|(a, b)| (a - ple_n * b).powi(2)));
    let sigma_db = (sse / samples.len() as f64).sqrt();

    let censored_count = samples.iter().filter(|s| s.censored).count();
    Ok(CiFitResult {
        ple_n,
        sigma_db,
        sample_count: samples.len(),
        censored_count,
        censoring_warning: censored_count > 0,
    })
}

/// Marks samples at or above `max_measurable_pl_db` as censored, drops them
/// (together with samples already flagged) and fits the rest.
pub fn fit_with_censoring_report(
    samples: &[PathLossSample],
    freq_ghz: f64,
    max_measurable_pl_db: f64,
) -> Result<CiFitResult> {
    if !(max_measurable_pl_db.is_finite() && max_measurable_pl_db > 0.0) {
        return Err(Error::domain(format!(
            "max measurable path loss must be > 0 dB, got {max_measurable_pl_db}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::DegenerateFit("no samples".into()));
    }
    let (kept, censored): (Vec<PathLossSample>, Vec<PathLossSample>) = samples
        .iter()
        .map(|s| PathLossSample {
            censored: s.censored || s.path_loss_db >= max_measurable_pl_db,
            ..*s
        })
        .partition(|s| !s.censored);
    if kept.is_empty() {
        return Err(Error::DegenerateFit(format!(
            "all {} samples are at or beyond {max_measurable_pl_db} dB",
            samples.len()
        )));
    }
    let mut fit = fit_ci_mmse(&kept, freq_ghz)?;
    fit.censored_count = censored.len();
    fit.censoring_warning = !censored.is_empty();
    Ok(fit)
}
