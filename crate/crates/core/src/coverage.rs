//! Outage under lognormal shadow fading.
//!
//! A link is in outage when its shadowed CI path loss exceeds the budget's
//! measurable path loss. With Gaussian shadowing of deviation `sigma` the
//! outage probability at distance `d` is `Q((PL_max - PL(d)) / sigma)`.
//!
//! Monte Carlo draws use one ChaCha stream per sample index under a fixed
//! key derived from the seed. Any split of the index range across worker
//! threads therefore sees the same draws, and outages are reduced as integer
//! counts, so results are bit-identical for every degree of parallelism.

use std::num::NonZeroUsize;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::channel_data::{Scenario, REFERENCE_DISTANCE_M};
use crate::error::{Error, Result};
use crate::linkbudget::LinkBudget;
use crate::pathloss::{
    ci_path_loss_db, AntennaMode, Band, BeamSelection, CiModelParams, ModelKey, ModelRegistry,
};

/// Upper tail of the standard normal distribution.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Counter-based zero-mean Gaussian shadow fading.
#[derive(Debug, Clone)]
pub struct ShadowSampler {
    sigma_db: f64,
    base: ChaCha8Rng,
}

impl ShadowSampler {
    pub fn new(sigma_db: f64, seed: u64) -> Result<Self> {
        if !(sigma_db.is_finite() && sigma_db >= 0.0) {
            return Err(Error::domain(format!("shadow sigma {sigma_db} dB")));
        }
        Ok(Self {
            sigma_db,
            base: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Sampler for a model; fails when the model has no published deviation.
    pub fn for_model(params: &CiModelParams, seed: u64) -> Result<Self> {
        Self::new(params.require_sigma()?, seed)
    }

    pub fn sigma_db(&self) -> f64 {
        self.sigma_db
    }

    /// The draw for sample `index`; depends only on the seed and the index.
    pub fn sample(&self, index: u64) -> f64 {
        let mut rng = self.base.clone();
        rng.set_stream(index);
        rng.set_word_pos(0);
        let z: f64 = StandardNormal.sample(&mut rng);
        z * self.sigma_db
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageQuery {
    pub params: CiModelParams,
    pub budget: LinkBudget,
    pub distance_m: f64,
    pub sample_count: u64,
    pub seed: u64,
}

impl OutageQuery {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.params.require_sigma()?;
        self.budget.validate()?;
        if !(self.distance_m.is_finite() && self.distance_m >= REFERENCE_DISTANCE_M) {
            return Err(Error::domain(format!(
                "distance must be >= {REFERENCE_DISTANCE_M} m, got {}",
                self.distance_m
            )));
        }
        if self.sample_count == 0 {
            return Err(Error::domain("sample count must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageResult {
    pub outage_probability: f64,
    pub analytic_probability: f64,
    pub samples: u64,
    pub max_range_m: Option<f64>,
}

/// Closed-form outage probability. A zero deviation gives a step: outage
/// only when the median loss exceeds the budget.
pub fn analytic_outage_probability(
    params: &CiModelParams,
    budget: &LinkBudget,
    distance_m: f64,
) -> Result<f64> {
    let sigma = params.require_sigma()?;
    outage_with_sigma(params, budget, distance_m, sigma)
}

fn outage_with_sigma(
    params: &CiModelParams,
    budget: &LinkBudget,
    distance_m: f64,
    sigma: f64,
) -> Result<f64> {
    let margin = budget.max_measurable_pl_db - ci_path_loss_db(params, distance_m, 0.0)?;
    if sigma == 0.0 {
        return Ok(if margin < 0.0 { 1.0 } else { 0.0 });
    }
    Ok(gaussian_q(margin / sigma))
}

/// Monte Carlo outage using all available cores.
pub fn outage_probability_mc(query: &OutageQuery) -> Result<OutageResult> {
    let workers = std::thread::available_parallelism().map_or(1, NonZeroUsize::get);
    outage_probability_mc_with_workers(query, workers)
}

/// Monte Carlo outage split over `workers` threads. The result does not
/// depend on `workers`.
pub fn outage_probability_mc_with_workers(
    query: &OutageQuery,
    workers: usize,
) -> Result<OutageResult> {
    query.validate()?;
    let sampler = ShadowSampler::for_model(&query.params, query.seed)?;
    let median = ci_path_loss_db(&query.params, query.distance_m, 0.0)?;
    let limit = query.budget.max_measurable_pl_db;
    let n = query.sample_count;
    let workers = (workers.max(1) as u64).min(n);

    let count_range = |lo: u64, hi: u64| -> u64 {
        (lo..hi)
            .filter(|&i| median + sampler.sample(i) > limit)
            .count() as u64
    };

    let outages: u64 = if workers == 1 {
        count_range(0, n)
    } else {
        let chunk = n.div_ceil(workers);
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = (w * chunk).min(n);
                    let hi = ((w + 1) * chunk).min(n);
                    let count_range = &count_range;
                    scope.spawn(move || count_range(lo, hi))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("outage worker panicked"))
                .sum()
        })
    };

    Ok(OutageResult {
        outage_probability: outages as f64 / n as f64,
        analytic_probability: analytic_outage_probability(
            &query.params,
            &query.budget,
            query.distance_m,
        )?,
        samples: n,
        max_range_m: None,
    })
}

const RANGE_RESOLUTION_M: f64 = 1e-3;
const RANGE_CEILING_M: f64 = 1e9;

/// Largest distance whose analytic outage stays at or below
/// `outage_target`, by bisection.
///
/// Models without a published deviation are accepted only for a zero
/// target, where the median loss decides. A zero target with a positive
/// deviation is unreachable because the Gaussian tail never vanishes.
pub fn max_range_m(params: &CiModelParams, budget: &LinkBudget, outage_target: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&outage_target) {
        return Err(Error::domain(format!(
            "outage target must lie in [0, 1), got {outage_target}"
        )));
    }
    let sigma = match params.sigma_db {
        None if outage_target == 0.0 => 0.0,
        None => return Err(params.require_sigma().unwrap_err()),
        Some(s) if s > 0.0 && outage_target == 0.0 => {
            return Err(Error::domain(
                "zero outage is unreachable with Gaussian shadowing (sigma > 0)",
            ))
        }
        Some(s) => s,
    };
    let ok = |d: f64| -> Result<bool> {
        Ok(outage_with_sigma(params, budget, d, sigma)? <= outage_target)
    };
    if !ok(REFERENCE_DISTANCE_M)? {
        return Err(Error::domain(format!(
            "outage target {outage_target} is not met even at {REFERENCE_DISTANCE_M} m"
        )));
    }
    let mut lo = REFERENCE_DISTANCE_M;
    let mut hi = 2.0 * REFERENCE_DISTANCE_M;
    while ok(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > RANGE_CEILING_M {
            return Err(Error::domain(format!(
                "range exceeds {RANGE_CEILING_M} m; the model is unbounded for this budget"
            )));
        }
    }
    while hi - lo > RANGE_RESOLUTION_M {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPrediction {
    pub band: Band,
    pub ple_n: f64,
    pub path_loss_db: f64,
    /// `None` when the band's model has no published deviation.
    pub analytic_outage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandComparisonRow {
    pub distance_m: f64,
    /// Ordered 28, 73, 142 GHz.
    pub bands: Vec<BandPrediction>,
}

/// Median path loss and analytic outage of one configuration at 28, 73 and
/// 142 GHz, per distance.
pub fn compare_bands(
    scenario: Scenario,
    antenna_mode: AntennaMode,
    beam_selection: BeamSelection,
    budget: &LinkBudget,
    distances_m: &[f64],
) -> Result<Vec<BandComparisonRow>> {
    let registry = ModelRegistry::builtin();
    let models = Band::ALL
        .into_iter()
        .map(|band| {
            registry.get(&ModelKey {
                band,
                scenario,
                antenna_mode,
                beam_selection,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    distances_m
        .iter()
        .map(|&d| {
            let bands = Band::ALL
                .iter()
                .zip(&models)
                .map(|(&band, p)| {
                    Ok(BandPrediction {
                        band,
                        ple_n: p.ple_n,
                        path_loss_db: ci_path_loss_db(p, d, 0.0)?,
                        analytic_outage: match p.sigma_db {
                            Some(s) => Some(outage_with_sigma(p, budget, d, s)?),
                            None => None,
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BandComparisonRow {
                distance_m: d,
                bands,
            })
        })
        .collect()
}
