//! Free space link budgets, sounder detectability, rooftop geometry and
//! foliage slant loss.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel_data::REFERENCE_DISTANCE_M;
use crate::error::{Error, Result};
use crate::pathloss::fspl_db;

/// Transmit power, antenna gains and dynamic range of a link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub freq_ghz: f64,
    /// Largest gain-removed path loss the receiver can still detect.
    pub max_measurable_pl_db: f64,
    pub snr_threshold_db: f64,
}

impl LinkBudget {
    pub fn new(
        tx_power_dbm: f64,
        tx_gain_dbi: f64,
        rx_gain_dbi: f64,
        freq_ghz: f64,
        max_measurable_pl_db: f64,
        snr_threshold_db: f64,
    ) -> Result<Self> {
        let b = Self {
            tx_power_dbm,
            tx_gain_dbi,
            rx_gain_dbi,
            freq_ghz,
            max_measurable_pl_db,
            snr_threshold_db,
        };
        b.validate()?;
        Ok(b)
    }

    /// The 142 GHz sliding-correlator sounder: 0 dBm into 27 dBi horns at
    /// both ends (27 dBm EIRP), 152 dB measurable path loss at 5 dB SNR.
    pub fn sounder_142ghz() -> Self {
        Self {
            tx_power_dbm: 0.0,
            tx_gain_dbi: 27.0,
            rx_gain_dbi: 27.0,
            freq_ghz: 142.0,
            max_measurable_pl_db: 152.0,
            snr_threshold_db: 5.0,
        }
    }

    /// Rooftop campaign settings: the sounder at -2 dBm transmit power.
    pub fn rooftop_142ghz() -> Self {
        Self {
            tx_power_dbm: -2.0,
            ..Self::sounder_142ghz()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.tx_power_dbm,
            self.tx_gain_dbi,
            self.rx_gain_dbi,
            self.snr_threshold_db,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("link budget", "non-finite field"));
        }
        if !(self.freq_ghz.is_finite() && self.freq_ghz > 0.0) {
            return Err(Error::invalid(
                "link budget",
                format!("freq_ghz = {}", self.freq_ghz),
            ));
        }
        if !(self.max_measurable_pl_db.is_finite() && self.max_measurable_pl_db > 0.0) {
            return Err(Error::invalid(
                "link budget",
                format!("max_measurable_pl_db = {}", self.max_measurable_pl_db),
            ));
        }
        Ok(())
    }

    pub fn eirp_dbm(&self) -> f64 {
        self.tx_power_dbm + self.tx_gain_dbi
    }

    /// Weakest received power (antenna gains included) still detected.
    pub fn min_detectable_power_dbm(&self) -> f64 {
        self.tx_power_dbm + self.tx_gain_dbi + self.rx_gain_dbi - self.max_measurable_pl_db
    }

    /// Same receiver with the transmit power changed to reach `eirp_dbm`.
    /// The receiver sensitivity is fixed, so the measurable path loss moves
    /// one-for-one with the EIRP.
    pub fn with_eirp_dbm(&self, eirp_dbm: f64) -> Result<Self> {
        let delta = eirp_dbm - self.eirp_dbm();
        let b = Self {
            tx_power_dbm: self.tx_power_dbm + delta,
            max_measurable_pl_db: self.max_measurable_pl_db + delta,
            ..*self
        };
        b.validate()?;
        Ok(b)
    }
}

/// Received power assuming free space propagation between the budget's
/// antennas.
pub fn received_power_fs_dbm(budget: &LinkBudget, distance_m: f64) -> Result<f64> {
    if !(distance_m.is_finite() && distance_m >= REFERENCE_DISTANCE_M) {
        return Err(Error::domain(format!(
            "distance must be >= {REFERENCE_DISTANCE_M} m, got {distance_m}"
        )));
    }
    Ok(
        budget.tx_power_dbm + budget.tx_gain_dbi + budget.rx_gain_dbi
            - fspl_db(budget.freq_ghz, distance_m)?,
    )
}

/// Inclusive: a path loss equal to the measurable maximum is detectable.
pub fn detectable(budget: &LinkBudget, path_loss_db: f64) -> bool {
    path_loss_db <= budget.max_measurable_pl_db
}

/// Ground terminal to rooftop receiver geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RooftopGeometry {
    pub rx_height_m: f64,
    pub tx_height_m: f64,
    pub boresight_elevation_deg: f64,
    pub slant_distance_m: f64,
}

impl RooftopGeometry {
    pub const DEFAULT_RX_HEIGHT_M: f64 = 38.2;
    pub const DEFAULT_TX_HEIGHT_M: f64 = 1.5;

    pub fn new(
        rx_height_m: f64,
        tx_height_m: f64,
        boresight_elevation_deg: f64,
        slant_distance_m: f64,
    ) -> Result<Self> {
        if !(boresight_elevation_deg > 0.0 && boresight_elevation_deg <= 90.0) {
            return Err(Error::invalid(
                "rooftop geometry",
                format!("elevation {boresight_elevation_deg} deg outside (0, 90]"),
            ));
        }
        if !(slant_distance_m.is_finite() && slant_distance_m > 0.0) {
            return Err(Error::invalid(
                "rooftop geometry",
                format!("slant distance {slant_distance_m} m"),
            ));
        }
        let dh = rx_height_m - tx_height_m;
        if boresight_elevation_deg == 90.0 && slant_distance_m < dh {
            return Err(Error::invalid(
                "rooftop geometry",
                format!("vertical link of {slant_distance_m} m is shorter than the {dh} m height difference"),
            ));
        }
        Ok(Self {
            rx_height_m,
            tx_height_m,
            boresight_elevation_deg,
            slant_distance_m,
        })
    }

    /// Geometry for a TX on flat ground at `ground_distance_m` from the
    /// building, using the default heights.
    pub fn from_ground_distance(ground_distance_m: f64) -> Result<Self> {
        let (el, slant) = elevation_from_geometry(
            Self::DEFAULT_RX_HEIGHT_M,
            Self::DEFAULT_TX_HEIGHT_M,
            ground_distance_m,
        )?;
        Self::new(
            Self::DEFAULT_RX_HEIGHT_M,
            Self::DEFAULT_TX_HEIGHT_M,
            el,
            slant,
        )
    }
}

/// Flat-ground elevation angle and slant distance from heights and ground
/// separation. Returns `(elevation_deg, slant_distance_m)`.
pub fn elevation_from_geometry(
    rx_height_m: f64,
    tx_height_m: f64,
    ground_distance_m: f64,
) -> Result<(f64, f64)> {
    if !(ground_distance_m.is_finite() && ground_distance_m > 0.0) {
        return Err(Error::domain(format!(
            "ground distance must be > 0 m, got {ground_distance_m}"
        )));
    }
    let dh = rx_height_m - tx_height_m;
    if !(dh.is_finite() && dh > 0.0) {
        return Err(Error::domain(format!(
            "receiver ({rx_height_m} m) must be above transmitter ({tx_height_m} m)"
        )));
    }
    Ok((
        dh.atan2(ground_distance_m).to_degrees(),
        dh.hypot(ground_distance_m),
    ))
}

/// Homogeneous canopy slab with a per-meter attenuation rate, plus the
/// measured loss statistics for the stochastic form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoliageModel {
    pub canopy_depth_m: f64,
    pub attenuation_rate_db_per_m: f64,
    pub statistical_mean_db: f64,
    pub statistical_sd_db: f64,
}

impl Default for FoliageModel {
    fn default() -> Self {
        Self::at_142ghz()
    }
}

impl FoliageModel {
    pub const DEFAULT_CANOPY_DEPTH_M: f64 = 5.0;

    pub fn new(
        canopy_depth_m: f64,
        attenuation_rate_db_per_m: f64,
        statistical_mean_db: f64,
        statistical_sd_db: f64,
    ) -> Result<Self> {
        let m = Self {
            canopy_depth_m,
            attenuation_rate_db_per_m,
            statistical_mean_db,
            statistical_sd_db,
        };
        m.validate()?;
        Ok(m)
    }

    /// Birch canopy at 142 GHz: 0.9 dB/m, 6.9 dB mean loss, 3.0 dB sd.
    pub fn at_142ghz() -> Self {
        Self {
            canopy_depth_m: Self::DEFAULT_CANOPY_DEPTH_M,
            attenuation_rate_db_per_m: 0.9,
            statistical_mean_db: 6.9,
            statistical_sd_db: 3.0,
        }
    }

    /// 0.4 dB/m at 73 GHz. Loss statistics are kept from 142 GHz; only the
    /// deterministic rate was reported at this band.
    pub fn at_73ghz() -> Self {
        Self {
            attenuation_rate_db_per_m: 0.4,
            ..Self::at_142ghz()
        }
    }

    /// Unobstructed link.
    pub fn clear() -> Self {
        Self {
            attenuation_rate_db_per_m: 0.0,
            statistical_mean_db: 0.0,
            statistical_sd_db: 0.0,
            ..Self::at_142ghz()
        }
    }

    pub fn with_rate(mut self, rate_db_per_m: f64) -> Self {
        self.attenuation_rate_db_per_m = rate_db_per_m;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.canopy_depth_m.is_finite() && self.canopy_depth_m > 0.0) {
            return Err(Error::invalid(
                "foliage model",
                format!("canopy depth {} m", self.canopy_depth_m),
            ));
        }
        for (name, v) in [
            ("attenuation rate", self.attenuation_rate_db_per_m),
            ("statistical mean", self.statistical_mean_db),
            ("statistical sd", self.statistical_sd_db),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid("foliage model", format!("{name} = {v}")));
            }
        }
        Ok(())
    }

    /// Sampler for the statistical (mean / sd) foliage loss.
    pub fn loss_sampler(&self) -> Result<FoliageLossSampler> {
        self.validate()?;
        let normal = Normal::new(self.statistical_mean_db, self.statistical_sd_db)
            .map_err(|e| Error::invalid("foliage model", e.to_string()))?;
        Ok(FoliageLossSampler { normal })
    }
}

/// Gaussian foliage loss in dB. Draws are not clipped at zero.
#[derive(Debug, Clone, Copy)]
pub struct FoliageLossSampler {
    normal: Normal<f64>,
}

impl FoliageLossSampler {
    pub fn mean_db(&self) -> f64 {
        self.normal.mean()
    }

    pub fn sd_db(&self) -> f64 {
        self.normal.std_dev()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.normal.sample(rng)
    }
}

/// Path length through a canopy slab of `canopy_depth_m` at the given
/// elevation angle.
pub fn foliage_slant_length_m(elevation_deg: f64, canopy_depth_m: f64) -> Result<f64> {
    if !(elevation_deg > 0.0 && elevation_deg <= 90.0) {
        return Err(Error::domain(format!(
            "elevation must lie in (0, 90] deg, got {elevation_deg}"
        )));
    }
    if !(canopy_depth_m.is_finite() && canopy_depth_m > 0.0) {
        return Err(Error::domain(format!("canopy depth {canopy_depth_m} m")));
    }
    if elevation_deg == 90.0 {
        return Ok(canopy_depth_m);
    }
    Ok(canopy_depth_m / elevation_deg.to_radians().sin())
}

/// Deterministic foliage loss: rate times slant length.
pub fn foliage_loss_db(model: &FoliageModel, slant_length_m: f64) -> Result<f64> {
    if !(slant_length_m.is_finite() && slant_length_m >= 0.0) {
        return Err(Error::domain(format!(
            "slant length must be >= 0 m, got {slant_length_m}"
        )));
    }
    model.validate()?;
    Ok(model.attenuation_rate_db_per_m * slant_length_m)
}

/// Free space received power minus the deterministic foliage loss along the
/// slant path at `elevation_deg`.
pub fn predict_received_power_foliage_dbm(
    budget: &LinkBudget,
    distance_m: f64,
    elevation_deg: f64,
    model: &FoliageModel,
) -> Result<f64> {
    let free_space = received_power_fs_dbm(budget, distance_m)?;
    let slant = foliage_slant_length_m(elevation_deg, model.canopy_depth_m)?;
    Ok(free_space - foliage_loss_db(model, slant)?)
}

/// One ground-to-rooftop link of the 142 GHz rooftop campaign, with the
/// reported free space prediction and measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RooftopLink {
    pub label: &'static str,
    pub distance_m: f64,
    pub elevation_deg: f64,
    pub foliage_blocked: bool,
    pub reported_pr_fs_dbm: f64,
    pub measured_pr_dbm: f64,
    pub reported_foliage_loss_db: f64,
}

const fn link(
    label: &'static str,
    distance_m: f64,
    elevation_deg: f64,
    foliage_blocked: bool,
    reported_pr_fs_dbm: f64,
    measured_pr_dbm: f64,
    reported_foliage_loss_db: f64,
) -> RooftopLink {
    RooftopLink {
        label,
        distance_m,
        elevation_deg,
        foliage_blocked,
        reported_pr_fs_dbm,
        measured_pr_dbm,
        reported_foliage_loss_db,
    }
}

/// Rooftop campaign links at 142 GHz (-2 dBm, 27 dBi horns at both ends).
/// TX1-TX7 pass through birch foliage; TX8-TX10 are clear calibration links.
pub const ROOFTOP_LINKS_142GHZ: [RooftopLink; 10] = [
    link("TX1", 38.5, 80.0, true, -55.2, -60.2, 5.0),
    link("TX2", 40.4, 70.0, true, -55.6, -62.0, 6.4),
    link("TX3", 43.9, 60.0, true, -56.3, -59.3, 3.0),
    link("TX4", 49.3, 50.0, true, -57.3, -65.8, 8.5),
    link("TX5", 58.6, 40.0, true, -58.8, -63.4, 4.6),
    link("TX6", 70.6, 30.0, true, -60.5, -70.8, 10.3),
    link("TX7", 102.7, 20.0, true, -63.7, -74.5, 10.8),
    link("TX8", 178.9, 15.0, false, -68.5, -68.6, 0.1),
    link("TX9", 70.6, 30.0, false, -60.5, -60.9, 0.4),
    link("TX10", 102.7, 20.0, false, -63.7, -64.3, 0.6),
];
