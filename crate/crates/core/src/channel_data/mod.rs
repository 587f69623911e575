//! Measurement domain types and their exchange formats.
//!
//! Angles are always in degrees. Powers are dBm at interfaces; PDP bins are
//! stored as linear milliwatts so averaging and integration stay linear.

mod measurement_csv;
mod pdp_file;

pub use measurement_csv::{
    parse_measurement_csv, parse_measurement_csv_with_pdps, write_measurement_csv,
    MEASUREMENT_CSV_HEADER,
};
pub use pdp_file::{parse_pdp_file, write_pdp_file};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{dbm_to_mw, mw_to_dbm};

/// Default delay resolution of synthetic PDPs, the reciprocal of a 500 MHz
/// baseband bandwidth.
pub const DEFAULT_BIN_WIDTH_NS: f64 = 2.0;

/// Reference distance of the close-in model. Records closer than this are
/// rejected.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// Antenna boresight direction. Azimuth is normalized to `[0, 360)`,
/// elevation is measured from the horizon (positive = uptilt).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointingDirection {
    azimuth_deg: f64,
    elevation_deg: f64,
}

impl PointingDirection {
    pub fn new(azimuth_deg: f64, elevation_deg: f64) -> Result<Self> {
        if !azimuth_deg.is_finite() {
            return Err(Error::invalid(
                "azimuth",
                format!("{azimuth_deg} is not finite"),
            ));
        }
        if !(-90.0..=90.0).contains(&elevation_deg) {
            return Err(Error::invalid(
                "elevation",
                format!("{elevation_deg} deg outside [-90, 90]"),
            ));
        }
        let mut az = azimuth_deg.rem_euclid(360.0);
        // rem_euclid can round up to exactly 360 for tiny negative inputs
        if az >= 360.0 {
            az = 0.0;
        }
        Ok(Self {
            azimuth_deg: az,
            elevation_deg,
        })
    }

    pub fn azimuth_deg(&self) -> f64 {
        self.azimuth_deg
    }

    pub fn elevation_deg(&self) -> f64 {
        self.elevation_deg
    }

    /// Smallest absolute azimuth difference, in `[0, 180]`.
    pub fn azimuth_separation_deg(&self, other: &Self) -> f64 {
        let d = (self.azimuth_deg - other.azimuth_deg).abs();
        d.min(360.0 - d)
    }

    pub fn elevation_separation_deg(&self, other: &Self) -> f64 {
        (self.elevation_deg - other.elevation_deg).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "LOS")]
    Los,
    #[serde(rename = "NLOS")]
    Nlos,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Los => "LOS",
            Scenario::Nlos => "NLOS",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "LOS" => Ok(Scenario::Los),
            "NLOS" => Ok(Scenario::Nlos),
            other => Err(Error::invalid(
                "scenario",
                format!("'{other}' (expected LOS or NLOS)"),
            )),
        }
    }
}

/// Uniformly binned power delay profile. Bin `i` sits at
/// `start_delay_ns + i * bin_width_ns`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerDelayProfile {
    start_delay_ns: f64,
    bin_width_ns: f64,
    power_mw: Vec<f64>,
    noise_floor_dbm: f64,
}

impl PowerDelayProfile {
    pub fn new(
        start_delay_ns: f64,
        bin_width_ns: f64,
        power_mw: Vec<f64>,
        noise_floor_dbm: f64,
    ) -> Result<Self> {
        if !(start_delay_ns.is_finite() && start_delay_ns >= 0.0) {
            return Err(Error::invalid(
                "pdp",
                format!("start delay {start_delay_ns} ns"),
            ));
        }
        if !(bin_width_ns.is_finite() && bin_width_ns > 0.0) {
            return Err(Error::invalid(
                "pdp",
                format!("bin width {bin_width_ns} ns"),
            ));
        }
        if power_mw.is_empty() {
            return Err(Error::invalid("pdp", "no bins"));
        }
        if let Some((i, p)) = power_mw
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p >= 0.0))
        {
            return Err(Error::invalid("pdp", format!("bin {i} has power {p} mW")));
        }
        if noise_floor_dbm.is_nan() {
            return Err(Error::invalid("pdp", "noise floor is NaN"));
        }
        Ok(Self {
            start_delay_ns,
            bin_width_ns,
            power_mw,
            noise_floor_dbm,
        })
    }

    /// Builds a PDP from dBm bins; `-inf` encodes an empty bin.
    pub fn from_dbm(
        start_delay_ns: f64,
        bin_width_ns: f64,
        power_dbm: &[f64],
        noise_floor_dbm: f64,
    ) -> Result<Self> {
        let mw = power_dbm.iter().map(|&p| dbm_to_mw(p)).collect();
        Self::new(start_delay_ns, bin_width_ns, mw, noise_floor_dbm)
    }

    pub fn start_delay_ns(&self) -> f64 {
        self.start_delay_ns
    }

    pub fn bin_width_ns(&self) -> f64 {
        self.bin_width_ns
    }

    pub fn power_mw(&self) -> &[f64] {
        &self.power_mw
    }

    pub fn noise_floor_dbm(&self) -> f64 {
        self.noise_floor_dbm
    }

    pub fn len(&self) -> usize {
        self.power_mw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.power_mw.is_empty()
    }

    pub fn delay_ns(&self, bin: usize) -> f64 {
        self.start_delay_ns + bin as f64 * self.bin_width_ns
    }

    pub fn delays_ns(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|i| self.delay_ns(i))
    }

    pub fn total_power_mw(&self) -> f64 {
        crate::units::compensated_sum(self.power_mw.iter().copied())
    }

    pub fn total_power_dbm(&self) -> f64 {
        mw_to_dbm(self.total_power_mw())
    }

    /// Index of the strongest bin; ties resolve to the earliest bin.
    pub fn peak_bin(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.power_mw.iter().enumerate() {
            if p > self.power_mw[best] {
                best = i;
            }
        }
        best
    }

    /// Same grid and noise floor with new bin powers.
    pub fn with_powers(&self, power_mw: Vec<f64>) -> Result<Self> {
        Self::new(
            self.start_delay_ns,
            self.bin_width_ns,
            power_mw,
            self.noise_floor_dbm,
        )
    }

    /// Copy with every delay shifted by `delta_ns` (must keep delays non-negative).
    pub fn delayed_by(&self, delta_ns: f64) -> Result<Self> {
        Self::new(
            self.start_delay_ns + delta_ns,
            self.bin_width_ns,
            self.power_mw.clone(),
            self.noise_floor_dbm,
        )
    }

    /// True when both profiles share start delay, bin width, bin count and
    /// noise floor.
    pub fn same_grid(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.start_delay_ns == other.start_delay_ns
            && self.bin_width_ns == other.bin_width_ns
            && (self.noise_floor_dbm == other.noise_floor_dbm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipathComponent {
    pub delay_ns: f64,
    pub power_dbm: f64,
    pub direction: Option<PointingDirection>,
}

impl MultipathComponent {
    pub fn new(delay_ns: f64, power_dbm: f64) -> Result<Self> {
        if !(delay_ns.is_finite() && delay_ns >= 0.0) {
            return Err(Error::invalid(
                "multipath component",
                format!("delay {delay_ns} ns"),
            ));
        }
        Ok(Self {
            delay_ns,
            power_dbm,
            direction: None,
        })
    }

    pub fn with_direction(mut self, direction: PointingDirection) -> Self {
        self.direction = Some(direction);
        self
    }
}

/// One measured TX/RX pointing combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalRecord {
    pub tx_id: String,
    pub rx_id: String,
    pub distance_3d_m: f64,
    pub scenario: Scenario,
    pub tx_pointing: PointingDirection,
    pub rx_pointing: PointingDirection,
    pub freq_ghz: f64,
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub hpbw_deg: f64,
    pub received_power_dbm: Option<f64>,
    pub pdp: Option<PowerDelayProfile>,
}

impl DirectionalRecord {
    /// Checks every field invariant. Called by the parsers; call it after
    /// building a record by hand.
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::invalid("record", reason));
        if self.tx_id.is_empty() || self.rx_id.is_empty() {
            return bad("tx_id and rx_id must be non-empty".into());
        }
        if !self.distance_3d_m.is_finite() || self.distance_3d_m < REFERENCE_DISTANCE_M {
            return bad(format!(
                "distance_3d_m = {} is below the {REFERENCE_DISTANCE_M} m reference distance",
                self.distance_3d_m
            ));
        }
        if !(self.freq_ghz.is_finite() && self.freq_ghz > 0.0) {
            return bad(format!("freq_ghz = {}", self.freq_ghz));
        }
        if !self.tx_power_dbm.is_finite() {
            return bad(format!("tx_power_dbm = {}", self.tx_power_dbm));
        }
        if !(self.tx_gain_dbi.is_finite() && self.tx_gain_dbi >= 0.0) {
            return bad(format!("tx_gain_dbi = {}", self.tx_gain_dbi));
        }
        if !(self.rx_gain_dbi.is_finite() && self.rx_gain_dbi >= 0.0) {
            return bad(format!("rx_gain_dbi = {}", self.rx_gain_dbi));
        }
        if !(self.hpbw_deg.is_finite() && self.hpbw_deg > 0.0) {
            return bad(format!("hpbw_deg = {}", self.hpbw_deg));
        }
        match (self.received_power_dbm, &self.pdp) {
            (None, None) => return bad("neither received_power_dbm nor a PDP is present".into()),
            (Some(p), _) if !p.is_finite() => return bad(format!("received_power_dbm = {p}")),
            _ => {}
        }
        Ok(())
    }

    /// `(tx, rx)` pointing pair, used for duplicate detection.
    pub fn pointing_pair(&self) -> (PointingDirection, PointingDirection) {
        (self.tx_pointing, self.rx_pointing)
    }
}

/// A campaign's directional records, all at one carrier frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    records: Vec<DirectionalRecord>,
    campaign_label: String,
}

impl MeasurementSet {
    pub fn new(records: Vec<DirectionalRecord>, campaign_label: impl Into<String>) -> Result<Self> {
        if let Some(first) = records.first() {
            if let Some((i, r)) = records
                .iter()
                .enumerate()
                .find(|(_, r)| r.freq_ghz != first.freq_ghz)
            {
                return Err(Error::Row {
                    row: i + 1,
                    reason: format!(
                        "freq_ghz {} differs from the set frequency {}",
                        r.freq_ghz, first.freq_ghz
                    ),
                });
            }
        }
        Ok(Self {
            records,
            campaign_label: campaign_label.into(),
        })
    }

    pub fn records(&self) -> &[DirectionalRecord] {
        &self.records
    }

    pub fn into_records(self) -> Vec<DirectionalRecord> {
        self.records
    }

    pub fn campaign_label(&self) -> &str {
        &self.campaign_label
    }

    /// Carrier frequency shared by every record, `None` for an empty set.
    pub fn freq_ghz(&self) -> Option<f64> {
        self.records.first().map(|r| r.freq_ghz)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
