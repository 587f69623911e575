//! Free space path loss, the close-in (CI) reference distance model and
//! the built-in table of fitted CI parameters.
//!
//! The CI model anchors path loss at the free space value one meter from the
//! transmitter and grows with a single exponent `n`:
//!
//! ```text
//! PL(f, d) = FSPL(f, 1 m) + 10 n log10(d / 1 m) + X
//! FSPL(f, 1 m) = 32.4 + 20 log10(f / 1 GHz)
//! ```
//!
//! where `X` is zero-mean Gaussian shadow fading in dB.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::channel_data::{Scenario, REFERENCE_DISTANCE_M};
use crate::error::{Error, Result};

/// Free space loss at 1 m and 1 GHz, in dB.
pub const FSPL_1M_1GHZ_DB: f64 = 32.4;

/// Free space path loss in dB for a carrier in GHz and a distance in meters.
pub fn fspl_db(freq_ghz: f64, distance_m: f64) -> Result<f64> {
    if !(freq_ghz.is_finite() && freq_ghz > 0.0) {
        return Err(Error::domain(format!(
            "frequency must be > 0 GHz, got {freq_ghz}"
        )));
    }
    if !(distance_m.is_finite() && distance_m > 0.0) {
        return Err(Error::domain(format!(
            "distance must be > 0 m, got {distance_m}"
        )));
    }
    Ok(FSPL_1M_1GHZ_DB + 20.0 * freq_ghz.log10() + 20.0 * distance_m.log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AntennaMode {
    Directional,
    Omnidirectional,
}

impl AntennaMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            AntennaMode::Directional => "directional",
            AntennaMode::Omnidirectional => "omni",
        }
    }
}

impl fmt::Display for AntennaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AntennaMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "directional" | "dir" => Ok(AntennaMode::Directional),
            "omni" | "omnidirectional" => Ok(AntennaMode::Omnidirectional),
            other => Err(Error::invalid(
                "antenna mode",
                format!("'{other}' (expected directional or omni)"),
            )),
        }
    }
}

/// Which directional beam pair a NLOS model describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BeamSelection {
    /// The TX/RX pointing pair with maximum received power.
    Best,
    /// Every measured pointing pair.
    Arbitrary,
    /// Omnidirectional or LOS models.
    NotApplicable,
}

impl BeamSelection {
    pub fn as_str(&self) -> &'static str {
        match self {
            BeamSelection::Best => "best",
            BeamSelection::Arbitrary => "arbitrary",
            BeamSelection::NotApplicable => "na",
        }
    }

    /// The only beam selection valid for a scenario / mode pair when the
    /// caller does not pick one.
    pub fn default_for(scenario: Scenario, mode: AntennaMode) -> Self {
        match (scenario, mode) {
            (Scenario::Nlos, AntennaMode::Directional) => BeamSelection::Best,
            _ => BeamSelection::NotApplicable,
        }
    }
}

impl fmt::Display for BeamSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BeamSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "best" => Ok(BeamSelection::Best),
            "arbitrary" | "arb" => Ok(BeamSelection::Arbitrary),
            "na" | "n/a" | "none" | "" => Ok(BeamSelection::NotApplicable),
            other => Err(Error::invalid(
                "beam selection",
                format!("'{other}' (expected best, arbitrary or na)"),
            )),
        }
    }
}

/// Carrier bands covered by the built-in registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Band {
    Ghz28,
    Ghz73,
    Ghz142,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Ghz28, Band::Ghz73, Band::Ghz142];

    pub fn freq_ghz(&self) -> f64 {
        match self {
            Band::Ghz28 => 28.0,
            Band::Ghz73 => 73.0,
            Band::Ghz142 => 142.0,
        }
    }

    pub fn from_ghz(freq_ghz: f64) -> Result<Self> {
        Band::ALL
            .into_iter()
            .find(|b| b.freq_ghz() == freq_ghz)
            .ok_or_else(|| Error::NotFound {
                key: format!("band {freq_ghz} GHz"),
                valid: "28, 73, 142".into(),
            })
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.freq_ghz())
    }
}

/// Registry lookup key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelKey {
    pub band: Band,
    pub scenario: Scenario,
    pub antenna_mode: AntennaMode,
    pub beam_selection: BeamSelection,
}

impl fmt::Display for ModelKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} GHz, {}, {}, {})",
            self.band, self.scenario, self.antenna_mode, self.beam_selection
        )
    }
}

/// One CI model: path loss exponent and shadow fading deviation for a
/// frequency / scenario / antenna configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CiModelParams {
    pub freq_ghz: f64,
    pub ple_n: f64,
    /// `None` when no deviation was published for this configuration.
    pub sigma_db: Option<f64>,
    pub scenario: Scenario,
    pub antenna_mode: AntennaMode,
    pub beam_selection: BeamSelection,
    /// The exponent was fitted only to links that stayed detectable, so it
    /// underestimates the true exponent.
    pub censored: bool,
}

impl CiModelParams {
    pub fn new(
        freq_ghz: f64,
        ple_n: f64,
        sigma_db: Option<f64>,
        scenario: Scenario,
        antenna_mode: AntennaMode,
        beam_selection: BeamSelection,
    ) -> Result<Self> {
        let p = Self {
            freq_ghz,
            ple_n,
            sigma_db,
            scenario,
            antenna_mode,
            beam_selection,
            censored: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.freq_ghz.is_finite() && self.freq_ghz > 0.0) {
            return Err(Error::invalid(
                "CI params",
                format!("freq_ghz = {}", self.freq_ghz),
            ));
        }
        if !(self.ple_n.is_finite() && self.ple_n > 0.0) {
            return Err(Error::invalid(
                "CI params",
                format!("ple_n = {}", self.ple_n),
            ));
        }
        if let Some(s) = self.sigma_db {
            if !(s.is_finite() && s >= 0.0) {
                return Err(Error::invalid("CI params", format!("sigma_db = {s}")));
            }
        }
        let needs_na =
            self.antenna_mode == AntennaMode::Omnidirectional || self.scenario == Scenario::Los;
        if needs_na != (self.beam_selection == BeamSelection::NotApplicable) {
            return Err(Error::invalid(
                "CI params",
                format!(
                    "beam selection '{}' does not fit {} {}",
                    self.beam_selection, self.scenario, self.antenna_mode
                ),
            ));
        }
        Ok(())
    }

    pub fn with_ple(mut self, ple_n: f64) -> Self {
        self.ple_n = ple_n;
        self
    }

    pub fn with_sigma(mut self, sigma_db: Option<f64>) -> Self {
        self.sigma_db = sigma_db;
        self
    }

    /// Shadow fading deviation, or an error when none was published.
    pub fn require_sigma(&self) -> Result<f64> {
        self.sigma_db.ok_or_else(|| {
            Error::domain(format!(
                "no shadow fading deviation for {} GHz {} {} {}",
                self.freq_ghz, self.scenario, self.antenna_mode, self.beam_selection
            ))
        })
    }

    /// Median (shadow-free) CI path loss.
    pub fn median_path_loss_db(&self, distance_m: f64) -> Result<f64> {
        ci_path_loss_db(self, distance_m, 0.0)
    }
}

/// CI path loss with an explicit shadow fading realization in dB.
pub fn ci_path_loss_db(params: &CiModelParams, distance_m: f64, shadow_db: f64) -> Result<f64> {
    if !(distance_m.is_finite() && distance_m >= REFERENCE_DISTANCE_M) {
        return Err(Error::domain(format!(
            "CI model is undefined below the {REFERENCE_DISTANCE_M} m reference distance (got {distance_m} m)"
        )));
    }
    let anchor = fspl_db(params.freq_ghz, REFERENCE_DISTANCE_M)?;
    Ok(anchor + 10.0 * params.ple_n * (distance_m / REFERENCE_DISTANCE_M).log10() + shadow_db)
}

/// Immutable table of CI models keyed by band and configuration.
#[derive(Debug, Clone)]
pub struct ModelRegistry {
    entries: Vec<(ModelKey, CiModelParams)>,
}

// (band, scenario, mode, beam, n, sigma)
type Row = (Band, Scenario, AntennaMode, BeamSelection, f64, Option<f64>);

const BUILTIN: [Row; 15] = {
    use AntennaMode::{Directional as Dir, Omnidirectional as Omni};
    use Band::*;
    use BeamSelection::{Arbitrary, Best, NotApplicable as Na};
    use Scenario::{Los, Nlos};
    [
        (Ghz142, Los, Dir, Na, 2.1, Some(2.8)),
        (Ghz142, Nlos, Dir, Best, 3.1, Some(8.3)),
        (Ghz142, Nlos, Dir, Arbitrary, 3.6, Some(9.1)),
        (Ghz142, Los, Omni, Na, 1.9, Some(2.7)),
        (Ghz142, Nlos, Omni, Na, 2.9, Some(8.2)),
        (Ghz73, Los, Dir, Na, 2.0, Some(1.9)),
        (Ghz73, Nlos, Dir, Best, 3.1, None),
        (Ghz73, Nlos, Dir, Arbitrary, 4.6, None),
        (Ghz73, Los, Omni, Na, 1.9, Some(1.7)),
        (Ghz73, Nlos, Omni, Na, 2.8, Some(8.7)),
        (Ghz28, Los, Dir, Na, 1.9, Some(1.1)),
        (Ghz28, Nlos, Dir, Best, 3.5, None),
        (Ghz28, Nlos, Dir, Arbitrary, 4.1, None),
        (Ghz28, Los, Omni, Na, 2.1, Some(3.6)),
        (Ghz28, Nlos, Omni, Na, 3.4, Some(9.7)),
    ]
};

impl ModelRegistry {
    /// The shared built-in registry of urban microcell models at
    /// 28, 73 and 142 GHz.
    pub fn builtin() -> &'static ModelRegistry {
        static REGISTRY: OnceLock<ModelRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            let entries = BUILTIN
                .iter()
                .map(
                    |&(band, scenario, antenna_mode, beam_selection, n, sigma)| {
                        let key = ModelKey {
                            band,
                            scenario,
                            antenna_mode,
                            beam_selection,
                        };
                        let params = CiModelParams {
                            freq_ghz: band.freq_ghz(),
                            ple_n: n,
                            sigma_db: sigma,
                            scenario,
                            antenna_mode,
                            beam_selection,
                            // 142 GHz NLOS arbitrary-beam links were only fitted
                            // where a signal was detected.
                            censored: band == Band::Ghz142
                                && beam_selection == BeamSelection::Arbitrary,
                        };
                        (key, params)
                    },
                )
                .collect();
            ModelRegistry { entries }
        })
    }

    pub fn get(&self, key: &ModelKey) -> Result<CiModelParams> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, p)| *p)
            .ok_or_else(|| Error::NotFound {
                key: key.to_string(),
                valid: self
                    .entries
                    .iter()
                    .map(|(k, _)| k.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            })
    }

    pub fn entries(&self) -> impl Iterator<Item = &CiModelParams> {
        self.entries.iter().map(|(_, p)| p)
    }

    pub fn keys(&self) -> impl Iterator<Item = &ModelKey> {
        self.entries.iter().map(|(k, _)| k)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Writes the registry (optionally one band) as CSV:
    /// `freq_ghz,scenario,antenna_mode,beam_selection,ple_n,sigma_db,censored`.
    /// Absent deviations are written as empty fields.
    pub fn write_csv<W: Write>(&self, band: Option<Band>, mut sink: W) -> Result<()> {
        writeln!(
            sink,
            "freq_ghz,scenario,antenna_mode,beam_selection,ple_n,sigma_db,censored"
        )?;
        for (key, p) in self
            .entries
            .iter()
            .filter(|(k, _)| band.is_none_or(|b| k.band == b))
        {
            writeln!(
                sink,
                "{},{},{},{},{:.1},{},{}",
                key.band,
                key.scenario,
                key.antenna_mode,
                key.beam_selection,
                p.ple_n,
                p.sigma_db.map(|s| format!("{s:.1}")).unwrap_or_default(),
                p.censored
            )?;
        }
        Ok(())
    }
}

/// Looks up a built-in model by carrier frequency and configuration.
pub fn registry_lookup(
    freq_ghz: f64,
    scenario: Scenario,
    antenna_mode: AntennaMode,
    beam_selection: BeamSelection,
) -> Result<CiModelParams> {
    let registry = ModelRegistry::builtin();
    let band = Band::from_ghz(freq_ghz).map_err(|_| Error::NotFound {
        key: format!("({freq_ghz} GHz, {scenario}, {antenna_mode}, {beam_selection})"),
        valid: registry
            .keys()
            .map(|k| k.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    })?;
    registry.get(&ModelKey {
        band,
        scenario,
        antenna_mode,
        beam_selection,
    })
}
