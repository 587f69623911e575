//! Power delay profile analysis and omnidirectional synthesis.

use serde::{Deserialize, Serialize};

use crate::channel_data::{DirectionalRecord, MultipathComponent, PowerDelayProfile};
use crate::error::{Error, Result};
use crate::units::{compensated_sum, dbm_to_mw, mw_to_dbm};

/// SNR a bin must reach above the noise floor to count as signal.
pub const DEFAULT_SNR_THRESHOLD_DB: f64 = 5.0;

/// Default minimum void interval separating time clusters.
pub const DEFAULT_MIN_VOID_NS: f64 = 25.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeCluster {
    /// Indices into the MPC list, ascending and contiguous.
    pub mpc_indices: Vec<usize>,
    pub start_ns: f64,
    pub end_ns: f64,
}

impl TimeCluster {
    pub fn len(&self) -> usize {
        self.mpc_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mpc_indices.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OmniSynthesisResult {
    /// Gain-removed (isotropic) received power summed over the counted beams.
    pub omni_received_power_dbm: f64,
    pub omni_path_loss_db: f64,
    pub contributing_records: usize,
    pub deduplicated_records: usize,
}

/// Zeroes every bin below `noise_floor + snr_threshold_db`. Bins exactly at
/// the threshold are kept.
pub fn threshold_pdp(pdp: &PowerDelayProfile, snr_threshold_db: f64) -> Result<PowerDelayProfile> {
    if !(snr_threshold_db.is_finite() && snr_threshold_db >= 0.0) {
        return Err(Error::domain(format!(
            "SNR threshold must be >= 0 dB, got {snr_threshold_db}"
        )));
    }
    let cut_mw = dbm_to_mw(pdp.noise_floor_dbm() + snr_threshold_db);
    let powers = pdp
        .power_mw()
        .iter()
        .map(|&p| if p < cut_mw { 0.0 } else { p })
        .collect();
    pdp.with_powers(powers)
}

/// Per-bin arithmetic mean of linear powers over PDPs sharing one grid.
pub fn average_pdps(pdps: &[PowerDelayProfile]) -> Result<PowerDelayProfile> {
    let first = pdps
        .first()
        .ok_or_else(|| Error::domain("cannot average an empty PDP list"))?;
    if let Some((i, _)) = pdps.iter().enumerate().find(|(_, p)| !first.same_grid(p)) {
        return Err(Error::domain(format!(
            "PDP {i} does not share the delay grid / noise floor of PDP 0"
        )));
    }
    let count = pdps.len() as f64;
    let powers = (0..first.len())
        .map(|bin| compensated_sum(pdps.iter().map(|p| p.power_mw()[bin])) / count)
        .collect();
    first.with_powers(powers)
}

/// One MPC per strict local maximum with positive power, in delay order.
///
/// A plateau of equal bins counts as one candidate placed at its latest bin.
/// Positions beyond either end of the profile compare as lower than any
/// bin, so boundary bins can be peaks.
pub fn extract_mpcs(pdp: &PowerDelayProfile) -> Vec<MultipathComponent> {
    let p = pdp.power_mw();
    let mut mpcs = Vec::new();
    let mut start = 0;
    while start < p.len() {
        let mut end = start;
        while end + 1 < p.len() && p[end + 1] == p[start] {
            end += 1;
        }
        let v = p[start];
        let left_lower = start == 0 || p[start - 1] < v;
        let right_lower = end + 1 == p.len() || p[end + 1] < v;
        if v > 0.0 && left_lower && right_lower {
            mpcs.push(MultipathComponent {
                delay_ns: pdp.delay_ns(end),
                power_dbm: mw_to_dbm(v),
                direction: None,
            });
        }
        start = end + 1;
    }
    mpcs
}

/// Splits delay-sorted MPCs into clusters: a gap strictly larger than
/// `min_void_ns` between consecutive MPCs starts a new cluster.
pub fn partition_time_clusters(
    mpcs: &[MultipathComponent],
    min_void_ns: f64,
) -> Result<Vec<TimeCluster>> {
    if !(min_void_ns.is_finite() && min_void_ns >= 0.0) {
        return Err(Error::domain(format!(
            "minimum void interval {min_void_ns} ns"
        )));
    }
    if let Some(i) = mpcs.windows(2).position(|w| w[1].delay_ns < w[0].delay_ns) {
        return Err(Error::domain(format!(
            "MPCs must be sorted by delay (index {} precedes {})",
            i,
            i + 1
        )));
    }
    let mut clusters: Vec<TimeCluster> = Vec::new();
    for (i, m) in mpcs.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if m.delay_ns - c.end_ns <= min_void_ns => {
                c.mpc_indices.push(i);
                c.end_ns = m.delay_ns;
            }
            _ => clusters.push(TimeCluster {
                mpc_indices: vec![i],
                start_ns: m.delay_ns,
                end_ns: m.delay_ns,
            }),
        }
    }
    Ok(clusters)
}

/// Power-weighted RMS delay spread (square root of the second central
/// moment of delay).
pub fn rms_delay_spread_ns(pdp: &PowerDelayProfile) -> Result<f64> {
    let total = pdp.total_power_mw();
    if total <= 0.0 {
        return Err(Error::domain("PDP has zero total power"));
    }
    let p = pdp.power_mw();
    // moments about the first bin keep the result independent of absolute delay
    let offset = |i: usize| i as f64 * pdp.bin_width_ns();
    let mean = compensated_sum(p.iter().enumerate().map(|(i, &w)| w * offset(i))) / total;
    let var = compensated_sum(
        p.iter()
            .enumerate()
            .map(|(i, &w)| w * (offset(i) - mean).powi(2)),
    ) / total;
    Ok(var.max(0.0).sqrt())
}

/// Path loss of one pointing combination with both antenna gains removed.
///
/// Uses `received_power_dbm` when present, otherwise the total power of the
/// PDP thresholded at [`DEFAULT_SNR_THRESHOLD_DB`].
pub fn directional_path_loss_db(record: &DirectionalRecord) -> Result<f64> {
    let received = received_power_dbm(record)?;
    Ok(record.tx_power_dbm + record.tx_gain_dbi + record.rx_gain_dbi - received)
}

fn received_power_dbm(record: &DirectionalRecord) -> Result<f64> {
    if let Some(p) = record.received_power_dbm {
        return Ok(p);
    }
    let pdp = record.pdp.as_ref().ok_or_else(|| {
        Error::domain(format!(
            "{}-{}: neither received power nor PDP present",
            record.tx_id, record.rx_id
        ))
    })?;
    let total = threshold_pdp(pdp, DEFAULT_SNR_THRESHOLD_DB)?.total_power_mw();
    if total <= 0.0 {
        return Err(Error::domain(format!(
            "{}-{}: no PDP bin above the detection threshold",
            record.tx_id, record.rx_id
        )));
    }
    Ok(mw_to_dbm(total))
}

/// Delay of the strongest thresholded bin, with the bin width.
fn strongest_delay(record: &DirectionalRecord) -> Option<(f64, f64)> {
    let pdp = threshold_pdp(record.pdp.as_ref()?, DEFAULT_SNR_THRESHOLD_DB).ok()?;
    if pdp.total_power_mw() <= 0.0 {
        return None;
    }
    Some((pdp.delay_ns(pdp.peak_bin()), pdp.bin_width_ns()))
}

/// `candidate` re-observes the path set of `counted` from an adjacent
/// elevation cut.
fn overlaps(candidate: &DirectionalRecord, counted: &DirectionalRecord) -> bool {
    const EPS: f64 = 1e-9;
    let hpbw = candidate.hpbw_deg.max(counted.hpbw_deg) + EPS;
    let within = |a: &crate::PointingDirection, b: &crate::PointingDirection| {
        a.azimuth_separation_deg(b) <= hpbw && a.elevation_separation_deg(b) <= hpbw
    };
    let different_cut = candidate.tx_pointing.elevation_deg()
        != counted.tx_pointing.elevation_deg()
        || candidate.rx_pointing.elevation_deg() != counted.rx_pointing.elevation_deg();
    if !(different_cut
        && within(&candidate.tx_pointing, &counted.tx_pointing)
        && within(&candidate.rx_pointing, &counted.rx_pointing))
    {
        return false;
    }
    match (strongest_delay(candidate), strongest_delay(counted)) {
        (Some((a, width)), Some((b, _))) => (a - b).abs() <= width + EPS,
        _ => false,
    }
}

/// Sums gain-removed linear received powers over the non-overlapping beams
/// of one TX/RX location pair.
///
/// A record overlaps an already counted one when both its TX and RX
/// pointings lie within one HPBW of the counted pair at a different
/// elevation cut and the strongest PDP delays agree within one bin. Such
/// records are dropped and reported in `deduplicated_records`; records
/// without a PDP are never treated as overlapping. Records are visited in
/// input order.
pub fn synthesize_omni(records: &[DirectionalRecord]) -> Result<OmniSynthesisResult> {
    let first = records
        .first()
        .ok_or_else(|| Error::domain("omni synthesis needs at least one record"))?;
    for (i, r) in records.iter().enumerate() {
        if r.tx_id != first.tx_id || r.rx_id != first.rx_id || r.freq_ghz != first.freq_ghz {
            return Err(Error::domain(format!(
                "record {i} ({}-{} @ {} GHz) does not match {}-{} @ {} GHz",
                r.tx_id, r.rx_id, r.freq_ghz, first.tx_id, first.rx_id, first.freq_ghz
            )));
        }
        if let Some(j) = records[..i]
            .iter()
            .position(|o| o.pointing_pair() == r.pointing_pair())
        {
            return Err(Error::domain(format!(
                "records {j} and {i} share the exact TX/RX pointing pair; average them first"
            )));
        }
    }

    let mut counted: Vec<&DirectionalRecord> = Vec::new();
    let mut path_losses = Vec::new();
    let mut deduplicated = 0;
    for r in records {
        if counted.iter().any(|c| overlaps(r, c)) {
            deduplicated += 1;
            continue;
        }
        path_losses.push(directional_path_loss_db(r)?);
        counted.push(r);
    }

    let path_gain_mw = compensated_sum(path_losses.iter().map(|pl| dbm_to_mw(-pl)));
    let omni_path_loss_db = -mw_to_dbm(path_gain_mw);
    Ok(OmniSynthesisResult {
        omni_received_power_dbm: first.tx_power_dbm - omni_path_loss_db,
        omni_path_loss_db,
        contributing_records: counted.len(),
        deduplicated_records: deduplicated,
    })
}
