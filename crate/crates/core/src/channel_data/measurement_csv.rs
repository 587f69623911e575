use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{DirectionalRecord, MeasurementSet, PointingDirection, PowerDelayProfile, Scenario};
use crate::error::{Error, Result};

/// Exact, ordered header of the measurement CSV.
pub const MEASUREMENT_CSV_HEADER: [&str; 14] = [
    "tx_id",
    "rx_id",
    "distance_3d_m",
    "scenario",
    "tx_az_deg",
    "tx_el_deg",
    "rx_az_deg",
    "rx_el_deg",
    "freq_ghz",
    "tx_power_dbm",
    "tx_gain_dbi",
    "rx_gain_dbi",
    "hpbw_deg",
    "received_power_dbm",
];

const CAMPAIGN_KEY: &str = "campaign";

/// Parses a measurement CSV. Leading `# campaign=<label>` lines set the
/// campaign label; other `#` lines are ignored. Every row must carry a
/// received power.
pub fn parse_measurement_csv<R: Read>(source: R) -> Result<MeasurementSet> {
    parse_measurement_csv_with_pdps(source, &BTreeMap::new())
}

/// Like [`parse_measurement_csv`], attaching `pdps[row]` (1-based data row)
/// to the matching record. Rows with an empty `received_power_dbm` must have
/// a PDP attached.
pub fn parse_measurement_csv_with_pdps<R: Read>(
    mut source: R,
    pdps: &BTreeMap<usize, PowerDelayProfile>,
) -> Result<MeasurementSet> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Schema(format!("input is not UTF-8 text: {e}")))?;

    let mut campaign_label = String::new();
    for line in text.lines().map(str::trim).filter(|l| l.starts_with('#')) {
        if let Some((k, v)) = line.trim_start_matches('#').split_once('=') {
            if k.trim() == CAMPAIGN_KEY {
                campaign_label = v.trim().to_string();
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .clone();
    check_header(&headers)?;

    let mut records = Vec::new();
    for (idx, row) in reader.records().enumerate() {
        let row_no = idx + 1;
        let row = row.map_err(|e| Error::Row {
            row: row_no,
            reason: e.to_string(),
        })?;
        let record = parse_row(&row, row_no, pdps.get(&row_no).cloned())?;
        records.push(record);
    }
    if let Some(&row) = pdps.keys().find(|&&r| r == 0 || r > records.len()) {
        return Err(Error::Schema(format!(
            "PDP attached to row {row}, but the file has {} data rows",
            records.len()
        )));
    }
    MeasurementSet::new(records, campaign_label)
}

fn check_header(headers: &csv::StringRecord) -> Result<()> {
    let got: Vec<&str> = headers.iter().collect();
    if let Some(missing) = MEASUREMENT_CSV_HEADER.iter().find(|c| !got.contains(c)) {
        return Err(Error::Schema(format!(
            "missing mandatory column '{missing}'"
        )));
    }
    if got != MEASUREMENT_CSV_HEADER {
        return Err(Error::Schema(format!(
            "header must be exactly '{}', got '{}'",
            MEASUREMENT_CSV_HEADER.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

fn parse_row(
    row: &csv::StringRecord,
    row_no: usize,
    pdp: Option<PowerDelayProfile>,
) -> Result<DirectionalRecord> {
    let err = |reason: String| Error::Row {
        row: row_no,
        reason,
    };
    if row.len() != MEASUREMENT_CSV_HEADER.len() {
        return Err(err(format!(
            "expected {} columns, found {}",
            MEASUREMENT_CSV_HEADER.len(),
            row.len()
        )));
    }
    let num = |col: usize| -> Result<f64> {
        let raw = &row[col];
        raw.parse::<f64>().map_err(|_| {
            err(format!(
                "column '{}': cannot parse '{raw}' as a number",
                MEASUREMENT_CSV_HEADER[col]
            ))
        })
    };
    let pointing = |az: usize, el: usize| -> Result<PointingDirection> {
        PointingDirection::new(num(az)?, num(el)?).map_err(|e| err(e.to_string()))
    };

    let received_power_dbm = match row[13].trim() {
        "" => None,
        _ => Some(num(13)?),
    };
    let record = DirectionalRecord {
        tx_id: row[0].to_string(),
        rx_id: row[1].to_string(),
        distance_3d_m: num(2)?,
        scenario: row[3].parse::<Scenario>().map_err(|e| err(e.to_string()))?,
        tx_pointing: pointing(4, 5)?,
        rx_pointing: pointing(6, 7)?,
        freq_ghz: num(8)?,
        tx_power_dbm: num(9)?,
        tx_gain_dbi: num(10)?,
        rx_gain_dbi: num(11)?,
        hpbw_deg: num(12)?,
        received_power_dbm,
        pdp,
    };
    record.validate().map_err(|e| err(e.to_string()))?;
    Ok(record)
}

/// Writes the set in the canonical CSV layout. Numbers use the shortest
/// representation that parses back to the same `f64`. PDPs are not written.
pub fn write_measurement_csv<W: Write>(set: &MeasurementSet, sink: W) -> Result<()> {
    let mut sink = sink;
    if !set.campaign_label().is_empty() {
        writeln!(sink, "# {CAMPAIGN_KEY}={}", set.campaign_label())?;
    }
    let mut writer = csv::Writer::from_writer(sink);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    writer
        .write_record(MEASUREMENT_CSV_HEADER)
        .map_err(csv_err)?;
    for r in set.records() {
        let fields = [
            r.tx_id.clone(),
            r.rx_id.clone(),
            r.distance_3d_m.to_string(),
            r.scenario.to_string(),
            r.tx_pointing.azimuth_deg().to_string(),
            r.tx_pointing.elevation_deg().to_string(),
            r.rx_pointing.azimuth_deg().to_string(),
            r.rx_pointing.elevation_deg().to_string(),
            r.freq_ghz.to_string(),
            r.tx_power_dbm.to_string(),
            r.tx_gain_dbi.to_string(),
            r.rx_gain_dbi.to_string(),
            r.hpbw_deg.to_string(),
            r.received_power_dbm
                .map(|p| p.to_string())
                .unwrap_or_default(),
        ];
        writer.write_record(&fields).map_err(csv_err)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "tx_id,rx_id,distance_3d_m,scenario,tx_az_deg,tx_el_deg,rx_az_deg,rx_el_deg,freq_ghz,tx_power_dbm,tx_gain_dbi,rx_gain_dbi,hpbw_deg,received_power_dbm";

    fn csv_with(rows: &[&str]) -> String {
        let mut s = String::from(HEADER);
        for r in rows {
            s.push('\n');
            s.push_str(r);
        }
        s
    }

    #[test]
    fn minimal_file_parses() {
        let text = csv_with(&["TX1,RX23,43.34,LOS,0,0,180,0,142,0,27,27,8,-60.5"]);
        let set = parse_measurement_csv(text.as_bytes()).unwrap();
        assert_eq!(set.len(), 1);
        let r = &set.records()[0];
        assert_eq!(r.rx_id, "RX23");
        assert_eq!(r.received_power_dbm, Some(-60.5));
        assert_eq!(r.scenario, Scenario::Los);
    }

    #[test]
    fn campaign_label_from_metadata() {
        let text = format!(
            "# campaign=brooklyn-umi\n# operator notes\n{}",
            csv_with(&["TX1,RX1,10,NLOS,0,0,0,0,142,0,27,27,8,-90"])
        );
        let set = parse_measurement_csv(text.as_bytes()).unwrap();
        assert_eq!(set.campaign_label(), "brooklyn-umi");
    }

    #[test]
    fn sub_reference_distance_names_row() {
        let text = csv_with(&[
            "TX1,RX1,10,LOS,0,0,0,0,142,0,27,27,8,-60",
            "TX1,RX2,0.5,LOS,0,0,0,0,142,0,27,27,8,-60",
        ]);
        match parse_measurement_csv(text.as_bytes()).unwrap_err() {
            Error::Row { row, reason } => {
                assert_eq!(row, 2);
                assert!(reason.contains("reference distance"), "{reason}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn unparsable_number_names_row_and_column() {
        let text = csv_with(&["TX1,RX1,ten,LOS,0,0,0,0,142,0,27,27,8,-60"]);
        let msg = parse_measurement_csv(text.as_bytes())
            .unwrap_err()
            .to_string();
        assert!(
            msg.contains("row 1") && msg.contains("distance_3d_m"),
            "{msg}"
        );
    }

    #[test]
    fn wrong_column_count_is_row_error() {
        let text = csv_with(&["TX1,RX1,10,LOS,0,0,0,0,142,0,27,27,8"]);
        assert!(matches!(
            parse_measurement_csv(text.as_bytes()),
            Err(Error::Row { row: 1, .. })
        ));
    }

    #[test]
    fn missing_column_is_schema_error() {
        let text = "tx_id,rx_id,distance_3d_m\nTX1,RX1,10";
        let msg = parse_measurement_csv(text.as_bytes()).unwrap_err();
        assert!(
            matches!(msg, Error::Schema(ref m) if m.contains("scenario")),
            "{msg}"
        );
    }

    #[test]
    fn reordered_header_is_schema_error() {
        let mut cols: Vec<&str> = MEASUREMENT_CSV_HEADER.to_vec();
        cols.swap(0, 1);
        let text = cols.join(",");
        assert!(matches!(
            parse_measurement_csv(text.as_bytes()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn empty_power_requires_pdp() {
        let text = csv_with(&["TX1,RX1,10,NLOS,0,0,0,0,142,0,27,27,8,"]);
        assert!(parse_measurement_csv(text.as_bytes()).is_err());

        let pdp = PowerDelayProfile::new(0.0, 2.0, vec![1e-9], -110.0).unwrap();
        let pdps = BTreeMap::from([(1, pdp.clone())]);
        let set = parse_measurement_csv_with_pdps(text.as_bytes(), &pdps).unwrap();
        assert_eq!(set.records()[0].pdp.as_ref(), Some(&pdp));
    }

    #[test]
    fn pdp_for_missing_row_rejected() {
        let text = csv_with(&["TX1,RX1,10,NLOS,0,0,0,0,142,0,27,27,8,-90"]);
        let pdp = PowerDelayProfile::new(0.0, 2.0, vec![1e-9], -110.0).unwrap();
        let pdps = BTreeMap::from([(5, pdp)]);
        assert!(matches!(
            parse_measurement_csv_with_pdps(text.as_bytes(), &pdps),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn write_then_parse_is_identity() {
        let text = format!(
            "# campaign=c1\n{}",
            csv_with(&[
                "TX1,RX1,10.25,LOS,352,0,172,-8,142,0,27,27,8,-61.375",
                "TX1,RX1,10.25,NLOS,8,8,180,0,142,0,27,27,8,",
            ])
        );
        let pdp = PowerDelayProfile::new(0.0, 2.0, vec![1e-9], -110.0).unwrap();
        let pdps = BTreeMap::from([(2, pdp)]);
        let set = parse_measurement_csv_with_pdps(text.as_bytes(), &pdps).unwrap();
        let mut out = Vec::new();
        write_measurement_csv(&set, &mut out).unwrap();
        let again = parse_measurement_csv_with_pdps(out.as_slice(), &pdps).unwrap();
        assert_eq!(set, again);
    }
}
