use std::io::{Read, Write};

use super::{PowerDelayProfile, DEFAULT_BIN_WIDTH_NS};
use crate::error::{Error, Result};
use crate::units::{dbm_to_mw, mw_to_dbm};

const SPACING_TOLERANCE_NS: f64 = 1e-6;

/// Parses a PDP text file:
///
/// ```text
/// # noise_floor_dbm=-110.0
/// delay_ns,power_dbm
/// 0,-inf
/// 2,-95.5
/// ```
///
/// The `delay_ns,power_dbm` header row is optional. `# bin_width_ns=<v>`
/// sets the bin width of single-row files (default 2 ns); with two or more
/// rows the width is inferred from the delays.
pub fn parse_pdp_file<R: Read>(mut source: R) -> Result<PowerDelayProfile> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| Error::Schema(format!("input is not UTF-8 text: {e}")))?;

    let mut noise_floor = None;
    let mut declared_width = None;
    let mut delays = Vec::new();
    let mut powers = Vec::new();

    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        if let Some(meta) = line.strip_prefix('#') {
            if let Some((k, v)) = meta.split_once('=') {
                let value = || {
                    v.trim().parse::<f64>().map_err(|_| {
                        Error::Schema(format!("metadata {}: bad value '{}'", k.trim(), v.trim()))
                    })
                };
                match k.trim() {
                    "noise_floor_dbm" => noise_floor = Some(value()?),
                    "bin_width_ns" => declared_width = Some(value()?),
                    _ => {}
                }
            }
            continue;
        }
        if delays.is_empty() && line.replace(' ', "") == "delay_ns,power_dbm" {
            continue;
        }
        let row = delays.len() + 1;
        let (d, p) = line.split_once(',').ok_or_else(|| Error::Row {
            row,
            reason: format!("expected 'delay_ns,power_dbm', got '{line}'"),
        })?;
        let parse = |s: &str, what: &str| {
            s.trim().parse::<f64>().map_err(|_| Error::Row {
                row,
                reason: format!("cannot parse {what} '{}'", s.trim()),
            })
        };
        let delay = parse(d, "delay_ns")?;
        let power = parse(p, "power_dbm")?;
        if !delay.is_finite() || power.is_nan() || power == f64::INFINITY {
            return Err(Error::Row {
                row,
                reason: format!("invalid values delay={delay}, power={power}"),
            });
        }
        delays.push(delay);
        powers.push(dbm_to_mw(power));
    }

    let noise_floor = noise_floor
        .ok_or_else(|| Error::Schema("missing '# noise_floor_dbm=<value>' metadata".into()))?;
    if delays.is_empty() {
        return Err(Error::Schema("PDP file has no data rows".into()));
    }

    for (i, w) in delays.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(Error::Row {
                row: i + 2,
                reason: format!("delays not strictly increasing ({} after {})", w[1], w[0]),
            });
        }
    }
    let width = if delays.len() == 1 {
        declared_width.unwrap_or(DEFAULT_BIN_WIDTH_NS)
    } else {
        (delays[delays.len() - 1] - delays[0]) / (delays.len() - 1) as f64
    };
    for (i, w) in delays.windows(2).enumerate() {
        if ((w[1] - w[0]) - width).abs() > SPACING_TOLERANCE_NS {
            return Err(Error::Row {
                row: i + 2,
                reason: format!(
                    "non-uniform delay spacing: step {} ns vs bin width {width} ns",
                    w[1] - w[0]
                ),
            });
        }
    }

    PowerDelayProfile::new(delays[0], width, powers, noise_floor)
}

/// Writes a PDP in the format read by [`parse_pdp_file`]. Empty bins are
/// written as `-inf`.
pub fn write_pdp_file<W: Write>(pdp: &PowerDelayProfile, mut sink: W) -> Result<()> {
    writeln!(sink, "# noise_floor_dbm={}", pdp.noise_floor_dbm())?;
    writeln!(sink, "# bin_width_ns={}", pdp.bin_width_ns())?;
    writeln!(sink, "delay_ns,power_dbm")?;
    for (i, &p) in pdp.power_mw().iter().enumerate() {
        writeln!(sink, "{},{}", pdp.delay_ns(i), mw_to_dbm(p))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_inferred_from_spacing() {
        let text = "# noise_floor_dbm=-110\n0,-90\n2,-95\n4,-100\n";
        let pdp = parse_pdp_file(text.as_bytes()).unwrap();
        assert_eq!(pdp.bin_width_ns(), 2.0);
        assert_eq!(pdp.len(), 3);
        assert_eq!(pdp.noise_floor_dbm(), -110.0);
    }

    #[test]
    fn non_uniform_spacing_rejected() {
        let text = "# noise_floor_dbm=-110\n0,-90\n2,-95\n5,-100\n";
        let err = parse_pdp_file(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("non-uniform"), "{err}");
    }

    #[test]
    fn non_monotone_rejected() {
        let text = "# noise_floor_dbm=-110\n0,-90\n4,-95\n2,-100\n";
        let err = parse_pdp_file(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("strictly increasing"), "{err}");
    }

    #[test]
    fn empty_body_rejected() {
        let text = "# noise_floor_dbm=-110\ndelay_ns,power_dbm\n";
        assert!(matches!(
            parse_pdp_file(text.as_bytes()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn missing_noise_floor_rejected() {
        assert!(matches!(
            parse_pdp_file("0,-90\n".as_bytes()),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn header_row_and_neg_inf_accepted() {
        let text = "# noise_floor_dbm=-110\ndelay_ns,power_dbm\n0,-inf\n2,-95\n";
        let pdp = parse_pdp_file(text.as_bytes()).unwrap();
        assert_eq!(pdp.power_mw()[0], 0.0);
    }

    #[test]
    fn single_row_uses_default_width() {
        let pdp = parse_pdp_file("# noise_floor_dbm=-110\n10,-90\n".as_bytes()).unwrap();
        assert_eq!(pdp.bin_width_ns(), DEFAULT_BIN_WIDTH_NS);
        let pdp = parse_pdp_file("# noise_floor_dbm=-110\n# bin_width_ns=0.5\n10,-90\n".as_bytes())
            .unwrap();
        assert_eq!(pdp.bin_width_ns(), 0.5);
    }

    #[test]
    fn peak_row_delay_preserved() {
        // LOS arrival at 144.47 ns on a 2 ns grid starting at 0.47 ns
        let mut text = String::from("# noise_floor_dbm=-110\n");
        for i in 0..120 {
            let delay = 0.47 + 2.0 * i as f64;
            let power = if i == 72 { -70.0 } else { -105.0 };
            text.push_str(&format!("{delay:.2},{power}\n"));
        }
        let pdp = parse_pdp_file(text.as_bytes()).unwrap();
        let peak_delay = pdp.delay_ns(pdp.peak_bin());
        assert!((peak_delay - 144.47).abs() < 1e-6, "{peak_delay}");
    }
}
