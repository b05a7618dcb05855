//! CSV and JSON writers.
//!
//! Floats are written in shortest round-trip exponent form, so output is
//! byte-identical across runs and parses back to the same values.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::sampling::NmseResult;
use crate::sim::sndr::SpectrumPoint;
use crate::sim::{SimTrace, SndrReport};
use crate::tradeoff::TradeoffPoint;

pub const TRADEOFF_HEADER: [&str; 6] = ["f_s_hz", "T_s_s", "zeta", "e_ratio_db", "e_h_j", "e_hold_j"];
pub const TIMESERIES_HEADER: [&str; 4] = ["time_s", "v_eh_v", "e_consumed_j", "e_harvested_j"];
pub const CODES_HEADER: [&str; 2] = ["sample_index", "code"];
pub const SPECTRUM_HEADER: [&str; 2] = ["freq_hz", "magnitude_dbfs"];
pub const NMSE_HEADER: [&str; 3] = ["f_s_hz", "zeta", "quantization_zeta"];

/// `1.5e-11`, `-inf`, `nan`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn tradeoff_row(p: &TradeoffPoint) -> [String; 6] {
    [p.f_s, p.t_s, p.zeta, p.e_ratio_db, p.e_h, p.e_hold].map(fmt_f64)
}

pub fn write_tradeoff_csv<W: Write>(out: W, points: &[TradeoffPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRADEOFF_HEADER)?;
    for p in points {
        w.write_record(tradeoff_row(p))?;
    }
    w.flush()?;
    Ok(())
}

/// Several curves in one table, keyed by a leading `n_bits` column.
pub fn write_tradeoff_family_csv<W: Write>(out: W, family: &[(u32, Vec<TradeoffPoint>)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("n_bits").chain(TRADEOFF_HEADER))?;
    for (bits, points) in family {
        for p in points {
            w.write_record(std::iter::once(bits.to_string()).chain(tradeoff_row(p)))?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_nmse_csv<W: Write>(out: W, rows: &[NmseResult]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(NMSE_HEADER)?;
    for r in rows {
        w.write_record([r.f_s, r.zeta, r.quantization_zeta].map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

/// One row per sample: harvester voltage and cumulative ledgers.
pub fn write_timeseries_csv<W: Write>(out: W, trace: &SimTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TIMESERIES_HEADER)?;
    for i in 0..trace.len() {
        w.write_record([trace.times[i], trace.v_eh[i], trace.e_consumed[i], trace.e_harvested[i]].map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_codes_csv<W: Write>(out: W, trace: &SimTrace) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CODES_HEADER)?;
    for (i, c) in trace.codes.iter().enumerate() {
        w.write_record([i.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_spectrum_csv<W: Write>(out: W, spectrum: &[SpectrumPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SPECTRUM_HEADER)?;
    for p in spectrum {
        w.write_record([p.freq_hz, p.magnitude_dbfs].map(fmt_f64))?;
    }
    w.flush()?;
    Ok(())
}

/// Pretty JSON followed by a newline. Non-finite numbers become `null`.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// SNDR summary without the spectrum, for compact reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SndrSummary {
    pub sndr_db: f64,
    pub enob: f64,
    pub signal_freq_hz: f64,
    pub noise_floor_gap_db: f64,
    pub n_fft: usize,
}

impl From<&SndrReport> for SndrSummary {
    fn from(r: &SndrReport) -> Self {
        Self {
            sndr_db: r.sndr_db,
            enob: r.enob,
            signal_freq_hz: r.signal_freq_hz,
            noise_floor_gap_db: r.noise_floor_gap_db,
            n_fft: r.n_fft,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(f_s: f64) -> TradeoffPoint {
        TradeoffPoint { f_s, t_s: 1.0 / f_s, zeta: 0.25, e_ratio_db: f64::NEG_INFINITY, e_h: 0.0, e_hold: 3.5e-13 }
    }

    #[test]
    fn tradeoff_csv_layout() {
        let mut buf = Vec::new();
        write_tradeoff_csv(&mut buf, &[pt(4e7)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "f_s_hz,T_s_s,zeta,e_ratio_db,e_h_j,e_hold_j\n4e7,2.5e-8,2.5e-1,-inf,0e0,3.5e-13\n");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1 + 0.2, 1.0 / 3.0, 2.1464e-11, 39.6e6, -0.0, 5e-324] {
            let back: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits());
        }
        assert_eq!("-inf".parse::<f64>().unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn family_has_bits_column() {
        let mut buf = Vec::new();
        write_tradeoff_family_csv(&mut buf, &[(8, vec![pt(1e6)]), (10, vec![pt(2e6)])]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n_bits,f_s_hz,T_s_s,zeta,e_ratio_db,e_h_j,e_hold_j");
        assert!(lines[1].starts_with("8,1e6,"));
        assert!(lines[2].starts_with("10,2e6,"));
    }

    #[test]
    fn json_uses_column_names_and_null_for_inf() {
        let mut buf = Vec::new();
        write_json(&mut buf, &[pt(4e7)]).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["f_s_hz"], 4e7);
        assert!(v[0]["e_ratio_db"].is_null());
    }
}
