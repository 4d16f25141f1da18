//! CSV and JSON records. Numbers use Rust's shortest round-trip formatting
//! ('.' decimal, no locale), so reports are byte-stable.

use std::io::{Read, Write};

use pfaffamp_core::postmeasure::{DecayFit, ExponentialFit, ScanRow};
use pfaffamp_core::probentropy::{ProbabilityPath, ProbabilityTable};
use pfaffamp_core::{Complex64, SpinConfiguration};
use serde::{Deserialize, Serialize};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRecord {
    pub config: String,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub phase: f64,
    pub path: String,
}

impl AmplitudeRecord {
    pub fn new(config: &SpinConfiguration, value: Complex64, path: &str) -> Self {
        AmplitudeRecord {
            config: config.to_string(),
            re: value.re,
            im: value.im,
            modulus: value.norm(),
            phase: value.arg(),
            path: path.into(),
        }
    }
}

pub fn path_name(path: ProbabilityPath) -> &'static str {
    match path {
        ProbabilityPath::AmplitudeSquared => "amplitude-squared",
        ProbabilityPath::DetRatio => "det-ratio",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityRecord {
    pub config: String,
    pub probability: f64,
    pub path: String,
}

/// One record per configuration, in index order.
pub fn probability_records(table: &ProbabilityTable, path: ProbabilityPath) -> Vec<ProbabilityRecord> {
    let l = table.len();
    table
        .probabilities()
        .iter()
        .enumerate()
        .map(|(k, &p)| ProbabilityRecord {
            config: SpinConfiguration::from_index(l, k as u64).to_string(),
            probability: p,
            path: path_name(path).into(),
        })
        .collect()
}

pub fn write_csv<W: Write, T: Serialize>(out: W, records: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Probability CSV (`config,probability,path`) with an optional footer row
/// whose `config` is `total`.
pub fn write_probability_csv<W: Write>(out: W, records: &[ProbabilityRecord], total: Option<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if let (Some(total), Some(first)) = (total, records.first()) {
        w.serialize(ProbabilityRecord { config: "total".into(), probability: total, path: first.path.clone() })?;
    }
    w.flush()?;
    Ok(())
}

/// A decay-scan row as written to CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    #[serde(rename = "L")]
    pub len: usize,
    pub d: usize,
    pub alpha: f64,
    pub entropy: f64,
    #[serde(rename = "P_outcome")]
    pub p_outcome: f64,
}

impl From<ScanRow> for ScanRecord {
    fn from(r: ScanRow) -> Self {
        ScanRecord { len: r.len, d: r.d, alpha: r.alpha, entropy: r.entropy, p_outcome: r.p_outcome }
    }
}

impl From<ScanRecord> for ScanRow {
    fn from(r: ScanRecord) -> Self {
        ScanRow { len: r.len, d: r.d, alpha: r.alpha, entropy: r.entropy, p_outcome: r.p_outcome }
    }
}

pub fn write_scan_csv<W: Write>(out: W, rows: &[ScanRow]) -> Result<()> {
    let records: Vec<ScanRecord> = rows.iter().map(|&r| r.into()).collect();
    write_csv(out, &records)
}

pub fn read_scan_csv<R: Read>(input: R) -> Result<Vec<ScanRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.deserialize::<ScanRecord>() {
        rows.push(rec?.into());
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialReport {
    pub rate: f64,
    pub residual: f64,
}

impl From<ExponentialFit> for ExponentialReport {
    fn from(f: ExponentialFit) -> Self {
        ExponentialReport { rate: f.rate, residual: f.residual }
    }
}

/// Power-law fit of one system size, with the competing exponential fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    #[serde(rename = "L")]
    pub len: usize,
    pub alpha: f64,
    pub eta: f64,
    pub delta1: f64,
    pub residual: f64,
    pub window: [usize; 2],
    pub points: usize,
    pub exponential: ExponentialReport,
}

impl FitReport {
    pub fn new(len: usize, fit: DecayFit, exponential: ExponentialFit) -> Self {
        FitReport {
            len,
            alpha: fit.alpha,
            eta: fit.eta,
            delta1: fit.delta1,
            residual: fit.residual,
            window: [fit.window.0, fit.window.1],
            points: fit.points,
            exponential: exponential.into(),
        }
    }
}

/// Several sizes and the straight-line extrapolation of `eta` in `1/L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolatedReport {
    pub alpha: f64,
    pub eta: f64,
    pub delta1: f64,
    pub sizes: Vec<FitReport>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_csv_round_trip() {
        let rows = vec![
            ScanRow { len: 64, d: 4, alpha: 0.5, entropy: 1.25e-9, p_outcome: 0.125 },
            ScanRow { len: 64, d: 5, alpha: 2.0, entropy: 3.0e-300, p_outcome: 1.0 / 3.0 },
        ];
        let mut buf = Vec::new();
        write_scan_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("L,d,alpha,entropy,P_outcome\n"));
        assert_eq!(read_scan_csv(buf.as_slice()).unwrap(), rows);
    }
}
