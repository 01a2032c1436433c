//! CSV rows, readers and writers, and console tables.
//!
//! Files carry full precision (shortest round-trip float formatting);
//! console tables round to four significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anpc_core::oracle::Comparison;
use anpc_core::{EnergySample, LossReport, Switch};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
}

#[derive(Debug, Error)]
#[error("{path}{}: {message}", line.map(|l| format!(", line {l}")).unwrap_or_default())]
pub struct ReadError {
    pub path: PathBuf,
    pub line: Option<u64>,
    pub message: String,
}

/// One device of a loss report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub strategy: String,
    pub device: String,
    pub rms_fwd_a: f64,
    pub rms_rev_a: f64,
    pub p_cond_w: f64,
    pub p_sw_w: f64,
    pub p_total_w: f64,
}

pub const REPORT_HEADER: &str = "strategy,device,rms_fwd_a,rms_rev_a,p_cond_w,p_sw_w,p_total_w";

pub fn report_rows(report: &LossReport) -> Vec<ReportRow> {
    report
        .devices
        .iter()
        .map(|d| ReportRow {
            strategy: report.strategy.to_string(),
            device: d.device.to_string(),
            rms_fwd_a: d.rms_forward,
            rms_rev_a: d.rms_reverse,
            p_cond_w: d.conduction,
            p_sw_w: d.switching,
            p_total_w: d.total(),
        })
        .collect()
}

/// One device at one sweep grid point. The simulated columns are empty
/// unless the sweep runs the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: f64,
    pub cos_phi: f64,
    pub i_peak: f64,
    pub strategy: String,
    pub device: String,
    pub rms_fwd_a: f64,
    pub rms_rev_a: f64,
    pub p_cond_w: f64,
    pub p_sw_w: f64,
    pub p_total_w: f64,
    pub sim_rms_fwd_a: Option<f64>,
    pub sim_rms_rev_a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub strategy: String,
    pub analytic_total_w: f64,
    pub simulated_total_w: f64,
    pub rel_error: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl From<&Comparison> for CompareRow {
    fn from(c: &Comparison) -> Self {
        CompareRow {
            strategy: c.strategy.to_string(),
            analytic_total_w: c.analytic_total,
            simulated_total_w: c.simulated_total,
            rel_error: c.total_error,
            threshold: c.threshold,
            pass: c.pass(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveformRow {
    pub theta_rad: f64,
    pub i_load_a: f64,
    pub i_s1_a: f64,
    pub i_s2_a: f64,
    pub i_s3_a: f64,
    pub i_s4_a: f64,
    pub i_s5_a: f64,
    pub i_s6_a: f64,
    /// `P`, `0` or `N`.
    pub level: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub theta_rad: f64,
    pub v_ref: f64,
    pub v_tri1: f64,
    pub v_tri2: f64,
    pub s1: u8,
    pub s2: u8,
    pub s3: u8,
    pub s4: u8,
    pub s5: u8,
    pub s6: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct EnergySampleRow {
    current_a: f64,
    energy_j: f64,
}

/// Serialises `rows` to CSV bytes with a header line.
pub fn to_csv<T: Serialize>(rows: &[T]) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialise to memory");
    }
    w.into_inner().expect("in-memory writer")
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), OutputError> {
    let fail = |e: std::io::Error| OutputError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(fail)?;
    }
    fs::write(path, bytes).map_err(fail)
}

fn read_error(path: &Path, e: csv::Error) -> ReadError {
    ReadError {
        path: path.to_path_buf(),
        line: e.position().map(|p| p.line()),
        message: match e.kind() {
            csv::ErrorKind::Deserialize { err, .. } => err.to_string(),
            _ => e.to_string(),
        },
    }
}

/// Reads CSV rows, requiring the header to be exactly `header`.
pub fn read_csv<T: DeserializeOwned>(path: &Path, header: &str) -> Result<Vec<T>, ReadError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| read_error(path, e))?;
    let found = r.headers().map_err(|e| read_error(path, e))?.iter().collect::<Vec<_>>().join(",");
    if found != header {
        return Err(ReadError {
            path: path.to_path_buf(),
            line: Some(1),
            message: format!("expected header `{header}`, found `{found}`"),
        });
    }
    r.deserialize().map(|row| row.map_err(|e| read_error(path, e))).collect()
}

pub fn read_report(path: &Path) -> Result<Vec<ReportRow>, ReadError> {
    read_csv(path, REPORT_HEADER)
}

pub const ENERGY_HEADER: &str = "current_a,energy_j";

/// Reads `current_a,energy_j` samples.
pub fn read_energy_samples(path: &Path) -> Result<Vec<EnergySample>, ReadError> {
    let rows: Vec<EnergySampleRow> = read_csv(path, ENERGY_HEADER)?;
    Ok(rows
        .into_iter()
        .map(|r| EnergySample::new(r.current_a, r.energy_j))
        .collect())
}

pub fn energy_samples_csv(samples: &[EnergySample]) -> Vec<u8> {
    let rows: Vec<EnergySampleRow> = samples
        .iter()
        .map(|s| EnergySampleRow {
            current_a: s.current,
            energy_j: s.energy,
        })
        .collect();
    to_csv(&rows)
}

/// `x` rounded to `digits` significant digits.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.*e}", digits - 1)
    }
}

/// Right-aligned text table; the first column is left-aligned.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(s, "{cell:<w$}");
            } else {
                let _ = write!(s, "  {cell:>w$}");
            }
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}

pub fn report_table(report: &LossReport) -> String {
    let mut rows: Vec<Vec<String>> = Switch::ALL
        .iter()
        .map(|&sw| {
            let d = report.device(sw);
            vec![
                sw.to_string(),
                sig(d.rms_forward, 4),
                sig(d.rms_reverse, 4),
                sig(d.conduction, 4),
                sig(d.switching, 4),
                sig(d.total(), 4),
            ]
        })
        .collect();
    rows.push(vec![
        "leg".into(),
        String::new(),
        String::new(),
        sig(report.conduction_total(), 4),
        sig(report.switching_total(), 4),
        sig(report.leg_total(), 4),
    ]);
    format!(
        "{}\n{}",
        report.strategy,
        table(&["device", "I_F rms (A)", "I_R rms (A)", "P_cond (W)", "P_sw (W)", "P_total (W)"], &rows)
    )
}

pub fn compare_table(comparisons: &[Comparison]) -> String {
    let rows: Vec<Vec<String>> = comparisons
        .iter()
        .map(|c| {
            vec![
                c.strategy.to_string(),
                sig(c.analytic_total, 4),
                sig(c.simulated_total, 4),
                format!("{}%", sig(100.0 * c.total_error, 4)),
                if c.pass() { "pass" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    table(&["strategy", "analytic (W)", "simulated (W)", "error", "verdict"], &rows)
}
