//! Keygen versus key-expansion timing.
//!
//! All keygen trials run first, then all expansion trials; the two are never
//! interleaved. Expander sampling is charged to the expansion time. The
//! first round of each loop is a warm-up and is not recorded.

use std::fmt::Write as _;
use std::hint::black_box;
use std::time::Instant;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::expansion::{self, ExpandedPublicKey, ExpanderRole};
use crate::ntru;
use crate::params::{NtruParams, Preset};
use crate::{Error, Result};

pub const MIN_TRIALS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub mean_ms: f64,
    pub median_ms: f64,
    /// Sample standard deviation (n − 1 denominator).
    pub stddev_ms: f64,
    pub trials: usize,
}

impl TimingStats {
    /// Panics on an empty sample.
    pub fn from_samples(samples_ms: &[f64]) -> Self {
        assert!(!samples_ms.is_empty(), "no timing samples");
        let n = samples_ms.len();
        let mean = samples_ms.iter().sum::<f64>() / n as f64;
        let mut sorted = samples_ms.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
        };
        let stddev = if n > 1 {
            let ss: f64 = samples_ms.iter().map(|x| (x - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        TimingStats {
            mean_ms: mean,
            median_ms: median,
            stddev_ms: stddev,
            trials: n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub preset: String,
    pub security_level: u8,
    pub keygen: TimingStats,
    pub expansion: TimingStats,
    pub speedup_ratio: f64,
}

impl BenchReport {
    pub fn from_samples(params: &NtruParams, keygen_ms: &[f64], expansion_ms: &[f64]) -> Self {
        let keygen = TimingStats::from_samples(keygen_ms);
        let expansion = TimingStats::from_samples(expansion_ms);
        BenchReport {
            preset: params.label(),
            security_level: params.preset().map_or(0, Preset::security_level),
            keygen,
            expansion,
            speedup_ratio: keygen.mean_ms / expansion.mean_ms,
        }
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    // Clamp so a sub-resolution measurement still counts as positive.
    (start.elapsed().as_nanos().max(1)) as f64 / 1e6
}

pub fn bench_preset<R: RngCore + ?Sized>(
    params: &NtruParams,
    trials: usize,
    rng: &mut R,
) -> Result<BenchReport> {
    if trials < MIN_TRIALS {
        return Err(Error::InvalidParams(format!(
            "at least {MIN_TRIALS} trials required, got {trials}"
        )));
    }
    params.validate()?;

    let mut keygen_ms = Vec::with_capacity(trials);
    let mut last = None;
    for round in 0..=trials {
        let start = Instant::now();
        let kp = black_box(ntru::keygen(params, rng)?);
        let t = elapsed_ms(start);
        if round > 0 {
            keygen_ms.push(t);
        }
        last = Some(kp);
    }
    let original = ExpandedPublicKey::original(&last.expect("at least one keygen").public);

    let mut expansion_ms = Vec::with_capacity(trials);
    for round in 0..=trials {
        let start = Instant::now();
        let r = expansion::sample_expander(params, ExpanderRole::Direct, rng)?;
        black_box(expansion::expand_key(&original, &r, params)?);
        let t = elapsed_ms(start);
        if round > 0 {
            expansion_ms.push(t);
        }
    }

    Ok(BenchReport::from_samples(params, &keygen_ms, &expansion_ms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Text,
}

impl std::str::FromStr for TableFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TableFormat::Csv),
            "text" => Ok(TableFormat::Text),
            other => Err(Error::InvalidParams(format!("unknown table format `{other}`"))),
        }
    }
}

pub const TABLE_COLUMNS: [&str; 5] = ["preset", "security_level", "keygen_ms", "expansion_ms", "speedup"];

fn row(r: &BenchReport) -> [String; 5] {
    [
        r.preset.clone(),
        r.security_level.to_string(),
        format!("{:.6}", r.keygen.mean_ms),
        format!("{:.6}", r.expansion.mean_ms),
        format!("{:.3}", r.speedup_ratio),
    ]
}

pub fn emit_table(reports: &[BenchReport], format: TableFormat) -> Vec<u8> {
    let rows: Vec<[String; 5]> = reports.iter().map(row).collect();
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            let _ = writeln!(out, "{}", TABLE_COLUMNS.join(","));
            for r in &rows {
                let _ = writeln!(out, "{}", r.join(","));
            }
        }
        TableFormat::Text => {
            let mut widths = TABLE_COLUMNS.map(str::len);
            for r in &rows {
                for (w, cell) in widths.iter_mut().zip(r) {
                    *w = (*w).max(cell.len());
                }
            }
            let line = |cells: [&str; 5]| {
                let mut s = format!("{:<w$}", cells[0], w = widths[0]);
                for (cell, w) in cells.iter().zip(widths).skip(1) {
                    let _ = write!(s, "  {cell:>w$}");
                }
                s
            };
            let _ = writeln!(out, "{}", line(TABLE_COLUMNS));
            for r in &rows {
                let _ = writeln!(out, "{}", line(r.each_ref().map(String::as_str)));
            }
        }
    }
    out.into_bytes()
}
