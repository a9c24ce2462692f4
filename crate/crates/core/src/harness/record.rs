use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, Mode};
use crate::error::{Error, Result};
use crate::grid::Pixel;
use crate::metrics::{RealTimeEstimate, StopDecision};

/// One decision of the acquisition loop.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepEvent {
    /// Measurements before this step.
    pub n: usize,
    pub batch_index: usize,
    pub locations: Vec<Pixel>,
    /// `(max, mean)` of the acquisition map, absent when it was skipped.
    pub acquisition_stats: Option<(f64, f64)>,
    pub weight_entropy: Option<f64>,
    pub mh_acceptance: Option<f64>,
    /// Simulated seconds spent before this step.
    pub elapsed: f64,
    /// Actual `r(n)` against the ground truth.
    pub r: Option<f64>,
    pub estimate: Option<RealTimeEstimate>,
    pub decision: Option<StopDecision>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mode: Mode,
    pub n_pixels: usize,
    pub measured: usize,
    pub truth_fingerprint: u64,
    /// Measurements when the stopping rule first fired.
    pub stop_n: Option<usize>,
    pub stop_time: Option<f64>,
    pub total_time: f64,
    /// Seconds of decision computation (excluded from `total_time` unless
    /// configured otherwise).
    pub compute_seconds: f64,
}

impl RunSummary {
    /// Time to the stop decision, or the whole run when the rule never fired.
    pub fn time_to_stop(&self) -> f64 {
        self.stop_time.unwrap_or(self.total_time)
    }
}

/// Everything a run produced; `order[k]` is the `k+1`-th measured pixel and
/// `times[k]` the simulated clock after it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub events: Vec<StepEvent>,
    pub order: Vec<Pixel>,
    pub times: Vec<f64>,
    /// `r(n)` for `n = 0..=measured`.
    pub r_curve: Vec<f64>,
    pub summary: RunSummary,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line {
    Config { config: Box<ExperimentConfig> },
    Step { event: StepEvent },
    Measurements { order: Vec<Pixel>, times: Vec<f64>, r_curve: Vec<f64> },
    Summary { summary: RunSummary },
}

impl RunRecord {
    /// Curve value at `n` measurements.
    pub fn r_at(&self, n: usize) -> Option<f64> {
        self.r_curve.get(n).copied()
    }

    pub fn time_at(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.times[n - 1]
        }
    }

    pub fn write_jsonl<W: Write>(&self, out: W) -> Result<()> {
        let mut out = BufWriter::new(out);
        let mut line = |l: &Line| -> Result<()> {
            serde_json::to_writer(&mut out, l)?;
            out.write_all(b"\n")?;
            Ok(())
        };
        line(&Line::Config {
            config: Box::new(self.config.clone()),
        })?;
        for e in &self.events {
            line(&Line::Step { event: e.clone() })?;
        }
        line(&Line::Measurements {
            order: self.order.clone(),
            times: self.times.clone(),
            r_curve: self.r_curve.clone(),
        })?;
        line(&Line::Summary {
            summary: self.summary.clone(),
        })?;
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_jsonl(File::create(path)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let perr = |row: usize, message: String| Error::Parse {
            path: path.to_path_buf(),
            row,
            col: 0,
            message,
        };
        let mut config = None;
        let mut events = Vec::new();
        let mut meas = None;
        let mut summary = None;
        for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Line>(&line).map_err(|e| perr(i + 1, e.to_string()))? {
                Line::Config { config: c } => config = Some(*c),
                Line::Step { event } => events.push(event),
                Line::Measurements { order, times, r_curve } => meas = Some((order, times, r_curve)),
                Line::Summary { summary: s } => summary = Some(s),
            }
        }
        let (order, times, r_curve) = meas.ok_or_else(|| perr(0, "no measurements line".into()))?;
        Ok(RunRecord {
            config: config.ok_or_else(|| perr(0, "no config line".into()))?,
            events,
            order,
            times,
            r_curve,
            summary: summary.ok_or_else(|| perr(0, "no summary line".into()))?,
        })
    }
}
