use serde::{Deserialize, Serialize};

use super::{GroundTruth, Mode, RunRecord};
use crate::device::SegmentationMap;
use crate::error::{Error, Result};
use crate::metrics::{error_curve, gradient_norm_map, optimal_curve, sobel_edge_map, CurveKind, ErrorCurve};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub mode: Mode,
    pub measured: usize,
    pub stop_n: Option<usize>,
    pub time_to_stop: f64,
    /// Baseline time-to-stop over this run's.
    pub speedup: f64,
    /// `r(n) - optimal_r(n)` at the run's decision points.
    pub mean_gap: f64,
    pub max_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub truth_fingerprint: u64,
    pub rows: Vec<ComparisonRow>,
    /// `optimal_r(n)` for `n = 0..=N`.
    pub optimal: Vec<f64>,
}

/// Compares runs on one ground truth, the first record being the baseline.
/// The truth is rebuilt from the first record's configuration.
pub fn compare_runs(records: &[RunRecord]) -> Result<ComparisonReport> {
    let first = records
        .first()
        .ok_or_else(|| Error::Config("compare needs at least two records".into()))?;
    let truth = GroundTruth::from_config(&first.config)?;
    compare_runs_with_truth(records, &truth)
}

pub fn compare_runs_with_truth(records: &[RunRecord], truth: &GroundTruth) -> Result<ComparisonReport> {
    if records.len() < 2 {
        return Err(Error::Config("compare needs at least two records".into()));
    }
    for r in records {
        if r.summary.truth_fingerprint != truth.fingerprint {
            return Err(Error::GroundTruthMismatch(format!(
                "record fingerprint {:016x} differs from ground truth {:016x}",
                r.summary.truth_fingerprint, truth.fingerprint
            )));
        }
    }
    let optimal = optimal_curve(&gradient_norm_map(&truth.map.values))?;
    let base = records[0].summary.time_to_stop();
    let rows = records
        .iter()
        .map(|r| {
            let gaps: Vec<f64> = r
                .events
                .iter()
                .filter_map(|e| r.r_at(e.n).map(|x| x - optimal[e.n]))
                .collect();
            let t = r.summary.time_to_stop();
            ComparisonRow {
                mode: r.summary.mode,
                measured: r.summary.measured,
                stop_n: r.summary.stop_n,
                time_to_stop: t,
                speedup: if t > 0.0 { base / t } else { f64::INFINITY },
                mean_gap: if gaps.is_empty() { 0.0 } else { gaps.iter().sum::<f64>() / gaps.len() as f64 },
                max_gap: gaps.iter().copied().fold(0.0, f64::max),
            }
        })
        .collect();
    Ok(ComparisonReport {
        truth_fingerprint: truth.fingerprint,
        rows,
        optimal,
    })
}

impl ComparisonReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("mode,measured,stop_n,time_to_stop,speedup,mean_gap,max_gap\n");
        for r in &self.rows {
            s += &format!(
                "{},{},{},{},{},{},{}\n",
                r.mode,
                r.measured,
                r.stop_n.map(|n| n.to_string()).unwrap_or_default(),
                r.time_to_stop,
                r.speedup,
                r.mean_gap,
                r.max_gap
            );
        }
        s
    }
}

/// `e(n)`: the `r(n)` ratio with Sobel edge magnitudes of the segmentation.
pub fn edge_error_curve(record: &RunRecord, segmentation: Option<&SegmentationMap>) -> Result<ErrorCurve> {
    let seg = segmentation.ok_or_else(|| Error::Unsupported("edge error needs a ground-truth segmentation".into()))?;
    let edges = sobel_edge_map(seg);
    let dense = error_curve(&record.order, &edges)?;
    Ok(ErrorCurve::from_dense(CurveKind::Edge, &dense, 0..dense.len()))
}
