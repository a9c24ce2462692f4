//! Gradient-mass error `r(n)`, its ensemble estimates and the stopping rule.

mod error;
mod estimate;
mod gradient;
mod stopping;

use serde::{Deserialize, Serialize};

pub use error::{
    error_curve, error_r, optimal_curve, optimal_r, summarize_estimates, weighted_percentile, RealTimeEstimate,
};
pub use estimate::{augmented_r_estimates, ensemble_r_estimates, estimate_r, MemberEstimates};
pub use gradient::{gradient_components, gradient_norm_map, sobel_edge_map, GradientMap};
pub use stopping::{stopping_decide, Remaining, StopDecision, StoppingState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Actual,
    EstimateMean,
    EstimateLo90,
    EstimateHi90,
    Optimal,
    Gridscan,
    Edge,
}

/// `(n, r)` points with strictly increasing `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub kind: CurveKind,
    pub points: Vec<(usize, f64)>,
}

impl ErrorCurve {
    pub fn new(kind: CurveKind) -> Self {
        Self { kind, points: Vec::new() }
    }

    /// Appends `(n, r)`, replacing the last point if `n` repeats.
    pub fn push(&mut self, n: usize, r: f64) {
        match self.points.last_mut() {
            Some(last) if last.0 == n => last.1 = r,
            _ => self.points.push((n, r)),
        }
    }

    pub fn at(&self, n: usize) -> Option<f64> {
        self.points
            .binary_search_by_key(&n, |p| p.0)
            .ok()
            .map(|i| self.points[i].1)
    }

    /// Curve sampled from a dense per-`n` vector.
    pub fn from_dense(kind: CurveKind, dense: &[f64], ns: impl IntoIterator<Item = usize>) -> Self {
        let mut c = Self::new(kind);
        for n in ns {
            if let Some(&r) = dense.get(n) {
                c.push(n, r);
            }
        }
        c
    }
}
