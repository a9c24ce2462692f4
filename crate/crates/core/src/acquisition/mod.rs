//! Choosing where to measure next.

mod info_gain;
mod segmentation;
mod select;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use info_gain::{information_gain_map, kl_divergence, pixel_information_gain};
pub use segmentation::segmentation_disagreement_map;
pub use select::{plan_tour, select_batch, select_pixel, top_locations, BatchPlan, RampMetric};

/// Per-pixel acquisition value. Measured pixels hold `-inf`; every other
/// value is finite and non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionMap {
    pub values: Array2<f64>,
}

impl AcquisitionMap {
    pub fn new(values: Array2<f64>) -> Self {
        Self { values }
    }

    pub fn is_masked(&self, row: usize, col: usize) -> bool {
        self.values[[row, col]] == f64::NEG_INFINITY
    }

    pub fn unmasked_count(&self) -> usize {
        self.values.iter().filter(|&&v| v != f64::NEG_INFINITY).count()
    }

    /// `(max, mean)` over unmasked pixels.
    pub fn stats(&self) -> (f64, f64) {
        let (mut max, mut sum, mut n) = (0.0f64, 0.0, 0usize);
        for &v in self.values.iter().filter(|&&v| v != f64::NEG_INFINITY) {
            max = max.max(v);
            sum += v;
            n += 1;
        }
        (max, if n > 0 { sum / n as f64 } else { 0.0 })
    }

    /// Copy with masked pixels set to 0, for export.
    pub fn display_values(&self) -> Array2<f64> {
        self.values.mapv(|v| if v == f64::NEG_INFINITY { 0.0 } else { v })
    }
}
