use serde::{Deserialize, Serialize};

use super::gridscan_order;
use crate::acquisition::RampMetric;
use crate::error::{Error, Result};
use crate::grid::{Pixel, VoltageWindow};

/// Measurement cost: every pixel pays the settle and read times plus the
/// ramp from the previous probe position, both axes ramping at once.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeModel {
    pub settle_time: f64,
    pub per_pixel_read: f64,
    /// Volts per second on axis 1 and axis 2.
    pub ramp_rate: (f64, f64),
}

/// Full-grid alternating scan time the default model is calibrated to.
pub const GRIDSCAN_REFERENCE_SECONDS: f64 = 554.0;
/// Seconds to ramp across the full span of either axis.
pub const FULL_SPAN_RAMP_SECONDS: f64 = 0.15;
pub const DEFAULT_SETTLE_SECONDS: f64 = 0.005;

impl TimeModel {
    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x >= 0.0;
        if !(ok(self.settle_time) && ok(self.per_pixel_read)) {
            return Err(Error::Config("settle_time and per_pixel_read must be finite and >= 0".into()));
        }
        if !(self.ramp_rate.0 > 0.0 && self.ramp_rate.1 > 0.0) {
            return Err(Error::Config("ramp rates must be > 0".into()));
        }
        Ok(())
    }

    pub fn metric(&self, window: &VoltageWindow) -> RampMetric {
        RampMetric::new(window.clone(), self.ramp_rate)
    }

    /// Time of a single step from `from` to pixel `p`.
    pub fn step(&self, window: &VoltageWindow, from: (f64, f64), p: Pixel) -> f64 {
        self.settle_time + self.per_pixel_read + self.metric(window).to_pixel(from, p)
    }

    /// Model whose alternating grid scan of `window` takes `total` seconds,
    /// with the ramp rates set by `FULL_SPAN_RAMP_SECONDS` and the read time
    /// absorbing the rest.
    pub fn calibrate(window: &VoltageWindow, total: f64) -> Result<Self> {
        let span1 = window.axis1_range.1 - window.axis1_range.0;
        let span2 = window.axis2_range.1 - window.axis2_range.0;
        let mut model = TimeModel {
            settle_time: DEFAULT_SETTLE_SECONDS,
            per_pixel_read: 0.0,
            ramp_rate: (span1 / FULL_SPAN_RAMP_SECONDS, span2 / FULL_SPAN_RAMP_SECONDS),
        };
        let order: Vec<Pixel> = gridscan_order(window.rows(), window.cols(), 8)?.into_iter().flatten().collect();
        let fixed = simulated_time(&order, window.origin(), window, &model);
        let n = order.len() as f64;
        let read = (total - fixed) / n;
        if !(read >= 0.0) {
            return Err(Error::Config(format!(
                "ramping alone takes {fixed:.1} s, more than the {total} s target"
            )));
        }
        model.per_pixel_read = read;
        Ok(model)
    }

    /// Calibrated to the reference total, falling back to uncalibrated
    /// defaults when the window cannot be grid-scanned.
    pub fn calibrated(window: &VoltageWindow) -> Self {
        Self::calibrate(window, GRIDSCAN_REFERENCE_SECONDS).unwrap_or(TimeModel {
            settle_time: DEFAULT_SETTLE_SECONDS,
            per_pixel_read: 0.0288,
            ramp_rate: (
                (window.axis1_range.1 - window.axis1_range.0) / FULL_SPAN_RAMP_SECONDS,
                (window.axis2_range.1 - window.axis2_range.0) / FULL_SPAN_RAMP_SECONDS,
            ),
        })
    }
}

/// Seconds to measure `locations` in order, starting with the probe at `start`.
pub fn simulated_time(locations: &[Pixel], start: (f64, f64), window: &VoltageWindow, model: &TimeModel) -> f64 {
    let metric = model.metric(window);
    let per = model.settle_time + model.per_pixel_read;
    let mut at = start;
    let mut total = 0.0;
    for &p in locations {
        let v = window.voltages(p);
        total += per + metric.between(at, v);
        at = v;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_location_costs_settle_and_read() {
        let w = VoltageWindow::default().with_resolution(16, 16);
        let m = TimeModel {
            settle_time: 0.01,
            per_pixel_read: 0.02,
            ramp_rate: (1.0, 1.0),
        };
        let p = Pixel::new(3, 4);
        assert!((simulated_time(&[p], w.voltages(p), &w, &m) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn default_calibration_hits_reference() {
        let w = VoltageWindow::default();
        let m = TimeModel::calibrated(&w);
        let order: Vec<Pixel> = gridscan_order(128, 128, 8).unwrap().into_iter().flatten().collect();
        let t = simulated_time(&order, w.origin(), &w, &m);
        assert!((t - GRIDSCAN_REFERENCE_SECONDS).abs() < 1e-6 * GRIDSCAN_REFERENCE_SECONDS);
    }
}
