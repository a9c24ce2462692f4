use serde::{Deserialize, Serialize};

use super::AcquisitionMap;
use crate::error::{Error, Result};
use crate::grid::{Pixel, VoltageWindow};

/// Time to ramp both gates between two voltage points. The axes ramp
/// concurrently, so the slower axis sets the time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RampMetric {
    pub window: VoltageWindow,
    /// Volts per second on axis 1 and axis 2.
    pub ramp_rate: (f64, f64),
}

impl RampMetric {
    pub fn new(window: VoltageWindow, ramp_rate: (f64, f64)) -> Self {
        Self { window, ramp_rate }
    }

    /// Equal ramp rate on both axes, i.e. Chebyshev distance in volts.
    pub fn volts(window: VoltageWindow) -> Self {
        Self::new(window, (1.0, 1.0))
    }

    pub fn between(&self, a: (f64, f64), b: (f64, f64)) -> f64 {
        let t1 = (a.0 - b.0).abs() / self.ramp_rate.0;
        let t2 = (a.1 - b.1).abs() / self.ramp_rate.1;
        t1.max(t2)
    }

    pub fn to_pixel(&self, from: (f64, f64), p: Pixel) -> f64 {
        self.between(from, self.window.voltages(p))
    }

    /// Ramp cost of visiting `path` in order from `start`.
    pub fn path_length(&self, start: (f64, f64), path: &[Pixel]) -> f64 {
        let mut at = start;
        let mut total = 0.0;
        for &p in path {
            let v = self.window.voltages(p);
            total += self.between(at, v);
            at = v;
        }
        total
    }
}

/// Ordered pixels to acquire next.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchPlan {
    pub locations: Vec<Pixel>,
    pub batch_index: usize,
    pub size: usize,
    /// Fewer unmeasured pixels remained than requested.
    pub truncated: bool,
}

/// Highest-valued unmasked pixel; ties go to the first in row-major order.
pub fn select_pixel(acq: &AcquisitionMap) -> Result<Pixel> {
    let cols = acq.values.ncols();
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in acq.values.iter().enumerate() {
        if v == f64::NEG_INFINITY {
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| Pixel::from_index(i, cols)).ok_or(Error::MapComplete)
}

/// `size` highest-valued unmasked pixels (row-major tie-break), unordered.
pub fn top_locations(acq: &AcquisitionMap, size: usize) -> Vec<Pixel> {
    let cols = acq.values.ncols();
    let mut cand: Vec<(usize, f64)> = acq
        .values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != f64::NEG_INFINITY)
        .map(|(i, &v)| (i, v))
        .collect();
    cand.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    cand.truncate(size);
    cand.into_iter().map(|(i, _)| Pixel::from_index(i, cols)).collect()
}

/// Takes the top-`size` pixels and orders them into a short ramp path from
/// the probe position `start`.
pub fn select_batch(
    acq: &AcquisitionMap,
    size: usize,
    batch_index: usize,
    start: (f64, f64),
    metric: &RampMetric,
) -> Result<BatchPlan> {
    let available = acq.unmasked_count();
    if available == 0 {
        return Err(Error::MapComplete);
    }
    let truncated = size > available;
    if truncated {
        log::warn!("batch of {size} requested but only {available} pixels remain");
    }
    let top = top_locations(acq, size);
    let locations = plan_tour(&top, start, metric);
    Ok(BatchPlan {
        size: locations.len(),
        locations,
        batch_index,
        truncated,
    })
}

const TWO_OPT_LIMIT: usize = 600;

/// Orders `points` into a short open path starting at `start`.
///
/// Builds a greedy nearest-neighbour tour, polishes it with 2-opt when the
/// batch is small, and keeps whichever of that, plain row-major order and a
/// serpentine sweep is shortest.
pub fn plan_tour(points: &[Pixel], start: (f64, f64), metric: &RampMetric) -> Vec<Pixel> {
    if points.len() <= 1 {
        return points.to_vec();
    }
    let mut greedy = greedy_tour(points, start, metric);
    if points.len() <= TWO_OPT_LIMIT {
        two_opt(&mut greedy, start, metric);
    }
    let mut row_major = points.to_vec();
    row_major.sort();
    let mut serpentine = row_major.clone();
    serpentine.sort_by(|a, b| {
        a.row.cmp(&b.row).then(if a.row % 2 == 0 { a.col.cmp(&b.col) } else { b.col.cmp(&a.col) })
    });
    [greedy, row_major, serpentine]
        .into_iter()
        .map(|t| (metric.path_length(start, &t), t))
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, t)| t)
        .expect("three candidates")
}

fn greedy_tour(points: &[Pixel], start: (f64, f64), metric: &RampMetric) -> Vec<Pixel> {
    let volts: Vec<(f64, f64)> = points.iter().map(|&p| metric.window.voltages(p)).collect();
    let mut left: Vec<usize> = (0..points.len()).collect();
    let mut at = start;
    let mut out = Vec::with_capacity(points.len());
    while !left.is_empty() {
        let (k, _) = left
            .iter()
            .enumerate()
            .map(|(k, &i)| (k, metric.between(at, volts[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
            .expect("non-empty");
        let i = left.swap_remove(k);
        at = volts[i];
        out.push(points[i]);
    }
    out
}

fn two_opt(path: &mut [Pixel], start: (f64, f64), metric: &RampMetric) {
    let n = path.len();
    let vol = |path: &[Pixel], i: usize| metric.window.voltages(path[i]);
    for _ in 0..8 {
        let mut improved = false;
        for i in 0..n - 1 {
            let a = if i == 0 { start } else { vol(path, i - 1) };
            let b = vol(path, i);
            for j in i + 1..n {
                let c = vol(path, j);
                let d_old = metric.between(a, b) + if j + 1 < n { metric.between(c, vol(path, j + 1)) } else { 0.0 };
                let d_new = metric.between(a, c) + if j + 1 < n { metric.between(b, vol(path, j + 1)) } else { 0.0 };
                if d_new + 1e-12 < d_old {
                    path[i..=j].reverse();
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            break;
        }
    }
}
