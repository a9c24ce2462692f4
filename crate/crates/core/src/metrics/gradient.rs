use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::device::SegmentationMap;

/// Per-pixel magnitude map `v(x)`, non-negative and finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientMap {
    pub values: Array2<f64>,
}

impl GradientMap {
    pub fn total(&self) -> f64 {
        self.values.sum()
    }
}

/// Derivatives along rows and columns in pixel units: central differences in
/// the interior, one-sided at the borders, zero along an axis of length 1.
pub fn gradient_components(values: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let (rows, cols) = values.dim();
    let d = |a: f64, b: f64, h: f64| (b - a) / h;
    let gy = Array2::from_shape_fn((rows, cols), |(r, c)| match rows {
        1 => 0.0,
        _ if r == 0 => d(values[[0, c]], values[[1, c]], 1.0),
        _ if r == rows - 1 => d(values[[r - 1, c]], values[[r, c]], 1.0),
        _ => d(values[[r - 1, c]], values[[r + 1, c]], 2.0),
    });
    let gx = Array2::from_shape_fn((rows, cols), |(r, c)| match cols {
        1 => 0.0,
        _ if c == 0 => d(values[[r, 0]], values[[r, 1]], 1.0),
        _ if c == cols - 1 => d(values[[r, c - 1]], values[[r, c]], 1.0),
        _ => d(values[[r, c - 1]], values[[r, c + 1]], 2.0),
    });
    (gx, gy)
}

/// Euclidean norm of the numerical current gradient.
pub fn gradient_norm_map(values: &Array2<f64>) -> GradientMap {
    let (gx, gy) = gradient_components(values);
    let mut v = gx;
    v.zip_mut_with(&gy, |a, b| *a = a.hypot(*b));
    GradientMap { values: v }
}

/// Sobel edge magnitude of a segmentation, borders replicated.
pub fn sobel_edge_map(seg: &SegmentationMap) -> GradientMap {
    let (rows, cols) = seg.labels.dim();
    let at = |r: isize, c: isize| {
        let r = r.clamp(0, rows as isize - 1) as usize;
        let c = c.clamp(0, cols as isize - 1) as usize;
        seg.labels[[r, c]] as f64
    };
    let values = Array2::from_shape_fn((rows, cols), |(r, c)| {
        let (r, c) = (r as isize, c as isize);
        let gx = (at(r - 1, c + 1) + 2.0 * at(r, c + 1) + at(r + 1, c + 1))
            - (at(r - 1, c - 1) + 2.0 * at(r, c - 1) + at(r + 1, c - 1));
        let gy = (at(r + 1, c - 1) + 2.0 * at(r + 1, c) + at(r + 1, c + 1))
            - (at(r - 1, c - 1) + 2.0 * at(r - 1, c) + at(r - 1, c + 1));
        gx.hypot(gy)
    });
    GradientMap { values }
}
