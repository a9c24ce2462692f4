//! Pixel addressing and the voltage window that maps pixels to bias/gate voltages.
//!
//! Rows follow the vertical axis (axis 2, bias) and columns the horizontal
//! axis (axis 1, gate). Row 0 sits at the minimum of axis 2. Voltages are
//! taken at pixel centres, so an even number of rows over a symmetric bias
//! range never lands exactly on zero bias.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pixel {
    pub row: usize,
    pub col: usize,
}

impl Pixel {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }

    /// Row-major linear index.
    pub fn index(self, cols: usize) -> usize {
        self.row * cols + self.col
    }

    pub fn from_index(index: usize, cols: usize) -> Self {
        Self::new(index / cols, index % cols)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoltageWindow {
    /// Horizontal axis (gate) range.
    pub axis1_range: (f64, f64),
    /// Vertical axis (bias) range.
    pub axis2_range: (f64, f64),
    /// `(rows, cols)`.
    pub resolution: (usize, usize),
}

impl Default for VoltageWindow {
    fn default() -> Self {
        Self {
            axis1_range: (0.0, 8.0),
            axis2_range: (-1.5, 1.5),
            resolution: (128, 128),
        }
    }
}

impl VoltageWindow {
    pub fn new(axis1_range: (f64, f64), axis2_range: (f64, f64), rows: usize, cols: usize) -> Result<Self> {
        let w = Self {
            axis1_range,
            axis2_range,
            resolution: (rows, cols),
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let ok_range = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ok_range(self.axis1_range) {
            return Err(Error::Config(format!("axis1 range {:?} must satisfy min < max", self.axis1_range)));
        }
        if !ok_range(self.axis2_range) {
            return Err(Error::Config(format!("axis2 range {:?} must satisfy min < max", self.axis2_range)));
        }
        if self.resolution.0 == 0 || self.resolution.1 == 0 {
            return Err(Error::Config("resolution must be non-zero on both axes".into()));
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.resolution.0
    }

    pub fn cols(&self) -> usize {
        self.resolution.1
    }

    pub fn n_pixels(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn with_resolution(&self, rows: usize, cols: usize) -> Self {
        Self {
            resolution: (rows, cols),
            ..self.clone()
        }
    }

    pub fn axis1_step(&self) -> f64 {
        (self.axis1_range.1 - self.axis1_range.0) / self.cols() as f64
    }

    pub fn axis2_step(&self) -> f64 {
        (self.axis2_range.1 - self.axis2_range.0) / self.rows() as f64
    }

    /// Gate voltage of a column's centre.
    pub fn axis1_at(&self, col: usize) -> f64 {
        self.axis1_range.0 + (col as f64 + 0.5) * self.axis1_step()
    }

    /// Bias voltage of a row's centre.
    pub fn axis2_at(&self, row: usize) -> f64 {
        self.axis2_range.0 + (row as f64 + 0.5) * self.axis2_step()
    }

    /// `(axis1, axis2)` voltages of a pixel centre.
    pub fn voltages(&self, p: Pixel) -> (f64, f64) {
        (self.axis1_at(p.col), self.axis2_at(p.row))
    }

    /// Lower-left corner of the window, where the probe starts.
    pub fn origin(&self) -> (f64, f64) {
        (self.axis1_range.0, self.axis2_range.0)
    }

    pub fn contains(&self, p: Pixel) -> bool {
        p.row < self.rows() && p.col < self.cols()
    }

    pub fn pixels(&self) -> impl Iterator<Item = Pixel> + '_ {
        let cols = self.cols();
        (0..self.n_pixels()).map(move |i| Pixel::from_index(i, cols))
    }
}

/// Pixels of a uniform `rows_k x cols_k` sub-grid, `i * (rows / rows_k)` on each axis.
///
/// Coarser grids of the same family are subsets of finer ones, which is what
/// lets the alternating grid scan refine without repeating a measurement.
pub fn uniform_subgrid(rows: usize, cols: usize, rows_k: usize, cols_k: usize) -> Vec<Pixel> {
    let rs = (rows / rows_k.max(1)).max(1);
    let cs = (cols / cols_k.max(1)).max(1);
    let mut out = Vec::with_capacity(rows_k * cols_k);
    for i in 0..rows_k.min(rows) {
        for j in 0..cols_k.min(cols) {
            out.push(Pixel::new(i * rs, j * cs));
        }
    }
    out
}
