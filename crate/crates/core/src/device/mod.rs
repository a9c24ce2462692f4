//! Synthetic quantum-dot devices: constant-interaction energies, level-counting
//! current maps, diamond segmentation, noise profiles and CSV replay.

mod io;
mod noise;
mod params;
mod physics;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub use io::{load_recorded_map, save_map_csv, save_map_png, write_map_csv};
pub use noise::{synthesize_noise_profile, NoiseKind, NoiseProfile};
pub use params::{sample_device_params, DeviceParams, PriorConfig};
pub use physics::{
    electrochemical_potential, simulate_current_map, simulate_segmentation_map, total_energy, LevelModel, PixelState,
};

use crate::error::{Error, Result};
use crate::grid::{Pixel, VoltageWindow};

/// Full-resolution grid of current values, indexed `[row, col]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurrentMap {
    pub window: VoltageWindow,
    pub values: Array2<f64>,
    /// Divisor applied by [`CurrentMap::rescaled`]; 1 for raw maps.
    pub scale_factor: f64,
}

impl CurrentMap {
    pub fn new(window: VoltageWindow, values: Array2<f64>) -> Self {
        Self {
            window,
            values,
            scale_factor: 1.0,
        }
    }

    pub fn at(&self, p: Pixel) -> f64 {
        self.values[[p.row, p.col]]
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Divides the map so that the largest `|value|` over `initial` is exactly 1.
    pub fn rescaled(&self, initial: &[Pixel]) -> Result<CurrentMap> {
        let scale = initial.iter().map(|&p| self.at(p).abs()).fold(0.0, f64::max);
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::GroundTruth(
                "initial grid measured no current; the map cannot be rescaled".into(),
            ));
        }
        Ok(CurrentMap {
            window: self.window.clone(),
            values: self.values.mapv(|v| v / scale),
            scale_factor: self.scale_factor * scale,
        })
    }
}

/// Binary diamond labels (1 inside a Coulomb diamond).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentationMap {
    pub window: VoltageWindow,
    pub labels: Array2<u8>,
}
