use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TimeModel;
use crate::device::{NoiseKind, PriorConfig};
use crate::error::{Error, Result};
use crate::grid::VoltageWindow;
use crate::metrics::Remaining;
use crate::posterior::{MhConfig, DEFAULT_SNR_LEVELS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Batch,
    Pixelwise,
    Gridscan,
    SegmentationBatch,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "batch" => Ok(Mode::Batch),
            "pixelwise" | "pixel" => Ok(Mode::Pixelwise),
            "gridscan" | "grid" => Ok(Mode::Gridscan),
            "segmentation_batch" | "segmentation" => Ok(Mode::SegmentationBatch),
            _ => Err(Error::Config(format!("unknown mode '{s}'"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Batch => "batch",
            Mode::Pixelwise => "pixelwise",
            Mode::Gridscan => "gridscan",
            Mode::SegmentationBatch => "segmentation_batch",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopMode {
    Off,
    Infinite,
    Budget,
}

impl FromStr for StopMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "off" => Ok(StopMode::Off),
            "infinite" | "inf" => Ok(StopMode::Infinite),
            "budget" => Ok(StopMode::Budget),
            _ => Err(Error::Config(format!("unknown stop mode '{s}' (expected off, infinite or budget)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StopConfig {
    pub mode: StopMode,
    /// Total budget `T` in pixels; required for [`StopMode::Budget`].
    pub total_budget: Option<f64>,
    /// Diagrams still to measure after this one (`K`).
    pub remaining: Remaining,
    /// Keep measuring after the rule fires, recording only the first stop.
    pub halt_on_stop: bool,
}

impl Default for StopConfig {
    fn default() -> Self {
        Self {
            mode: StopMode::Infinite,
            total_budget: None,
            remaining: Remaining::Infinite,
            halt_on_stop: true,
        }
    }
}

/// Synthetic noise added to a simulated ground truth at a fixed SNR.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruthNoise {
    pub kind: NoiseKind,
    pub snr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AugmentationConfig {
    /// Noise generators cycled over the profiles.
    pub kinds: Vec<NoiseKind>,
    pub profiles: usize,
    pub snr_levels: Vec<f64>,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            kinds: vec![
                NoiseKind::GaussianWhite { sigma: 1.0 },
                NoiseKind::Pink1OverF { sigma: 1.0 },
                NoiseKind::Telegraph {
                    amplitude: 1.0,
                    switch_prob: 0.02,
                },
            ],
            profiles: 10,
            snr_levels: DEFAULT_SNR_LEVELS.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub window: VoltageWindow,
    pub ensemble_size: usize,
    pub lambda: f64,
    pub mh: MhConfig,
    /// Side of the initial uniform grid (8 gives the 8x8 start).
    pub initial_grid: usize,
    /// Batch `b` (0-based) holds `batch_base * 2^(b+1)` pixels.
    pub batch_base: usize,
    pub stop: StopConfig,
    pub max_measurements: Option<usize>,
    /// Seed of every algorithmic random draw.
    pub seed: u64,
    /// Seed of the simulated device.
    pub device_seed: u64,
    pub prior: PriorConfig,
    /// Replay this CSV map instead of simulating a device.
    pub recorded_map: Option<PathBuf>,
    pub truth_noise: Option<TruthNoise>,
    pub augmentation: AugmentationConfig,
    /// Exterior flip probability of the segmentation acquisition.
    pub segmentation_noise: f64,
    pub time_model: TimeModel,
    pub include_compute_time: bool,
    pub out_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let window = VoltageWindow::default();
        Self {
            mode: Mode::Batch,
            time_model: TimeModel::calibrated(&window),
            window,
            ensemble_size: 100,
            lambda: 1.0,
            mh: MhConfig::default(),
            initial_grid: 8,
            batch_base: 32,
            stop: StopConfig::default(),
            max_measurements: None,
            seed: 0,
            device_seed: 0,
            prior: PriorConfig::default(),
            recorded_map: None,
            truth_noise: None,
            augmentation: AugmentationConfig::default(),
            segmentation_noise: 0.05,
            include_compute_time: false,
            out_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: Self =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        self.prior.validate()?;
        self.time_model.validate()?;
        if self.ensemble_size == 0 {
            return Err(Error::Config("ensemble_size must be >= 1".into()));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::Config("lambda must be finite and >= 0".into()));
        }
        if self.initial_grid == 0 || self.batch_base == 0 {
            return Err(Error::Config("initial_grid and batch_base must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.segmentation_noise) {
            return Err(Error::Config("segmentation_noise must lie in [0, 1]".into()));
        }
        if self.stop.mode == StopMode::Budget {
            match self.stop.total_budget {
                Some(t) if t.is_finite() && t > 0.0 => {}
                _ => return Err(Error::Config("stop mode 'budget' needs a positive total_budget".into())),
            }
        }
        if let Some(n) = &self.truth_noise {
            if !(n.snr.is_finite() && n.snr > 0.0) {
                return Err(Error::Config("truth_noise.snr must be finite and > 0".into()));
            }
        }
        if self.augmentation.kinds.is_empty() || self.augmentation.profiles == 0 {
            return Err(Error::Config("augmentation needs at least one profile and one noise kind".into()));
        }
        Ok(())
    }

    /// Initial grid side clipped to the window.
    pub fn initial_shape(&self) -> (usize, usize) {
        (self.initial_grid.min(self.window.rows()), self.initial_grid.min(self.window.cols()))
    }
}

/// Ten simulated devices sharing one algorithm configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub base: ExperimentConfig,
    pub device_seeds: Vec<u64>,
}

impl SuiteConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.base.validate()?;
        Ok(s)
    }

    /// The shipped ten-device suite.
    pub fn builtin() -> Self {
        Self::from_json_str(include_str!("../../configs/suite10.json")).expect("shipped suite config is valid")
    }

    pub fn device(&self, i: usize) -> ExperimentConfig {
        ExperimentConfig {
            device_seed: self.device_seeds[i],
            seed: self.base.seed.wrapping_add(i as u64),
            ..self.base.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_roundtrip() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: ExperimentConfig = serde_json::from_str(r#"{"mode": "gridscan", "seed": 7}"#).unwrap();
        assert_eq!(c.mode, Mode::Gridscan);
        assert_eq!(c.ensemble_size, 100);
    }

    #[test]
    fn budget_needs_total() {
        let mut c = ExperimentConfig::default();
        c.stop.mode = StopMode::Budget;
        assert!(matches!(c.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn builtin_suite_has_ten_devices() {
        assert_eq!(SuiteConfig::builtin().device_seeds.len(), 10);
    }
}
