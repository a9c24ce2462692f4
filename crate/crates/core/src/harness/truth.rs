use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ExperimentConfig;
use crate::device::{
    load_recorded_map, sample_device_params, simulate_current_map, simulate_segmentation_map, synthesize_noise_profile,
    CurrentMap, DeviceParams, SegmentationMap,
};
use crate::error::{Error, Result};
use crate::grid::Pixel;
use crate::posterior::snr_multiplier;

/// The map the probe "measures", simulated or replayed from disk.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub map: CurrentMap,
    pub params: Option<DeviceParams>,
    pub segmentation: Option<SegmentationMap>,
    pub fingerprint: u64,
}

/// Hash of the map shape and every value's bit pattern.
pub fn fingerprint(map: &CurrentMap) -> u64 {
    let mut h = DefaultHasher::new();
    map.values.dim().hash(&mut h);
    for v in map.values.iter() {
        v.to_bits().hash(&mut h);
    }
    h.finish()
}

impl GroundTruth {
    pub fn from_map(map: CurrentMap) -> Result<Self> {
        if !map.is_finite() {
            return Err(Error::GroundTruth("map contains non-finite values".into()));
        }
        Ok(Self {
            fingerprint: fingerprint(&map),
            map,
            params: None,
            segmentation: None,
        })
    }

    pub fn simulated(config: &ExperimentConfig) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(config.device_seed);
        let mut params = sample_device_params(&mut rng, &config.prior)?;
        params.rng_seed = config.device_seed;
        let mut map = simulate_current_map(&params, &config.window)?;
        if let Some(noise) = &config.truth_noise {
            let (rows, cols) = map.values.dim();
            let profile = synthesize_noise_profile(&noise.kind, rows, cols, 1, &mut rng)?;
            let signal = crate::numeric::power(&map.values);
            let power = profile.power();
            if power > 0.0 {
                let a = snr_multiplier(signal, power, noise.snr);
                map.values.zip_mut_with(&profile.values, |y, e| *y += a * e);
            }
        }
        let segmentation = simulate_segmentation_map(&params, &config.window)?;
        let mut truth = Self::from_map(map)?;
        truth.params = Some(params);
        truth.segmentation = Some(segmentation);
        Ok(truth)
    }

    /// Recorded map, resolution and window taken from the file.
    pub fn replayed(path: &std::path::Path) -> Result<Self> {
        Self::from_map(load_recorded_map(path)?)
    }

    /// Ground truth named by `config`: the recorded map if set, else a simulation.
    pub fn from_config(config: &ExperimentConfig) -> Result<Self> {
        match &config.recorded_map {
            Some(path) => {
                let t = Self::replayed(path)?;
                if t.map.values.dim() != config.window.resolution {
                    return Err(Error::GroundTruthMismatch(format!(
                        "recorded map is {:?}, configured window is {:?}",
                        t.map.values.dim(),
                        config.window.resolution
                    )));
                }
                Ok(t)
            }
            None => Self::simulated(config),
        }
    }

    pub fn measure(&self, p: Pixel) -> f64 {
        self.map.at(p)
    }
}
