//! Noise-augmented view of an ensemble.
//!
//! Every reconstruction spawns one variant per (noise profile, SNR) pair,
//! `recon_m + alpha * profile_j`, where `alpha` makes the signal-to-noise power
//! ratio equal the target. Variants are materialised on demand so that a
//! 3,000-member view of 128x128 maps does not have to live in memory.

use std::sync::Arc;

use ndarray::Array2;

use super::ReconstructionEnsemble;
use crate::device::NoiseProfile;
use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, power};

#[derive(Clone, Debug)]
pub struct AugmentedEnsemble {
    base: ReconstructionEnsemble,
    profiles: Arc<Vec<NoiseProfile>>,
    snr_levels: Vec<f64>,
    /// `alphas[(m * profiles + j) * snr_levels + s]`.
    alphas: Vec<f64>,
}

/// Default SNR targets (high, medium and low noise).
pub const DEFAULT_SNR_LEVELS: [f64; 3] = [400.0, 1600.0, 6400.0];

/// Noise multiplier giving `sum signal^2 / sum (alpha * noise)^2 == snr`.
pub fn snr_multiplier(signal_power: f64, noise_power: f64, snr: f64) -> f64 {
    (signal_power / (snr * noise_power)).sqrt()
}

pub fn augment_noisy(
    ensemble: &ReconstructionEnsemble,
    profiles: &[NoiseProfile],
    snr_levels: &[f64],
) -> Result<AugmentedEnsemble> {
    if profiles.is_empty() || snr_levels.is_empty() {
        return Err(Error::Config("augmentation needs at least one profile and one SNR level".into()));
    }
    if snr_levels.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::Config("SNR levels must be finite and > 0".into()));
    }
    let shape = ensemble.shape();
    let mut noise_power = Vec::with_capacity(profiles.len());
    for p in profiles {
        if p.values.dim() != shape {
            return Err(Error::Config(format!(
                "noise profile {} has shape {:?}, maps are {:?}",
                p.profile_index,
                p.values.dim(),
                shape
            )));
        }
        let power = p.power();
        if !(power > 0.0 && power.is_finite()) {
            return Err(Error::Config(format!("noise profile {} has zero power", p.profile_index)));
        }
        noise_power.push(power);
    }
    let mut alphas = Vec::with_capacity(ensemble.len() * profiles.len() * snr_levels.len());
    for member in ensemble.members() {
        let signal = power(&member.map.values);
        for &np in &noise_power {
            for &snr in snr_levels {
                alphas.push(snr_multiplier(signal, np, snr));
            }
        }
    }
    Ok(AugmentedEnsemble {
        base: ensemble.clone(),
        profiles: Arc::new(profiles.to_vec()),
        snr_levels: snr_levels.to_vec(),
        alphas,
    })
}

impl AugmentedEnsemble {
    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }

    pub fn variants_per_member(&self) -> usize {
        self.profiles.len() * self.snr_levels.len()
    }

    pub fn base(&self) -> &ReconstructionEnsemble {
        &self.base
    }

    pub fn profiles(&self) -> &[NoiseProfile] {
        &self.profiles
    }

    pub fn snr_levels(&self) -> &[f64] {
        &self.snr_levels
    }

    /// `(member, profile, snr)` indices of augmented member `i`.
    pub fn decompose(&self, i: usize) -> (usize, usize, usize) {
        let s = self.snr_levels.len();
        let j = self.profiles.len();
        (i / (j * s), (i / s) % j, i % s)
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.alphas[i]
    }

    /// `P_n(m) / variants` for the member that spawned `i`.
    pub fn weight(&self, i: usize) -> f64 {
        self.base.weights()[self.decompose(i).0] / self.variants_per_member() as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    pub fn member_values(&self, i: usize) -> Array2<f64> {
        let (m, j, _) = self.decompose(i);
        let a = self.alphas[i];
        let mut v = self.base.members()[m].map.values.clone();
        v.zip_mut_with(&self.profiles[j].values, |x, e| *x += a * e);
        v
    }

    /// Realised signal-to-noise power ratio of member `i`.
    pub fn achieved_snr(&self, i: usize) -> f64 {
        let (m, j, _) = self.decompose(i);
        let a = self.alphas[i];
        let signal = power(&self.base.members()[m].map.values);
        let noise = compensated_sum(self.profiles[j].values.iter().map(|e| (a * e).powi(2)));
        signal / noise
    }
}
