//! Discrete posterior over candidate reconstructions.
//!
//! Reconstructions come from a [`GenerativeBackend`] decoding latent vectors
//! with a standard-normal prior. The ensemble carries weights `P_n(m)` that are
//! updated in log space as measurements arrive, and is periodically refreshed
//! by Metropolis-Hastings over the latent vectors.

mod augment;
mod backend;
mod ensemble;
mod export;
mod mh;
mod observations;

use serde::{Deserialize, Serialize};

pub use augment::{augment_noisy, snr_multiplier, AugmentedEnsemble, DEFAULT_SNR_LEVELS};
pub use backend::{fit_affine_l1, normal_cdf, normal_quantile, Decoded, GenerativeBackend, PhysicsBackend, LATENT_CLAMP};
pub use ensemble::{log_likelihood, posterior_weights, softmax, Reconstruction, ReconstructionEnsemble};
pub use export::{export_diagnostics, export_ensemble};
pub use mh::{mh_resample, prior_ensemble, MhConfig, MhDiagnostics};
pub use observations::{ConditioningInput, ObservationSet};

/// Point in the backend's latent space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatentVector(pub Vec<f64>);

impl LatentVector {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}
