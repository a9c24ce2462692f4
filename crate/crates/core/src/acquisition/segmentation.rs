use ndarray::Array2;

use super::AcquisitionMap;
use crate::device::simulate_segmentation_map;
use crate::error::{Error, Result};
use crate::posterior::{GenerativeBackend, ObservationSet, ReconstructionEnsemble};

/// Weighted disagreement between the members' diamond segmentations.
///
/// Outside-diamond labels are flipped to 1 with probability `exterior_noise`.
/// The map holds the expected variance of the resulting binary label under
/// the ensemble weights, `mu (1 - mu)` with
/// `mu = sum_m w_m (l_m + (1 - l_m) * exterior_noise)`.
pub fn segmentation_disagreement_map<B: GenerativeBackend + ?Sized>(
    ensemble: &ReconstructionEnsemble,
    backend: &B,
    obs: &ObservationSet,
    exterior_noise: f64,
) -> Result<AcquisitionMap> {
    if !(0.0..=1.0).contains(&exterior_noise) {
        return Err(Error::Config("exterior_noise must lie in [0, 1]".into()));
    }
    let window = backend.window().clone();
    let mut mean = Array2::<f64>::zeros(window.resolution);
    for (member, &w) in ensemble.members().iter().zip(ensemble.weights()) {
        let params = backend.device_params(&member.latent).ok_or_else(|| {
            Error::Unsupported("segmentation disagreement needs a backend with device parameters".into())
        })?;
        let seg = simulate_segmentation_map(&params, &window)?;
        mean.zip_mut_with(&seg.labels, |mu, &l| {
            let l = l as f64;
            *mu += w * (l + (1.0 - l) * exterior_noise);
        });
    }
    let mask = obs.mask();
    let cols = window.cols();
    let values = Array2::from_shape_fn(window.resolution, |(r, c)| {
        if mask[r * cols + c] {
            f64::NEG_INFINITY
        } else {
            let mu = mean[[r, c]].clamp(0.0, 1.0);
            mu * (1.0 - mu)
        }
    });
    Ok(AcquisitionMap::new(values))
}
