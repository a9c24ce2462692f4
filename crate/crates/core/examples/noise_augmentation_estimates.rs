//! Noise-augmented ensemble and the real-time r(n) estimate it gives, next
//! to the true value.

use dotscan::device::NoiseKind;
use dotscan::grid::uniform_subgrid;
use dotscan::harness::{augmentation_profiles, ExperimentConfig, GroundTruth, TimeModel, TruthNoise};
use dotscan::metrics::{error_r, estimate_r, gradient_norm_map};
use dotscan::posterior::{augment_noisy, mh_resample, prior_ensemble, ConditioningInput, ObservationSet, PhysicsBackend};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dotscan::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.window = cfg.window.with_resolution(32, 32);
    cfg.time_model = TimeModel::calibrated(&cfg.window);
    cfg.truth_noise = Some(TruthNoise { kind: NoiseKind::GaussianWhite { sigma: 1.0 }, snr: 1600.0 });
    let truth = GroundTruth::from_config(&cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let init = uniform_subgrid(32, 32, 8, 8);
    let scaled = truth.map.rescaled(&init)?;
    let backend = PhysicsBackend::new(cfg.prior.clone(), cfg.window.clone())?;
    let cond = ConditioningInput::from_map(&scaled, &init);
    let mut obs = ObservationSet::new(32, 32);
    for &p in &init {
        obs.push(p, scaled.at(p))?;
    }
    let ens = prior_ensemble(&backend, &cond, cfg.ensemble_size, cfg.lambda, &obs, &mut rng)?;
    let (ens, _) = mh_resample(&ens, &obs, &cond, &backend, &cfg.mh, &mut rng)?;

    let profiles = augmentation_profiles(&cfg, &mut rng)?;
    let aug = augment_noisy(&ens, &profiles, &cfg.augmentation.snr_levels)?;
    println!("{} reconstructions -> {} augmented members", ens.len(), aug.len());
    let est = estimate_r(&aug, obs.mask())?;
    let actual = error_r(&init, &gradient_norm_map(&truth.map.values))?;
    println!("r(64): true {actual:.4}, estimate {:.4} [{:.4}, {:.4}]", est.mean, est.lo90, est.hi90);
    Ok(())
}
