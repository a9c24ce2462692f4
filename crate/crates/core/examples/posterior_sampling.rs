//! Conditions an ensemble on an 8x8 scan plus a few extra pixels, then
//! refreshes it with Metropolis-Hastings.

use dotscan::device::{sample_device_params, simulate_current_map, PriorConfig};
use dotscan::grid::{uniform_subgrid, Pixel, VoltageWindow};
use dotscan::posterior::{mh_resample, prior_ensemble, ConditioningInput, MhConfig, ObservationSet, PhysicsBackend};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dotscan::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let window = VoltageWindow::default().with_resolution(32, 32);
    let truth = simulate_current_map(&sample_device_params(&mut rng, &PriorConfig::default())?, &window)?;
    let init = uniform_subgrid(32, 32, 8, 8);
    let truth = truth.rescaled(&init)?;

    let backend = PhysicsBackend::new(PriorConfig::default(), window)?;
    let cond = ConditioningInput::from_map(&truth, &init);
    let mut obs = ObservationSet::new(32, 32);
    for &p in &init {
        obs.push(p, truth.at(p))?;
    }
    let mut ens = prior_ensemble(&backend, &cond, 50, 1.0, &obs, &mut rng)?;
    println!("prior ensemble: {} members, weight entropy {:.3}", ens.len(), ens.entropy());

    for _ in 0..64 {
        let p = Pixel::new(rng.random_range(0..32), rng.random_range(0..32));
        if !obs.contains(p) {
            obs.push(p, truth.at(p))?;
            ens = ens.update_weights_incremental(p, truth.at(p))?;
        }
    }
    println!("after {} measurements: weight entropy {:.3}", obs.len(), ens.entropy());

    let config = MhConfig { iterations: 100, ..MhConfig::default() };
    let (ens, diag) = mh_resample(&ens, &obs, &cond, &backend, &config, &mut rng)?;
    println!(
        "MH: acceptance {:.1}%, mean log-likelihood {:.1} -> {:.1}, entropy {:.3}",
        100.0 * diag.mean_acceptance(),
        diag.log_likelihood_trace[0],
        diag.log_likelihood_trace[config.iterations - 1],
        ens.entropy()
    );
    Ok(())
}
