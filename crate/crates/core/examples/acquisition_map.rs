//! Builds the information-gain map for a conditioned ensemble and plans the
//! next batch as a short voltage path.

use dotscan::acquisition::{information_gain_map, select_batch};
use dotscan::device::{sample_device_params, save_map_png, simulate_current_map, PriorConfig};
use dotscan::grid::{uniform_subgrid, VoltageWindow};
use dotscan::harness::{simulated_time, TimeModel};
use dotscan::posterior::{prior_ensemble, ConditioningInput, ObservationSet, PhysicsBackend};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dotscan::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let window = VoltageWindow::default().with_resolution(32, 32);
    let init = uniform_subgrid(32, 32, 8, 8);
    let truth = simulate_current_map(&sample_device_params(&mut rng, &PriorConfig::default())?, &window)?
        .rescaled(&init)?;
    let backend = PhysicsBackend::new(PriorConfig::default(), window.clone())?;
    let cond = ConditioningInput::from_map(&truth, &init);
    let mut obs = ObservationSet::new(32, 32);
    for &p in &init {
        obs.push(p, truth.at(p))?;
    }
    let ens = prior_ensemble(&backend, &cond, 50, 1.0, &obs, &mut rng)?;

    let acq = information_gain_map(&ens, &obs)?;
    let (max, mean) = acq.stats();
    println!("information gain over {} candidate pixels: mean {mean:.4}, max {max:.4}", acq.unmasked_count());

    let tm = TimeModel::calibrated(&window);
    let plan = select_batch(&acq, 64, 0, window.origin(), &tm.metric(&window))?;
    let t = simulated_time(&plan.locations, window.origin(), &window, &tm);
    println!("next batch: {} pixels, first {:?}, {t:.2} s to measure", plan.size, plan.locations[0]);

    let path = std::env::temp_dir().join("dotscan-acquisition.png");
    save_map_png(&acq.display_values(), &path)?;
    println!("wrote {}", path.display());
    Ok(())
}
