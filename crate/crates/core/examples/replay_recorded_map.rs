//! Runs the active loop against a map read back from CSV, as for a map
//! recorded on an instrument.

use dotscan::device::save_map_csv;
use dotscan::harness::{run_active, ExperimentConfig, GroundTruth, TimeModel};

fn main() -> dotscan::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.window = cfg.window.with_resolution(32, 32);
    let path = std::env::temp_dir().join("dotscan-recorded.csv");
    save_map_csv(&GroundTruth::simulated(&cfg)?.map, &path)?;

    let truth = GroundTruth::replayed(&path)?;
    cfg.window = truth.map.window.clone();
    cfg.time_model = TimeModel::calibrated(&cfg.window);
    cfg.recorded_map = Some(path.clone());
    let rec = run_active(&cfg, &truth)?;
    println!("replayed {} ({} pixels)", path.display(), rec.summary.n_pixels);
    match (rec.summary.stop_n, rec.summary.stop_time) {
        (Some(n), Some(t)) => println!("stopped at n = {n} after {t:.1} s, r = {:.4}", rec.r_curve[n]),
        _ => println!("measured all {} pixels in {:.1} s", rec.summary.measured, rec.summary.total_time),
    }
    Ok(())
}
