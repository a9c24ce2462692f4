//! Segmentation-driven batches and the edge error e(n) they achieve against
//! the grid scan.

use dotscan::harness::{edge_error_curve, run_active, run_gridscan, ExperimentConfig, GroundTruth, Mode, StopMode, TimeModel};

fn main() -> dotscan::Result<()> {
    let mut cfg = ExperimentConfig::default();
    cfg.window = cfg.window.with_resolution(32, 32);
    cfg.time_model = TimeModel::calibrated(&cfg.window);
    cfg.mode = Mode::SegmentationBatch;
    cfg.ensemble_size = 50;
    cfg.stop.mode = StopMode::Off;
    let truth = GroundTruth::from_config(&cfg)?;
    let seg = truth.segmentation.as_ref();

    let active = run_active(&cfg, &truth)?;
    cfg.mode = Mode::Gridscan;
    let grid = run_gridscan(&cfg, &truth)?;
    let e_active = edge_error_curve(&active, seg)?;
    let e_grid = edge_error_curve(&grid, seg)?;
    println!("{:>6} {:>10} {:>10}", "n", "e active", "e grid");
    for n in [64, 128, 256, 512, 1024] {
        println!("{n:>6} {:>10.4} {:>10.4}", e_active.at(n).unwrap_or(f64::NAN), e_grid.at(n).unwrap_or(f64::NAN));
    }
    Ok(())
}
