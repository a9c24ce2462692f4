//! Active acquisition against the alternating grid scan on one simulated
//! device, with the comparison table.
//!
//! cargo run --release --example active_vs_gridscan -- [side]

use dotscan::harness::{compare_runs_with_truth, run_active, run_gridscan, ExperimentConfig, GroundTruth, Mode, TimeModel};

fn main() -> dotscan::Result<()> {
    let side = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(32);
    let mut cfg = ExperimentConfig::default();
    cfg.window = cfg.window.with_resolution(side, side);
    cfg.time_model = TimeModel::calibrated(&cfg.window);
    cfg.stop.halt_on_stop = false;
    let truth = GroundTruth::from_config(&cfg)?;

    let active = run_active(&cfg, &truth)?;
    let mut grid_cfg = cfg.clone();
    grid_cfg.mode = Mode::Gridscan;
    let grid = run_gridscan(&grid_cfg, &truth)?;

    println!("{:>6} {:>8} {:>8} {:>8}", "n", "active", "grid", "optimal");
    let report = compare_runs_with_truth(&[grid.clone(), active.clone()], &truth)?;
    for e in &active.events {
        println!("{:>6} {:>8.4} {:>8.4} {:>8.4}", e.n, active.r_curve[e.n], grid.r_curve[e.n], report.optimal[e.n]);
    }
    print!("{}", report.to_csv());
    Ok(())
}
