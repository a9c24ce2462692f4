//! The slope-based stopping rule on hand-made member estimates, with and
//! without a finite measurement budget.

use dotscan::metrics::{stopping_decide, Remaining, StoppingState};

fn main() -> dotscan::Result<()> {
    let n_pixels = 16_384;
    let alpha = 1.0 / n_pixels as f64;
    let now = [0.40, 0.38, 0.45];
    // Member 1 expects to gain half the grid-scan slope over the next batch.
    let delta = 1024;
    let next = [0.40 - 0.5 * alpha * delta as f64, 0.30, 0.35];

    let unlimited = StoppingState { t: 2048.0, total: f64::INFINITY, remaining: Remaining::Infinite, delta, n_pixels };
    let d = stopping_decide(&unlimited, &now, &next)?;
    println!("no budget: beta / alpha = {:.3}, stop = {}", d.beta / alpha, d.stop);

    // Budget for two maps, one of which may still be measured after this one:
    // the threshold falls from alpha to 0 as the remaining budget outgrows one map.
    let total = 2.0 * n_pixels as f64;
    for t in [20_000.0, 15_872.0, 2_048.0] {
        let budget = StoppingState { t, total, remaining: Remaining::Finite(1), delta, n_pixels };
        let d = stopping_decide(&budget, &now, &next)?;
        println!("t = {t:>6}: threshold / alpha = {:.3}, stop = {}", d.threshold / alpha, d.stop);
    }
    Ok(())
}
