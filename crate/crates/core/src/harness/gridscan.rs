use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::grid::{uniform_subgrid, Pixel};

/// Stages of the alternating grid scan.
///
/// Starts from an `initial x initial` grid (clipped to the map) and doubles
/// the row count and the column count in turn, each stage holding only the
/// pixels the previous stages did not already measure, in row-major order.
pub fn gridscan_order(rows: usize, cols: usize, initial: usize) -> Result<Vec<Vec<Pixel>>> {
    if !rows.is_power_of_two() || !cols.is_power_of_two() {
        return Err(Error::Config(format!(
            "grid scan needs power-of-two resolution, got {rows}x{cols}"
        )));
    }
    if !initial.is_power_of_two() {
        return Err(Error::Config(format!("initial grid {initial} is not a power of two")));
    }
    let (mut rk, mut ck) = (initial.min(rows), initial.min(cols));
    let mut seen = HashSet::new();
    let mut stages = Vec::new();
    let mut vertical = true;
    loop {
        let stage: Vec<Pixel> = uniform_subgrid(rows, cols, rk, ck)
            .into_iter()
            .filter(|p| seen.insert(*p))
            .collect();
        stages.push(stage);
        if rk == rows && ck == cols {
            break;
        }
        if (vertical && rk < rows) || ck == cols {
            rk *= 2;
        } else {
            ck *= 2;
        }
        vertical = !vertical;
    }
    Ok(stages)
}
