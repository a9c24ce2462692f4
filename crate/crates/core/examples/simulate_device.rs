//! Samples a device, simulates its current map and segmentation, and writes
//! them next to the system temp directory.
//!
//! cargo run --release --example simulate_device -- [seed]

use dotscan::device::{
    sample_device_params, save_map_csv, save_map_png, simulate_current_map, simulate_segmentation_map, PriorConfig,
};
use dotscan::grid::VoltageWindow;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dotscan::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = sample_device_params(&mut rng, &PriorConfig::default())?;
    let window = VoltageWindow::default();
    let map = simulate_current_map(&params, &window)?;
    let seg = simulate_segmentation_map(&params, &window)?;

    let blocked = seg.labels.iter().filter(|l| **l == 1).count();
    println!("C_S = {:.3}, C_D = {:.3}, C_G = {:.3}, N0 = {:.3}", params.c_source, params.c_drain, params.c_gate, params.n_offset);
    println!("{} levels, {:.1}% of the window inside diamonds", params.n_levels(), 100.0 * blocked as f64 / window.n_pixels() as f64);

    let dir = std::env::temp_dir().join("dotscan-simulate");
    std::fs::create_dir_all(&dir)?;
    save_map_csv(&map, dir.join("current.csv"))?;
    save_map_png(&map.values, dir.join("current.png"))?;
    save_map_png(&seg.labels.mapv(f64::from), dir.join("segmentation.png"))?;
    println!("wrote {}", dir.display());
    Ok(())
}
