//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use dotscan::device::CurrentMap;
use dotscan::grid::{Pixel, VoltageWindow};
use dotscan::harness::{ExperimentConfig, TimeModel};
use dotscan::posterior::{
    ConditioningInput, Decoded, GenerativeBackend, LatentVector, ObservationSet, Reconstruction, ReconstructionEnsemble,
};
use dotscan::Result;
use ndarray::Array2;
use rand::Rng;

/// Expected information gain by direct enumeration of every hypothetical
/// outcome and every posterior it induces.
pub fn brute_force_ig(maps: &[Array2<f64>], weights: &[f64], lambda: f64, mask: &[bool]) -> Vec<f64> {
    let (rows, cols) = maps[0].dim();
    let mut out = vec![f64::NEG_INFINITY; rows * cols];
    for i in 0..rows * cols {
        if mask[i] {
            continue;
        }
        let (r, c) = (i / cols, i % cols);
        let mut ig = 0.0;
        for j in 0..maps.len() {
            let y = maps[j][[r, c]];
            let unnorm: Vec<f64> = (0..maps.len())
                .map(|k| weights[k] * (-lambda * (y - maps[k][[r, c]]).abs()).exp())
                .collect();
            let z: f64 = unnorm.iter().sum();
            let mut kl = 0.0;
            for k in 0..maps.len() {
                let q = unnorm[k] / z;
                if q > 0.0 {
                    kl += q * (q / weights[k]).ln();
                }
            }
            ig += weights[j] * kl;
        }
        out[i] = ig;
    }
    out
}

/// Smallest value whose cumulative weight reaches `q` of the total, found by
/// checking every candidate.
pub fn brute_weighted_percentile(values: &[f64], weights: &[f64], q: f64) -> f64 {
    let total: f64 = weights.iter().sum();
    let mut best = f64::INFINITY;
    for &v in values {
        let below: f64 = values.iter().zip(weights).filter(|(x, _)| **x <= v).map(|(_, w)| w).sum();
        if below >= q * total && v < best {
            best = v;
        }
    }
    best
}

/// Central differences inside, one-sided at the edges, written per pixel.
pub fn stencil_gradient_norm(y: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = y.dim();
    let d = |a: usize, len: usize, get: &dyn Fn(usize) -> f64| -> f64 {
        if len < 2 {
            0.0
        } else if a == 0 {
            get(1) - get(0)
        } else if a == len - 1 {
            get(len - 1) - get(len - 2)
        } else {
            (get(a + 1) - get(a - 1)) / 2.0
        }
    };
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        let gy = d(r, rows, &|k| y[[k, c]]);
        let gx = d(c, cols, &|k| y[[r, k]]);
        (gx * gx + gy * gy).sqrt()
    })
}

/// Sobel magnitude with replicated borders, written as an explicit 3x3 sum.
pub fn brute_sobel(labels: &Array2<f64>) -> Array2<f64> {
    let (rows, cols) = labels.dim();
    let kx = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
    let ky = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
    let at = |r: i64, c: i64| labels[[r.clamp(0, rows as i64 - 1) as usize, c.clamp(0, cols as i64 - 1) as usize]];
    Array2::from_shape_fn((rows, cols), |(r, c)| {
        let (mut gx, mut gy) = (0.0, 0.0);
        for (i, dr) in (-1i64..=1).enumerate() {
            for (j, dc) in (-1i64..=1).enumerate() {
                let v = at(r as i64 + dr, c as i64 + dc);
                gx += kx[i][j] * v;
                gy += ky[i][j] * v;
            }
        }
        (gx * gx + gy * gy).sqrt()
    })
}

pub fn unit_window(rows: usize, cols: usize) -> VoltageWindow {
    VoltageWindow::new((0.0, 1.0), (0.0, 1.0), rows, cols).unwrap()
}

/// Random member maps and weights. Values are drawn from a coarse lattice
/// half the time so that ties between members occur.
pub fn random_ensemble<R: Rng>(rng: &mut R, m: usize, rows: usize, cols: usize) -> (ReconstructionEnsemble, ObservationSet) {
    let window = unit_window(rows, cols);
    let coarse = rng.random_bool(0.5);
    let members: Vec<Reconstruction> = (0..m)
        .map(|k| {
            let values = Array2::from_shape_fn((rows, cols), |_| {
                if coarse {
                    rng.random_range(0..4) as f64 * 0.5
                } else {
                    rng.random_range(-2.0..2.0)
                }
            });
            Reconstruction {
                latent: LatentVector(vec![k as f64]),
                map: CurrentMap::new(window.clone(), values),
                clamped: false,
            }
        })
        .collect();
    let lambda = rng.random_range(0.1..3.0);
    let mut obs = ObservationSet::new(rows, cols);
    let mut ens = ReconstructionEnsemble::new(members, lambda, &obs).unwrap();
    for i in 0..rows * cols {
        if rng.random_bool(0.4) {
            let (x, y) = (Pixel::from_index(i, cols), rng.random_range(-2.0..2.0));
            obs.push(x, y).unwrap();
            ens = ens.update_weights_incremental(x, y).unwrap();
        }
    }
    (ens, obs)
}

/// Decoder that writes latent coordinate `i` into pixel `i` (row-major) and
/// leaves the rest at zero.
pub struct IdentityBackend {
    pub window: VoltageWindow,
    pub dim: usize,
}

impl IdentityBackend {
    pub fn new(dim: usize) -> Self {
        Self {
            window: unit_window(1, dim),
            dim,
        }
    }
}

impl GenerativeBackend for IdentityBackend {
    fn latent_dim(&self) -> usize {
        self.dim
    }

    fn window(&self) -> &VoltageWindow {
        &self.window
    }

    fn decode(&self, z: &LatentVector, _cond: &ConditioningInput) -> Result<Decoded> {
        let values = Array2::from_shape_vec((1, self.dim), z.0.clone()).unwrap();
        Ok(Decoded {
            map: CurrentMap::new(self.window.clone(), values),
            clamped: false,
        })
    }

    fn decode_at(&self, z: &LatentVector, _cond: &ConditioningInput, pixels: &[Pixel]) -> Result<Vec<f64>> {
        Ok(pixels.iter().map(|p| z.0[p.col]).collect())
    }
}

pub fn empty_cond(backend: &IdentityBackend) -> ConditioningInput {
    let map = CurrentMap::new(backend.window.clone(), Array2::zeros((1, backend.dim)));
    ConditioningInput::from_map(&map, &[])
}

/// Reduced experiment on a `side x side` window with the default voltage ranges.
pub fn small_config(side: usize, seed: u64, device_seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.window = cfg.window.with_resolution(side, side);
    cfg.time_model = TimeModel::calibrated(&cfg.window);
    cfg.ensemble_size = 20;
    cfg.mh.iterations = 40;
    cfg.seed = seed;
    cfg.device_seed = device_seed;
    cfg
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Kahan sum, for power sums over whole maps.
pub fn kahan(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for v in values {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}
