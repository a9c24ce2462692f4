//! Synthetic measurement-noise profiles.
//!
//! Profiles are generated along the raster (row-major) order, which is the
//! order in which a sweep would record them, then reshaped to the map grid.

use std::str::FromStr;

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    GaussianWhite { sigma: f64 },
    /// 1/f power spectrum, normalised to standard deviation `sigma`.
    Pink1OverF { sigma: f64 },
    /// Random telegraph signal switching with probability `switch_prob` per sample.
    Telegraph { amplitude: f64, switch_prob: f64 },
}

impl NoiseKind {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::GaussianWhite { .. } => "gaussian_white",
            NoiseKind::Pink1OverF { .. } => "pink_1_over_f",
            NoiseKind::Telegraph { .. } => "telegraph",
        }
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    /// Parses a kind name with unit-strength default parameters.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian_white" | "white" => Ok(NoiseKind::GaussianWhite { sigma: 1.0 }),
            "pink_1_over_f" | "pink" => Ok(NoiseKind::Pink1OverF { sigma: 1.0 }),
            "telegraph" => Ok(NoiseKind::Telegraph {
                amplitude: 1.0,
                switch_prob: 0.02,
            }),
            other => Err(Error::Config(format!("unknown noise kind '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub values: Array2<f64>,
    /// 1-based profile index j.
    pub profile_index: usize,
    pub generator: NoiseKind,
}

impl NoiseProfile {
    pub fn power(&self) -> f64 {
        crate::numeric::power(&self.values)
    }
}

pub fn synthesize_noise_profile<R: Rng + ?Sized>(
    kind: &NoiseKind,
    rows: usize,
    cols: usize,
    profile_index: usize,
    rng: &mut R,
) -> Result<NoiseProfile> {
    if rows == 0 || cols == 0 {
        return Err(Error::Config("noise profile needs rows, cols > 0".into()));
    }
    let n = rows * cols;
    let raw: Vec<f64> = match *kind {
        NoiseKind::GaussianWhite { sigma } => {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(Error::Config(format!("sigma must be >= 0, got {sigma}")));
            }
            if sigma == 0.0 {
                vec![0.0; n]
            } else {
                let d = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
                (0..n).map(|_| d.sample(rng)).collect()
            }
        }
        NoiseKind::Pink1OverF { sigma } => {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(Error::Config(format!("sigma must be >= 0, got {sigma}")));
            }
            pink(n, sigma, rng)
        }
        NoiseKind::Telegraph { amplitude, switch_prob } => {
            if !(0.0..=1.0).contains(&switch_prob) || !amplitude.is_finite() {
                return Err(Error::Config("telegraph needs finite amplitude and switch_prob in [0, 1]".into()));
            }
            let mut state = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let mut v: Vec<f64> = (0..n)
                .map(|_| {
                    if rng.random::<f64>() < switch_prob {
                        state = -state;
                    }
                    state * amplitude
                })
                .collect();
            // Shifting both levels keeps exactly two distinct values.
            let mean = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= mean);
            v
        }
    };
    let values = Array2::from_shape_vec((rows, cols), raw).expect("length matches shape");
    Ok(NoiseProfile {
        values,
        profile_index,
        generator: kind.clone(),
    })
}

fn pink<R: Rng + ?Sized>(n: usize, sigma: f64, rng: &mut R) -> Vec<f64> {
    if sigma == 0.0 || n < 2 {
        return vec![0.0; n];
    }
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    buf[0] = Complex::new(0.0, 0.0);
    for (k, c) in buf.iter_mut().enumerate().skip(1) {
        let f = k.min(n - k) as f64;
        *c /= f.sqrt();
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let mut v: Vec<f64> = buf.iter().map(|c| c.re).collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    let sd = (v.iter().map(|x| x * x).sum::<f64>() / n as f64).sqrt();
    if sd > 0.0 {
        v.iter_mut().for_each(|x| *x *= sigma / sd);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn zero_sigma_is_silent() {
        let p = synthesize_noise_profile(&NoiseKind::GaussianWhite { sigma: 0.0 }, 8, 8, 1, &mut rng()).unwrap();
        assert!(p.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn white_variance_within_chi_square_bound() {
        let p = synthesize_noise_profile(&NoiseKind::GaussianWhite { sigma: 1.0 }, 128, 128, 1, &mut rng()).unwrap();
        let n = p.values.len() as f64;
        let mean = p.values.sum() / n;
        let var = p.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((0.95..=1.05).contains(&var), "variance {var}");
        assert!(mean.abs() < 3.0 / n.sqrt());
    }

    #[test]
    fn telegraph_has_two_levels() {
        let kind = NoiseKind::Telegraph {
            amplitude: 0.5,
            switch_prob: 0.1,
        };
        let p = synthesize_noise_profile(&kind, 32, 32, 2, &mut rng()).unwrap();
        let mut levels: Vec<f64> = p.values.iter().copied().collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        assert_eq!(levels.len(), 2);
        assert!(p.values.sum().abs() < 1e-9);
    }

    #[test]
    fn pink_is_zero_mean_with_requested_sigma() {
        let p = synthesize_noise_profile(&NoiseKind::Pink1OverF { sigma: 2.0 }, 32, 64, 3, &mut rng()).unwrap();
        let n = p.values.len() as f64;
        assert!(p.values.sum().abs() / n < 1e-12);
        let sd = (p.power() / n).sqrt();
        assert!((sd - 2.0).abs() < 1e-9);
    }

    #[test]
    fn unknown_kind() {
        assert!(matches!("purple".parse::<NoiseKind>(), Err(Error::Config(_))));
        assert_eq!("telegraph".parse::<NoiseKind>().unwrap().name(), "telegraph");
    }
}
