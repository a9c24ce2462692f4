//! Generative backends that turn a latent vector and the conditioning scan
//! into a full-resolution reconstruction.

use serde::{Deserialize, Serialize};
use statrs::function::erf::{erfc, erfc_inv};

use super::{ConditioningInput, LatentVector};
use crate::device::{CurrentMap, DeviceParams, LevelModel, PriorConfig};
use crate::error::{Error, Result};
use crate::grid::{Pixel, VoltageWindow};

/// Latent coordinates beyond this magnitude are clamped.
pub const LATENT_CLAMP: f64 = 8.0;

#[derive(Clone, Debug)]
pub struct Decoded {
    pub map: CurrentMap,
    /// The latent vector had to be clamped into the mappable range.
    pub clamped: bool,
}

pub trait GenerativeBackend: Send + Sync {
    fn latent_dim(&self) -> usize;

    fn window(&self) -> &VoltageWindow;

    fn decode(&self, z: &LatentVector, cond: &ConditioningInput) -> Result<Decoded>;

    /// Reconstruction values at `pixels` only. Sampling calls this in its inner
    /// loop, so backends should override it when a partial decode is cheaper.
    fn decode_at(&self, z: &LatentVector, cond: &ConditioningInput, pixels: &[Pixel]) -> Result<Vec<f64>> {
        let d = self.decode(z, cond)?;
        Ok(pixels.iter().map(|&p| d.map.at(p)).collect())
    }

    /// Physical parameters behind `z`, for backends that have them.
    fn device_params(&self, _z: &LatentVector) -> Option<DeviceParams> {
        None
    }
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_quantile(u: f64) -> f64 {
    -std::f64::consts::SQRT_2 * erfc_inv(2.0 * u)
}

/// Physics-parametric decoder: each latent coordinate is pushed through the
/// normal CDF onto a configured parameter range, the resulting device is
/// simulated, and an affine map fitted to the conditioning scan brings the
/// simulated level counts into measurement units.
///
/// Latent layout: the [`PriorConfig::params_from_unit`] coordinates followed
/// by one excited-state offset shared by every level.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhysicsBackend {
    pub prior: PriorConfig,
    pub window: VoltageWindow,
}

impl PhysicsBackend {
    pub fn new(prior: PriorConfig, window: VoltageWindow) -> Result<Self> {
        prior.validate()?;
        window.validate()?;
        Ok(Self { prior, window })
    }

    fn clamp(z: &LatentVector) -> (Vec<f64>, bool) {
        let mut clamped = false;
        let v = z
            .0
            .iter()
            .map(|&x| {
                if x.is_nan() {
                    clamped = true;
                    0.0
                } else if x.abs() > LATENT_CLAMP {
                    clamped = true;
                    x.signum() * LATENT_CLAMP
                } else {
                    x
                }
            })
            .collect();
        (v, clamped)
    }

    fn params_checked(&self, z: &LatentVector) -> Result<(DeviceParams, bool)> {
        if z.dim() != self.latent_dim() {
            return Err(Error::Domain(format!(
                "latent dimension {} does not match backend dimension {}",
                z.dim(),
                self.latent_dim()
            )));
        }
        let (zc, clamped) = Self::clamp(z);
        let u: Vec<f64> = zc.iter().map(|&x| normal_cdf(x)).collect();
        let nf = self.prior.n_free();
        let (lo, hi) = self.prior.transition_offset;
        let delta = lo + (hi - lo) * u[nf];
        let params = self
            .prior
            .params_from_unit(&u[..nf], Some(vec![delta; self.prior.n_levels]), 0);
        Ok((params, clamped))
    }

    /// Latent vector whose decoded device matches `params` (excited states
    /// are represented by their mean offset; none maps to the top of the range).
    pub fn encode(&self, params: &DeviceParams) -> LatentVector {
        let unit = |r: (f64, f64), v: f64| {
            if r.1 > r.0 {
                ((v - r.0) / (r.1 - r.0)).clamp(1e-12, 1.0 - 1e-12)
            } else {
                0.5
            }
        };
        let p = &self.prior;
        let mut u = vec![
            unit(p.c_source, params.c_source),
            unit(p.c_drain, params.c_drain),
            unit(p.c_gate, params.c_gate),
            unit(p.n_offset, params.n_offset),
            unit(p.cap_scale_slope, params.cap_scale_slope),
        ];
        for k in 1..p.n_levels {
            let inc = params.level_energy(k + 1) - params.level_energy(k);
            u.push(unit(p.level_increment, inc));
        }
        let delta = match &params.transition_levels {
            Some(t) if !t.is_empty() => t.iter().sum::<f64>() / t.len() as f64,
            _ => p.transition_offset.1,
        };
        u.push(unit(p.transition_offset, delta));
        LatentVector(u.into_iter().map(normal_quantile).collect())
    }

    fn fitted_values(&self, model: &LevelModel, cond: &ConditioningInput, pixels: &[Pixel]) -> Vec<f64> {
        let raw_at = |p: Pixel| {
            let (vg, vb) = self.window.voltages(p);
            model.pixel(vg, vb).current
        };
        let raw_cond: Vec<f64> = cond.locations.iter().map(|&p| raw_at(p)).collect();
        let (a, b) = fit_affine_l1(&raw_cond, &cond.values);
        pixels.iter().map(|&p| a + b * raw_at(p)).collect()
    }
}

impl GenerativeBackend for PhysicsBackend {
    fn latent_dim(&self) -> usize {
        self.prior.n_free() + 1
    }

    fn window(&self) -> &VoltageWindow {
        &self.window
    }

    fn decode(&self, z: &LatentVector, cond: &ConditioningInput) -> Result<Decoded> {
        let (params, clamped) = self.params_checked(z)?;
        let model = LevelModel::new(&params)?;
        let pixels: Vec<Pixel> = self.window.pixels().collect();
        let values = self.fitted_values(&model, cond, &pixels);
        let values = ndarray::Array2::from_shape_vec(self.window.resolution, values).expect("one value per pixel");
        Ok(Decoded {
            map: CurrentMap::new(self.window.clone(), values),
            clamped,
        })
    }

    fn decode_at(&self, z: &LatentVector, cond: &ConditioningInput, pixels: &[Pixel]) -> Result<Vec<f64>> {
        let (params, _) = self.params_checked(z)?;
        let model = LevelModel::new(&params)?;
        Ok(self.fitted_values(&model, cond, pixels))
    }

    fn device_params(&self, z: &LatentVector) -> Option<DeviceParams> {
        self.params_checked(z).ok().map(|(p, _)| p)
    }
}

fn l1_around_median(residual: &mut [f64]) -> (f64, f64) {
    let mid = residual.len() / 2;
    let (_, m, _) = residual.select_nth_unstable_by(mid, f64::total_cmp);
    let m = *m;
    (m, residual.iter().map(|r| (r - m).abs()).sum())
}

/// Offset and non-negative scale minimising `sum |target - offset - scale * raw|`.
///
/// For a fixed scale the optimal offset is a median of the residuals, and the
/// remaining one-dimensional objective is convex and piecewise linear in the
/// scale, so a golden-section search over a bracket that contains every
/// breakpoint finds the minimum.
pub fn fit_affine_l1(raw: &[f64], target: &[f64]) -> (f64, f64) {
    assert_eq!(raw.len(), target.len());
    if raw.is_empty() {
        return (0.0, 1.0);
    }
    let mut scratch = vec![0.0; raw.len()];
    let mut eval = |b: f64| {
        for ((s, r), t) in scratch.iter_mut().zip(raw).zip(target) {
            *s = t - b * r;
        }
        l1_around_median(&mut scratch)
    };

    let mut sorted_raw = raw.to_vec();
    sorted_raw.sort_by(f64::total_cmp);
    let min_gap = sorted_raw
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&g| g > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !min_gap.is_finite() {
        // All raw values equal: the scale is not identified by the conditioning scan.
        return (eval(1.0).0, 1.0);
    }
    let (tmin, tmax) = target
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| (lo.min(t), hi.max(t)));
    let b_max = (tmax - tmin) / min_gap;
    if b_max <= 0.0 {
        return (eval(0.0).0, 0.0);
    }

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (0.0, b_max);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = eval(x1).1;
    let mut f2 = eval(x2).1;
    for _ in 0..48 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = eval(x1).1;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = eval(x2).1;
        }
    }
    let mut best = (0.5 * (lo + hi), f64::INFINITY);
    for b in [0.0, lo, 0.5 * (lo + hi), hi, b_max] {
        let f = eval(b).1;
        if f < best.1 {
            best = (b, f);
        }
    }
    (eval(best.0).0, best.0)
}
