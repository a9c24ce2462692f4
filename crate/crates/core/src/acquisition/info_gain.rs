use ndarray::Array2;

use super::AcquisitionMap;
use crate::error::{Error, Result};
use crate::posterior::{ObservationSet, ReconstructionEnsemble};

/// `sum_m p(m) ln(p(m) / q(m))`, with `0 ln(0 / .) = 0`.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Domain(format!("length mismatch: {} vs {}", p.len(), q.len())));
    }
    let mut kl = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::Support(pi));
        }
        kl += pi * (pi / qi).ln();
    }
    Ok(kl)
}

/// Expected information gain of one pixel given the members' predictions
/// there.
///
/// Each member in turn supplies the hypothetical outcome `y = recon_m(x)`;
/// the weights that outcome would produce are compared to the current ones by
/// KL divergence, and the divergences are averaged under the current weights.
/// Members that predict the same value are merged first, which leaves the
/// result unchanged and makes the cost quadratic in the number of distinct
/// predictions rather than in the ensemble size.
pub fn pixel_information_gain(values: &[f64], weights: &[f64], lambda: f64, scratch: &mut Vec<(f64, f64)>) -> f64 {
    scratch.clear();
    scratch.extend(values.iter().zip(weights).filter(|(_, &w)| w > 0.0).map(|(&v, &w)| (v, w)));
    scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut k = 0;
    for i in 0..scratch.len() {
        if k > 0 && scratch[i].0 == scratch[k - 1].0 {
            scratch[k - 1].1 += scratch[i].1;
        } else {
            scratch[k] = scratch[i];
            k += 1;
        }
    }
    scratch.truncate(k);
    if k < 2 {
        return 0.0;
    }

    let mut ig = 0.0;
    for &(uj, wj) in scratch.iter() {
        let mut z = 0.0;
        let mut s = 0.0;
        for &(uk, wk) in scratch.iter() {
            let d = lambda * (uj - uk).abs();
            let t = wk * (-d).exp();
            z += t;
            s -= t * d;
        }
        ig += wj * (s / z - z.ln());
    }
    ig.max(0.0)
}

/// Acquisition map of expected information gain, masked at measured pixels.
pub fn information_gain_map(ensemble: &ReconstructionEnsemble, obs: &ObservationSet) -> Result<AcquisitionMap> {
    let (rows, cols) = ensemble.shape();
    if obs.shape() != (rows, cols) {
        return Err(Error::Domain("observation grid does not match the ensemble".into()));
    }
    let m = ensemble.len();
    let n = rows * cols;
    // Pixel-major copy of the member values.
    let mut by_pixel = vec![0.0; n * m];
    for (k, member) in ensemble.members().iter().enumerate() {
        for (i, v) in member.map.values.iter().enumerate() {
            by_pixel[i * m + k] = *v;
        }
    }
    let weights = ensemble.weights();
    let lambda = ensemble.lambda();
    let mask = obs.mask();
    let mut scratch = Vec::with_capacity(m);
    let values: Vec<f64> = (0..n)
        .map(|i| {
            if mask[i] {
                f64::NEG_INFINITY
            } else {
                pixel_information_gain(&by_pixel[i * m..(i + 1) * m], weights, lambda, &mut scratch)
            }
        })
        .collect();
    Ok(AcquisitionMap::new(
        Array2::from_shape_vec((rows, cols), values).expect("one value per pixel"),
    ))
}
