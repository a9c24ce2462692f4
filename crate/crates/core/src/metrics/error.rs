use serde::{Deserialize, Serialize};

use super::GradientMap;
use crate::error::{Error, Result};
use crate::grid::Pixel;

/// Fraction of gradient mass still unmeasured: `1 - V(measured) / V(all)`.
pub fn error_r(measured: &[Pixel], gradient: &GradientMap) -> Result<f64> {
    let total = gradient.total();
    if !(total > 0.0) {
        return Err(Error::Domain("gradient map has no mass; r(n) is undefined".into()));
    }
    let got: f64 = measured.iter().map(|p| gradient.values[[p.row, p.col]]).sum();
    Ok((1.0 - got / total).clamp(0.0, 1.0))
}

/// `r(n)` after each prefix of `order`, `curve[k]` being the value after `k`
/// measurements.
pub fn error_curve(order: &[Pixel], gradient: &GradientMap) -> Result<Vec<f64>> {
    let total = gradient.total();
    if !(total > 0.0) {
        return Err(Error::Domain("gradient map has no mass; r(n) is undefined".into()));
    }
    let mut out = Vec::with_capacity(order.len() + 1);
    let mut got = 0.0;
    out.push(1.0);
    for p in order {
        got += gradient.values[[p.row, p.col]];
        out.push((1.0 - got / total).clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Best achievable `r(n)`: the `n` largest gradient values measured first.
pub fn optimal_r(gradient: &GradientMap, n: usize) -> Result<f64> {
    let total = gradient.total();
    if !(total > 0.0) {
        return Err(Error::Domain("gradient map has no mass; r(n) is undefined".into()));
    }
    let mut v: Vec<f64> = gradient.values.iter().copied().collect();
    if n > v.len() {
        return Err(Error::Domain(format!("n = {n} exceeds the {} pixels of the map", v.len())));
    }
    v.sort_by(|a, b| b.total_cmp(a));
    let best: f64 = v[..n].iter().sum();
    Ok((1.0 - best / total).clamp(0.0, 1.0))
}

/// `optimal_r` for every `n` in `0..=N`.
pub fn optimal_curve(gradient: &GradientMap) -> Result<Vec<f64>> {
    let total = gradient.total();
    if !(total > 0.0) {
        return Err(Error::Domain("gradient map has no mass; r(n) is undefined".into()));
    }
    let mut v: Vec<f64> = gradient.values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let mut out = Vec::with_capacity(v.len() + 1);
    let mut got = 0.0;
    out.push(1.0);
    for x in v {
        got += x;
        out.push((1.0 - got / total).clamp(0.0, 1.0));
    }
    Ok(out)
}

/// Weighted mean and 90% credible interval of per-member `r` estimates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealTimeEstimate {
    pub mean: f64,
    pub lo90: f64,
    pub hi90: f64,
}

/// Smallest value whose cumulative weight reaches `q` (weights normalised).
pub fn weighted_percentile(values: &[f64], weights: &[f64], q: f64) -> Result<f64> {
    let total: f64 = weights.iter().sum();
    if values.is_empty() || !(total > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::DegenerateEnsemble("weights must be non-negative with positive sum".into()));
    }
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let target = q * total;
    let mut acc = 0.0;
    for &i in &idx {
        acc += weights[i];
        if acc >= target {
            return Ok(values[i]);
        }
    }
    Ok(values[*idx.last().expect("non-empty")])
}

pub fn summarize_estimates(values: &[f64], weights: &[f64]) -> Result<RealTimeEstimate> {
    if values.len() != weights.len() {
        return Err(Error::Domain("values and weights differ in length".into()));
    }
    let lo90 = weighted_percentile(values, weights, 0.05)?;
    let hi90 = weighted_percentile(values, weights, 0.95)?;
    let total: f64 = weights.iter().sum();
    let mean = values.iter().zip(weights).map(|(v, w)| v * w).sum::<f64>() / total;
    Ok(RealTimeEstimate { mean, lo90, hi90 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;

    fn grad(values: Vec<f64>, rows: usize, cols: usize) -> GradientMap {
        GradientMap {
            values: Array2::from_shape_vec((rows, cols), values).unwrap(),
        }
    }

    #[test]
    fn endpoints() {
        let g = grad((1..=16).map(|x| x as f64).collect(), 4, 4);
        assert_eq!(error_r(&[], &g).unwrap(), 1.0);
        let all: Vec<Pixel> = (0..16).map(|i| Pixel::from_index(i, 4)).collect();
        assert_eq!(error_r(&all, &g).unwrap(), 0.0);
        assert_eq!(optimal_r(&g, 16).unwrap(), 0.0);
    }

    #[test]
    fn hand_summed_ratio() {
        // v = 1..16, measure v=2, v=7, v=16 -> 1 - 25/136.
        let g = grad((1..=16).map(|x| x as f64).collect(), 4, 4);
        let m = [Pixel::new(0, 1), Pixel::new(1, 2), Pixel::new(3, 3)];
        assert!((error_r(&m, &g).unwrap() - (1.0 - 25.0 / 136.0)).abs() < 1e-15);
    }

    #[test]
    fn flat_gradient_is_undefined() {
        assert!(error_r(&[], &grad(vec![0.0; 4], 2, 2)).is_err());
    }

    #[test]
    fn equal_gradients_give_gridscan_line() {
        let g = grad(vec![0.5; 64], 8, 8);
        for n in [0, 1, 10, 33, 64] {
            assert!((optimal_r(&g, n).unwrap() - (1.0 - n as f64 / 64.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_interval() {
        let e = summarize_estimates(&[0.4, 0.4, 0.4], &[0.2, 0.5, 0.3]).unwrap();
        assert_eq!((e.lo90, e.hi90), (0.4, 0.4));
        assert!((e.mean - 0.4).abs() < 1e-15);
    }
}
