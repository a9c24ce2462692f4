use ndarray::Array2;

use super::gradient::gradient_components;
use super::{gradient_norm_map, summarize_estimates, RealTimeEstimate};
use crate::error::{Error, Result};
use crate::grid::Pixel;
use crate::posterior::{AugmentedEnsemble, ReconstructionEnsemble};

/// Per-member estimates `r_m(n)` and `r_m(n + batch)` together with the
/// member weights.
#[derive(Clone, Debug, PartialEq)]
pub struct MemberEstimates {
    pub now: Vec<f64>,
    pub next: Vec<f64>,
    pub weights: Vec<f64>,
}

impl MemberEstimates {
    pub fn summary(&self) -> Result<RealTimeEstimate> {
        summarize_estimates(&self.now, &self.weights)
    }

    pub fn summary_next(&self) -> Result<RealTimeEstimate> {
        summarize_estimates(&self.next, &self.weights)
    }
}

fn check_batch(batch: &[Pixel], measured: &[bool], cols: usize) -> Result<()> {
    for p in batch {
        if measured[p.index(cols)] {
            return Err(Error::DuplicateMeasurement { row: p.row, col: p.col });
        }
    }
    Ok(())
}

/// `(r_now, r_next)` for one gradient map; a member without gradient mass
/// predicts nothing left to find.
fn r_pair(total: f64, measured_mass: f64, batch_mass: f64) -> (f64, f64) {
    if !(total > 0.0) {
        return (0.0, 0.0);
    }
    let now = (1.0 - measured_mass / total).clamp(0.0, 1.0);
    let next = (1.0 - (measured_mass + batch_mass) / total).clamp(0.0, 1.0);
    (now, next)
}

fn masses(v: &Array2<f64>, measured: &[bool], batch: &[Pixel]) -> (f64, f64, f64) {
    let mut total = 0.0;
    let mut got = 0.0;
    for (&x, &m) in v.iter().zip(measured) {
        total += x;
        if m {
            got += x;
        }
    }
    let b: f64 = batch.iter().map(|p| v[[p.row, p.col]]).sum();
    (total, got, b)
}

/// Estimates from the plain (noise-free) reconstructions.
pub fn ensemble_r_estimates(
    ensemble: &ReconstructionEnsemble,
    measured: &[bool],
    batch: &[Pixel],
) -> Result<MemberEstimates> {
    let (_, cols) = ensemble.shape();
    check_batch(batch, measured, cols)?;
    let mut now = Vec::with_capacity(ensemble.len());
    let mut next = Vec::with_capacity(ensemble.len());
    for m in ensemble.members() {
        let v = gradient_norm_map(&m.map.values).values;
        let (t, g, b) = masses(&v, measured, batch);
        let (a, z) = r_pair(t, g, b);
        now.push(a);
        next.push(z);
    }
    Ok(MemberEstimates {
        now,
        next,
        weights: ensemble.weights().to_vec(),
    })
}

/// Estimates from every noise-augmented member, in augmented index order.
///
/// Gradients are linear, so each variant's components are the member's plus
/// `alpha` times the profile's; nothing is materialised per variant.
pub fn augmented_r_estimates(aug: &AugmentedEnsemble, measured: &[bool], batch: &[Pixel]) -> Result<MemberEstimates> {
    let base = aug.base();
    let (rows, cols) = base.shape();
    check_batch(batch, measured, cols)?;
    let profile_grads: Vec<(Array2<f64>, Array2<f64>)> =
        aug.profiles().iter().map(|p| gradient_components(&p.values)).collect();
    let mut in_batch = vec![false; rows * cols];
    for p in batch {
        in_batch[p.index(cols)] = true;
    }
    let mut now = Vec::with_capacity(aug.len());
    let mut next = Vec::with_capacity(aug.len());
    let n_snr = aug.snr_levels().len();
    for (m, member) in base.members().iter().enumerate() {
        let (gx, gy) = gradient_components(&member.map.values);
        let (gx, gy) = (gx.as_slice().expect("standard layout"), gy.as_slice().expect("standard layout"));
        for (j, (px, py)) in profile_grads.iter().enumerate() {
            let (px, py) = (px.as_slice().expect("standard layout"), py.as_slice().expect("standard layout"));
            for s in 0..n_snr {
                let i = (m * profile_grads.len() + j) * n_snr + s;
                let a = aug.alpha(i);
                let (mut t, mut g, mut b) = (0.0, 0.0, 0.0);
                for k in 0..gx.len() {
                    let v = (gx[k] + a * px[k]).hypot(gy[k] + a * py[k]);
                    t += v;
                    if measured[k] {
                        g += v;
                    } else if in_batch[k] {
                        b += v;
                    }
                }
                let (x, z) = r_pair(t, g, b);
                now.push(x);
                next.push(z);
            }
        }
    }
    Ok(MemberEstimates {
        now,
        next,
        weights: aug.weights(),
    })
}

/// Weighted mean and 90% interval of `r(n)` over the augmented ensemble.
pub fn estimate_r(aug: &AugmentedEnsemble, measured: &[bool]) -> Result<RealTimeEstimate> {
    augmented_r_estimates(aug, measured, &[])?.summary()
}
