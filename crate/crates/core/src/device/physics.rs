//! Constant-interaction energies and level-counting transport.
//!
//! The bias is applied to the source (`V_S = V_bias`, `V_D = 0`), so the
//! source lead sits at `-V_bias` and the drain lead at 0 in electron energy.
//! A level conducts when its electrochemical potential lies inside the bias
//! window between the two leads.

use ndarray::Array2;

use super::{CurrentMap, DeviceParams, SegmentationMap};
use crate::error::{Error, Result};
use crate::grid::VoltageWindow;

fn charging_energy(p: &DeviceParams, scale: f64, n: f64, vs: f64, vd: f64, vg: f64) -> f64 {
    let induced = scale * (p.c_source * vs + p.c_drain * vd + p.c_gate * vg);
    let q = -(n - p.n_offset) + induced;
    q * q / (2.0 * scale * p.c_total())
}

/// Total energy U(N) of the dot holding `n_electrons`.
///
/// With a non-zero `cap_scale_slope` the energy is accumulated one electron at
/// a time, the k-th electron being added with the capacitances scaled for k
/// electrons. With zero slope this is exactly the quadratic charging energy
/// plus the occupied single-particle energies.
pub fn total_energy(p: &DeviceParams, n_electrons: i64, v_source: f64, v_drain: f64, v_gate: f64) -> Result<f64> {
    if n_electrons < 0 {
        return Err(Error::Domain(format!("electron number must be >= 0, got {n_electrons}")));
    }
    let n = n_electrons as usize;
    let levels: f64 = (1..=n).map(|k| p.level_energy(k)).sum();
    if p.cap_scale_slope == 0.0 {
        return Ok(charging_energy(p, 1.0, n as f64, v_source, v_drain, v_gate) + levels);
    }
    let mut u = charging_energy(p, p.cap_scale(1)?, 0.0, v_source, v_drain, v_gate);
    for k in 1..=n {
        let f = p.cap_scale(k)?;
        u += charging_energy(p, f, k as f64, v_source, v_drain, v_gate)
            - charging_energy(p, f, k as f64 - 1.0, v_source, v_drain, v_gate);
    }
    Ok(u + levels)
}

/// Electrochemical potential mu(N) = U(N) - U(N-1) in closed form.
pub fn electrochemical_potential(
    p: &DeviceParams,
    n_electrons: i64,
    v_source: f64,
    v_drain: f64,
    v_gate: f64,
) -> Result<f64> {
    if n_electrons < 1 {
        return Err(Error::Domain(format!("mu(N) needs N >= 1, got {n_electrons}")));
    }
    let n = n_electrons as usize;
    let ct = p.cap_scale(n)? * p.c_total();
    let induced = (v_source * p.c_source + v_drain * p.c_drain + v_gate * p.c_gate) / p.c_total();
    Ok((n as f64 - p.n_offset - 0.5) / ct - induced + p.level_energy(n))
}

/// Precomputed per-level constants so a pixel costs one dot product plus a
/// scan over the levels.
#[derive(Clone, Debug)]
pub struct LevelModel {
    /// mu(N) at zero voltages, N = 1..=K.
    offsets: Vec<f64>,
    /// Excited-state offsets, aligned with `offsets`.
    excited: Vec<Option<f64>>,
    source_lever: f64,
    gate_lever: f64,
}

/// Transport state of a single pixel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelState {
    /// Signed level count.
    pub current: f64,
    /// No ground-state level inside the bias window.
    pub blockade: bool,
    /// Ground-state levels below the bias window.
    pub occupancy: usize,
    pub n_levels: usize,
}

impl PixelState {
    /// Blockade bounded by a level on each side, i.e. the inside of a diamond.
    pub fn in_diamond(&self) -> bool {
        self.blockade && self.occupancy > 0 && self.occupancy < self.n_levels
    }
}

impl LevelModel {
    pub fn new(p: &DeviceParams) -> Result<Self> {
        p.validate()?;
        let k = p.n_levels();
        let mut offsets = Vec::with_capacity(k);
        for n in 1..=k {
            offsets.push(electrochemical_potential(p, n as i64, 0.0, 0.0, 0.0)?);
        }
        let excited = (1..=k).map(|n| p.transition_offset(n)).collect();
        Ok(Self {
            offsets,
            excited,
            source_lever: p.c_source / p.c_total(),
            gate_lever: p.c_gate / p.c_total(),
        })
    }

    /// Evaluates the pixel at gate voltage `vg` and bias `vb`.
    #[inline]
    pub fn pixel(&self, vg: f64, vb: f64) -> PixelState {
        let shift = vb * self.source_lever + vg * self.gate_lever;
        let (lo, hi) = if vb >= 0.0 { (-vb, 0.0) } else { (0.0, -vb) };
        let mut count = 0usize;
        let mut below = 0usize;
        let mut ground = 0usize;
        for (q, ex) in self.offsets.iter().zip(&self.excited) {
            let mu = q - shift;
            if mu < lo {
                below += 1;
            } else if mu <= hi {
                ground += 1;
                count += 1;
                if let Some(d) = ex {
                    let e = mu + d;
                    if e >= lo && e <= hi {
                        count += 1;
                    }
                }
            }
        }
        let sign = if vb > 0.0 {
            1.0
        } else if vb < 0.0 {
            -1.0
        } else {
            0.0
        };
        PixelState {
            current: sign * count as f64,
            blockade: ground == 0,
            occupancy: below,
            n_levels: self.offsets.len(),
        }
    }
}

/// Level-counting current map: each conducting level contributes one unit of
/// current with the sign of the bias.
pub fn simulate_current_map(p: &DeviceParams, window: &VoltageWindow) -> Result<CurrentMap> {
    window.validate()?;
    let model = LevelModel::new(p)?;
    let values = Array2::from_shape_fn(window.resolution, |(r, c)| {
        model.pixel(window.axis1_at(c), window.axis2_at(r)).current
    });
    Ok(CurrentMap::new(window.clone(), values))
}

/// Label 1 inside Coulomb diamonds: blockade with a level both below and above
/// the bias window.
pub fn simulate_segmentation_map(p: &DeviceParams, window: &VoltageWindow) -> Result<SegmentationMap> {
    window.validate()?;
    let model = LevelModel::new(p)?;
    let labels = Array2::from_shape_fn(window.resolution, |(r, c)| {
        model.pixel(window.axis1_at(c), window.axis2_at(r)).in_diamond() as u8
    });
    Ok(SegmentationMap {
        window: window.clone(),
        labels,
    })
}
