use std::f64::consts::PI;

use num_complex::Complex64;

use super::loops::{step_axis, GridLoop};
use crate::error::{Error, Result};
use crate::representations::{support_floor, WaveState};

/// Largest accepted distance of the raw circulation from `2π·n_l`.
pub const WINDING_RESIDUAL_MAX: f64 = 0.1 * 2.0 * PI;

#[derive(Debug, Clone, PartialEq)]
pub struct WindingResult {
    /// Total phase increment over `2π`; the loop's winding number.
    pub n_l: i64,
    /// `∮∇γ·dl` by trapezoid quadrature of `Im(η*∇η)/|η|²` along the loop.
    pub raw_circulation: f64,
    /// `|raw_circulation − 2π·n_l|`.
    pub residual: f64,
    /// Velocity circulation `∮v·dl = raw_circulation/μ`.
    pub velocity_circulation: f64,
}

/// Winding number of `η` around `l`.
///
/// `n_l` comes from summing branch-cut-corrected phase differences of
/// neighbouring samples, so `η`'s single-valuedness makes the sum an exact
/// multiple of `2π`. The phase-gradient circulation is integrated
/// independently and must land within [`WINDING_RESIDUAL_MAX`] of `2π·n_l`.
pub fn winding_number(s: &WaveState, l: &GridLoop) -> Result<WindingResult> {
    let grid = s.grid();
    let w = s.density();
    let floor = support_floor(&w);
    for (k, &p) in l.points().iter().enumerate() {
        if w.values()[p] <= floor {
            return Err(Error::LoopTouchesNode { index: k });
        }
    }
    let eta = s.eta();
    let grads = (0..grid.dim()).map(|a| eta.gradient_fd(a)).collect::<Result<Vec<_>>>()?;
    let phase_grad = |p: usize, axis: usize| -> f64 {
        let e: Complex64 = eta.values()[p];
        (e.conj() * grads[axis].values()[p]).im / e.norm_sqr()
    };

    let pts = l.points();
    let mut total = 0.0;
    let mut raw = 0.0;
    for k in 0..pts.len() {
        let (a, b) = (pts[k], pts[(k + 1) % pts.len()]);
        total += (eta.values()[b] * eta.values()[a].conj()).arg();
        let (axis, dir) = step_axis(grid, a, b).expect("validated loop");
        raw += dir * 0.5 * grid.spacing(axis) * (phase_grad(a, axis) + phase_grad(b, axis));
    }
    let n_l = (total / (2.0 * PI)).round() as i64;
    let residual = (raw - 2.0 * PI * n_l as f64).abs();
    if residual >= WINDING_RESIDUAL_MAX {
        return Err(Error::UnderResolvedWinding { residual });
    }
    Ok(WindingResult { n_l, raw_circulation: raw, residual, velocity_circulation: raw / s.mu() })
}
