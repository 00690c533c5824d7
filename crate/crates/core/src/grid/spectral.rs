//! Discrete Fourier machinery.
//!
//! The momentum image approximates the continuum transform
//! `φ(p) = (2π)^{-D/2} ∫ η(x) e^{-ip·x} dx` on the sampled box, so that
//! `∫|φ|² dp = ∫|η|² dx` with `dp = 2π/L` per axis.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{lane_starts, ComplexField};
use super::stencil::Sample;
use super::UniformGrid;
use crate::error::Result;

/// A complex field sampled on a momentum grid (`UniformGrid::momentum_grid`),
/// zero momentum at the centre index.
pub type MomentumField = ComplexField;

static PLANS: LazyLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = LazyLock::new(|| Mutex::new(HashMap::new()));

pub(crate) fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    let mut cache = PLANS.lock().expect("fft plan cache poisoned");
    cache
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

/// Signed integer frequency of FFT bin `k`.
pub(crate) fn frequency(k: usize, n: usize) -> f64 {
    if k < n.div_ceil(2) {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Wavenumbers `2π·freq/L` in FFT order.
pub(crate) fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * frequency(k, n) / length).collect()
}

/// `order`-th spectral derivative of one periodic lane. Odd derivatives drop
/// the unpaired Nyquist mode so real input stays real.
pub(crate) fn spectral_derivative_lane<T: Sample>(lane: &[T], h: f64, order: u32, out: &mut [T]) {
    let n = lane.len();
    let k = wavenumbers(n, n as f64 * h);
    let mut buf: Vec<Complex64> = lane.iter().map(|v| v.to_complex()).collect();
    plan(n, true).process(&mut buf);
    let i = Complex64::i();
    for (b, &kk) in buf.iter_mut().zip(&k) {
        *b *= (i * kk).powu(order);
    }
    if order % 2 == 1 && n % 2 == 0 {
        buf[n / 2] = Complex64::new(0.0, 0.0);
    }
    plan(n, false).process(&mut buf);
    let inv = 1.0 / n as f64;
    for (o, b) in out.iter_mut().zip(buf) {
        *o = T::from_complex(b * inv);
    }
}

/// `symbol(k)` tabulated over the grid's FFT bins (row-major, FFT order).
pub(crate) fn fourier_table(grid: &UniformGrid, symbol: impl Fn(&[f64]) -> Complex64) -> Vec<Complex64> {
    let ks: Vec<Vec<f64>> = (0..grid.dim()).map(|a| wavenumbers(grid.shape()[a], grid.lengths()[a])).collect();
    let mut kv = vec![0.0; grid.dim()];
    (0..grid.len())
        .map(|lin| {
            let idx = grid.multi_index(lin);
            for a in 0..grid.dim() {
                kv[a] = ks[a][idx[a]];
            }
            symbol(&kv)
        })
        .collect()
}

/// Multiplies the Fourier image of `data` (sampled on `grid`, all axes
/// periodic) by a table from [`fourier_table`], in place.
pub(crate) fn apply_fourier_table(grid: &UniformGrid, data: &mut [Complex64], table: &[Complex64]) {
    fft_all(grid, data, true);
    for (v, s) in data.iter_mut().zip(table) {
        *v *= s;
    }
    fft_all(grid, data, false);
    let inv = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|v| *v *= inv);
}

/// Unnormalised multi-dimensional FFT over all axes, in place.
pub(crate) fn fft_all(grid: &UniformGrid, data: &mut [Complex64], forward: bool) {
    for axis in 0..grid.dim() {
        transform_axis(grid, data, axis, forward);
    }
}

/// Raw (unnormalised) FFT of every lane along `axis`, in place.
fn transform_axis(grid: &UniformGrid, data: &mut [Complex64], axis: usize, forward: bool) {
    let n = grid.shape()[axis];
    let stride = grid.strides()[axis];
    let fft = plan(n, forward);
    let mut lane = vec![Complex64::new(0.0, 0.0); n];
    for start in lane_starts(grid, axis) {
        for i in 0..n {
            lane[i] = data[start + i * stride];
        }
        fft.process(&mut lane);
        for i in 0..n {
            data[start + i * stride] = lane[i];
        }
    }
}

/// Fraction of `Σ|η̂|²` in the upper half of the resolved band on any axis
/// (`|freq| > n/4`). A smoothness proxy: well-resolved smooth states sit near
/// round-off, kinks and under-resolution push it up. Reported, never enforced.
pub fn spectral_tail_mass(eta: &ComplexField) -> f64 {
    let grid = eta.grid();
    let mut data = eta.values().to_vec();
    fft_all(grid, &mut data, true);
    let shape = grid.shape();
    let (mut tail, mut total) = (0.0, 0.0);
    for (i, c) in data.iter().enumerate() {
        let m = c.norm_sqr();
        total += m;
        let high = grid.multi_index(i).iter().zip(shape).any(|(&k, &n)| frequency(k, n).abs() > n as f64 / 4.0);
        if high {
            tail += m;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}

/// Momentum image of `eta` on `grid.momentum_grid()`.
pub fn forward_transform(eta: &ComplexField) -> Result<MomentumField> {
    let grid = eta.grid();
    let pgrid = grid.momentum_grid()?;
    let mut data = eta.values().to_vec();
    for axis in 0..grid.dim() {
        let n = grid.shape()[axis];
        let stride = grid.strides()[axis];
        let h = grid.spacing(axis);
        let x0 = grid.origin(axis);
        let scale = h / (2.0 * PI).sqrt();
        let fft = plan(n, true);
        let mut lane = vec![Complex64::new(0.0, 0.0); n];
        for start in lane_starts(grid, axis) {
            for i in 0..n {
                lane[i] = data[start + i * stride];
            }
            fft.process(&mut lane);
            for j in 0..n {
                // centred slot j holds bin k with frequency j - n/2
                let k = (j + n - n / 2) % n;
                let p = pgrid.coordinate(axis, j);
                data[start + j * stride] = lane[k] * Complex64::from_polar(scale, -p * x0);
            }
        }
    }
    ComplexField::new(pgrid, data)
}

/// Inverse of [`forward_transform`]: maps a momentum image back onto `grid`.
pub fn inverse_transform(phi: &MomentumField, grid: &UniformGrid) -> Result<ComplexField> {
    let pgrid = grid.momentum_grid()?;
    phi.same_grid(&pgrid)?;
    let mut data = phi.values().to_vec();
    for axis in 0..grid.dim() {
        let n = grid.shape()[axis];
        let stride = grid.strides()[axis];
        let x0 = grid.origin(axis);
        let scale = pgrid.spacing(axis) / (2.0 * PI).sqrt();
        let fft = plan(n, false);
        let mut lane = vec![Complex64::new(0.0, 0.0); n];
        for start in lane_starts(grid, axis) {
            for j in 0..n {
                let k = (j + n - n / 2) % n;
                let p = pgrid.coordinate(axis, j);
                lane[k] = data[start + j * stride] * Complex64::from_polar(scale, p * x0);
            }
            fft.process(&mut lane);
            for i in 0..n {
                data[start + i * stride] = lane[i];
            }
        }
    }
    ComplexField::new(grid.clone(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::RealField;

    #[test]
    fn tail_mass_separates_smooth_from_kinked() {
        let g = UniformGrid::periodic_1d(256, 20.0).unwrap();
        let smooth = ComplexField::from_fn(&g, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let kinked = ComplexField::from_fn(&g, |x| Complex64::new((-x[0].abs()).exp(), 0.0));
        assert!(spectral_tail_mass(&smooth) < 1e-20);
        assert!(spectral_tail_mass(&kinked) > 1e-8);
    }

    #[test]
    fn plane_wave_single_bin() {
        let g = UniformGrid::periodic_1d(64, 8.0).unwrap();
        let p0 = 3.0 * 2.0 * PI / 8.0;
        let eta = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, p0 * x[0]));
        let phi = forward_transform(&eta).unwrap();
        let pg = phi.grid().clone();
        for (j, v) in phi.values().iter().enumerate() {
            let p = pg.coordinate(0, j);
            if (p - p0).abs() < 1e-9 {
                assert!(v.norm() > 1.0);
            } else {
                assert!(v.norm() < 1e-12, "bin {j} p={p} amplitude {}", v.norm());
            }
        }
    }

    #[test]
    fn gaussian_momentum_width_and_round_trip() {
        let g = UniformGrid::periodic_1d(1024, 40.0).unwrap();
        let eta = RealField::from_fn(&g, |x| (-x[0] * x[0] / 2.0).exp() / (2.0 * PI).sqrt())
            .map(f64::sqrt)
            .to_complex();
        let phi = forward_transform(&eta).unwrap();
        let wp = phi.modulus_sqr();
        assert!((wp.integrate() - 1.0).abs() < 1e-10);
        let pg = wp.grid().clone();
        let var: f64 = wp
            .values()
            .iter()
            .enumerate()
            .map(|(j, w)| pg.coordinate(0, j).powi(2) * w)
            .sum::<f64>()
            * pg.cell_volume();
        assert!((var.sqrt() - 0.5).abs() < 1e-6);
        let back = inverse_transform(&phi, &g).unwrap();
        for (a, b) in back.values().iter().zip(eta.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_open_grid() {
        let g = UniformGrid::open_1d(16, 1.0).unwrap();
        assert!(forward_transform(&ComplexField::zeros(&g)).is_err());
    }
}
