//! Standard initial states on a grid.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField, RealField, UniformGrid};
use crate::representations::{assign_owners, PhaseState, WaveState};
use crate::topology::label_components;

fn gaussian_density(grid: &UniformGrid, center: &[f64], sigma: f64) -> Result<RealField> {
    if center.len() != grid.dim() {
        return Err(Error::InvalidArgument(format!("centre has {} coordinates on a {}D grid", center.len(), grid.dim())));
    }
    if !(sigma > 0.0) {
        return Err(Error::InvalidArgument("gaussian width must be positive".into()));
    }
    let w = RealField::from_fn(grid, |x| {
        let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum();
        (-r2 / (2.0 * sigma * sigma)).exp()
    });
    let norm = w.integrate();
    Ok(w.scale(1.0 / norm))
}

/// Normalized Gaussian density with phase `p0·x`.
pub fn gaussian_phase(grid: &UniformGrid, center: &[f64], sigma: f64, p0: &[f64]) -> Result<PhaseState> {
    let w = gaussian_density(grid, center, sigma)?;
    if p0.len() != grid.dim() {
        return Err(Error::InvalidArgument("one momentum per axis".into()));
    }
    let gamma = RealField::from_fn(grid, |x| x.iter().zip(p0).map(|(a, p)| a * p).sum());
    PhaseState::new(w, gamma)
}

pub fn gaussian(grid: &UniformGrid, center: &[f64], sigma: f64, p0: &[f64], mu: f64) -> Result<WaveState> {
    let s = gaussian_phase(grid, center, sigma, p0)?;
    let eta = ComplexField::new(
        grid.clone(),
        s.density().values().iter().zip(s.gamma().values()).map(|(w, g)| Complex64::from_polar(w.sqrt(), *g)).collect(),
    )?;
    WaveState::normalized(eta, mu)
}

/// 1D Gaussian centred at zero with phase `c3·x³`.
pub fn cubic_phase_gaussian(grid: &UniformGrid, sigma: f64, c3: f64, mu: f64) -> Result<WaveState> {
    let w = gaussian_density(grid, &vec![0.0; grid.dim()], sigma)?;
    let eta = ComplexField::new(
        grid.clone(),
        w.values()
            .iter()
            .enumerate()
            .map(|(i, v)| Complex64::from_polar(v.sqrt(), c3 * grid.position(i)[0].powi(3)))
            .collect(),
    )?;
    WaveState::normalized(eta, mu)
}

/// Two equal Gaussians at `±separation/2` on axis 0, zero velocity, with
/// component constants `(0, c_d)`.
pub fn two_gaussian(grid: &UniformGrid, separation: f64, sigma: f64, c_d: f64) -> Result<PhaseState> {
    let mut a = vec![0.0; grid.dim()];
    a[0] = -0.5 * separation;
    let mut b = a.clone();
    b[0] = 0.5 * separation;
    let w = gaussian_density(grid, &a, sigma)?.zip_with(&gaussian_density(grid, &b, sigma)?, |x, y| 0.5 * (x + y))?;
    let labels = label_components(&w);
    if labels.count != 2 {
        return Err(Error::ComponentsMerged);
    }
    let owner = assign_owners(grid, &labels);
    // label 1 is seeded first in linear order, i.e. the left packet
    Ok(PhaseState::from_parts(w, RealField::zeros(grid), owner, vec![0.0, c_d], Vec::new()))
}

/// `(x ± iy)^{|n|}·e^{−r²/2}` in the (axis 0, axis 1) plane, times a unit
/// Gaussian on any third axis.
pub fn vortex(grid: &UniformGrid, charge: i32, mu: f64) -> Result<WaveState> {
    if grid.dim() < 2 {
        return Err(Error::InvalidArgument("a vortex needs at least two dimensions".into()));
    }
    let sign = if charge < 0 { -1.0 } else { 1.0 };
    let m = charge.unsigned_abs();
    let eta = ComplexField::from_fn(grid, |x| {
        let r2: f64 = x.iter().map(|a| a * a).sum();
        Complex64::new(x[0], sign * x[1]).powu(m) * (-0.5 * r2).exp()
    });
    WaveState::normalized(eta, mu)
}

/// Harmonic-oscillator eigenfunction `∏_a ψ_{k_a}(√(μω)·x_a)` from the
/// normalized Hermite recursion.
pub fn harmonic_eigenstate(grid: &UniformGrid, index: &[usize], mu: f64, omega: f64) -> Result<WaveState> {
    if index.len() != grid.dim() {
        return Err(Error::InvalidArgument("one quantum number per axis".into()));
    }
    if !(omega > 0.0 && mu > 0.0) {
        return Err(Error::InvalidArgument("mass and frequency must be positive".into()));
    }
    let scale = (mu * omega).sqrt();
    let psi = |k: usize, x: f64| {
        let xi = scale * x;
        let mut prev = 0.0;
        let mut cur = std::f64::consts::PI.powf(-0.25) * (-0.5 * xi * xi).exp();
        for j in 0..k {
            let next = (2.0 / (j as f64 + 1.0)).sqrt() * xi * cur - (j as f64 / (j as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
        cur * scale.sqrt()
    };
    let eta = ComplexField::from_fn(grid, |x| {
        Complex64::new(x.iter().zip(index).map(|(&xa, &k)| psi(k, xa)).product(), 0.0)
    });
    WaveState::normalized(eta, mu)
}
