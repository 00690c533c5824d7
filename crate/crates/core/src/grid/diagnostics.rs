use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{continuity_residual, Hamiltonian};
use crate::error::{Error, Result};
use crate::grid::{spectral_tail_mass, ComplexField};
use crate::representations::{mean_momentum_two_paths, DensityMatrix, PhaseState, WaveState};

/// Moments and consistency measures of a wave state.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub norm: f64,
    pub mean_x: Vec<f64>,
    /// R.m.s. half-width `(Σ_axis var_axis)^{1/2}`.
    pub sigma_x: f64,
    pub mean_v: Vec<f64>,
    /// From the momentum image on periodic grids, `∫w∇γ` otherwise.
    pub mean_p: Vec<f64>,
    pub energy: f64,
    pub continuity_residual: f64,
    /// Smoothness proxy, see [`spectral_tail_mass`]. NaN for density matrices.
    pub spectral_tail: f64,
}

/// Diagnostics of `s` at time `t`; without a Hamiltonian the free one for
/// the state's mass is used for the energy and the continuity residual.
pub fn diagnostics(s: &WaveState, h: Option<&Hamiltonian>, t: f64) -> Result<Diagnostics> {
    let grid = s.grid();
    let w = s.density();
    let norm = w.integrate();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let dv = grid.cell_volume();
    let dim = grid.dim();
    let mut mean_x = vec![0.0; dim];
    let mut second = vec![0.0; dim];
    for (i, &wi) in w.values().iter().enumerate() {
        for (a, x) in grid.position(i).into_iter().enumerate() {
            mean_x[a] += x * wi;
            second[a] += x * x * wi;
        }
    }
    for a in 0..dim {
        mean_x[a] *= dv / norm;
        second[a] *= dv / norm;
    }
    let var: f64 = (0..dim).map(|a| (second[a] - mean_x[a] * mean_x[a]).max(0.0)).sum();
    let mean_v = (0..dim).map(|a| Ok(s.current(a)?.integrate() / norm)).collect::<Result<Vec<_>>>()?;
    let mean_p = if grid.is_periodic() && grid.shape().iter().all(|n| n % 2 == 0) {
        mean_momentum_two_paths(s)?.0.into_iter().map(|p| p / norm).collect()
    } else {
        mean_v.iter().map(|v| v * s.mu()).collect()
    };
    let free;
    let h = match h {
        Some(h) => h,
        None => {
            free = Hamiltonian::free(grid, s.mu())?;
            &free
        }
    };
    Ok(Diagnostics {
        norm,
        mean_x,
        sigma_x: var.sqrt(),
        mean_v,
        mean_p,
        energy: h.energy(s.eta(), t)? / norm,
        continuity_residual: continuity_residual(s, h)?,
        spectral_tail: spectral_tail_mass(s.eta()),
    })
}

/// Diagnostics of a phase state through `η = √w·e^{iγ}`, without
/// renormalizing: a drifting norm shows up in `norm`.
pub fn phase_diagnostics(s: &PhaseState, mu: f64, h: Option<&Hamiltonian>, t: f64) -> Result<Diagnostics> {
    let gamma = s.gamma();
    let values = s.density().values().iter().zip(gamma.values()).map(|(&w, &g)| Complex64::from_polar(w.sqrt(), g));
    let eta = ComplexField::new(s.density().grid().clone(), values.collect())?;
    diagnostics(&WaveState::from_evolved(eta, mu), h, t)
}

/// Diagnostics of a density matrix: moments from `diag ρ`, momentum and
/// energy as traces. The continuity residual and the spectral tail need a
/// wave and are reported as NaN.
pub fn density_diagnostics(rho: &DensityMatrix, h: &Hamiltonian, t: f64) -> Result<Diagnostics> {
    let grid = rho.grid();
    h.check_grid(grid)?;
    let w = rho.diagonal();
    let norm = rho.trace();
    if !(norm > 0.0) {
        return Err(Error::ZeroNorm);
    }
    let dim = grid.dim();
    let dv = grid.cell_volume();
    let mut mean_x = vec![0.0; dim];
    let mut second = vec![0.0; dim];
    for (i, &wi) in w.values().iter().enumerate() {
        for (a, x) in grid.position(i).into_iter().enumerate() {
            mean_x[a] += x * wi * dv / norm;
            second[a] += x * x * wi * dv / norm;
        }
    }
    let var: f64 = (0..dim).map(|a| (second[a] - mean_x[a] * mean_x[a]).max(0.0)).sum();
    // Tr(p̂ρ) and Tr(Ĥρ) column by column, one pass over the matrix
    let n = grid.len();
    let (p_sum, energy) = (0..n)
        .into_par_iter()
        .map(|j| -> Result<(Vec<Complex64>, Complex64)> {
            let col = ComplexField::new(grid.clone(), rho.matrix().column(j).iter().copied().collect())?;
            let p: Vec<Complex64> = (0..dim)
                .map(|a| Ok(col.gradient(a)?.values()[j] * -Complex64::i()))
                .collect::<Result<_>>()?;
            Ok((p, h.apply(&col, t)?.values()[j]))
        })
        .try_reduce(
            || (vec![Complex64::new(0.0, 0.0); dim], Complex64::new(0.0, 0.0)),
            |(mut pa, ea), (pb, eb)| {
                pa.iter_mut().zip(pb).for_each(|(x, y)| *x += y);
                Ok((pa, ea + eb))
            },
        )?;
    let mean_p: Vec<f64> = p_sum.iter().map(|p| p.re * dv / norm).collect();
    Ok(Diagnostics {
        norm,
        mean_x,
        sigma_x: var.sqrt(),
        mean_v: mean_p.iter().map(|p| p / h.mu()).collect(),
        mean_p,
        energy: energy.re * dv / norm,
        continuity_residual: f64::NAN,
        spectral_tail: f64::NAN,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ComplexField, UniformGrid};
    use num_complex::Complex64;

    fn packet(g: &UniformGrid, x0: f64, sigma: f64, p0: f64) -> WaveState {
        let eta = ComplexField::from_fn(g, |x| {
            Complex64::from_polar((-(x[0] - x0).powi(2) / (4.0 * sigma * sigma)).exp(), p0 * x[0])
        });
        WaveState::normalized(eta, 1.0).unwrap()
    }

    #[test]
    fn gaussian_moments() {
        let g = UniformGrid::periodic_1d(1024, 40.0).unwrap();
        let d = diagnostics(&packet(&g, 2.0, 1.0, 0.0), None, 0.0).unwrap();
        assert!((d.mean_x[0] - 2.0).abs() < 1e-10);
        assert!(d.mean_v[0].abs() < 1e-12 && d.mean_p[0].abs() < 1e-12);
        assert!((d.sigma_x - 1.0).abs() < 1e-6);
        // kinetic energy of a Gaussian: 1/(8σ²μ)
        assert!((d.energy - 0.125).abs() < 1e-8);

        let p0 = 1.7;
        let d = diagnostics(&packet(&g, 0.0, 1.0, p0), None, 0.0).unwrap();
        assert!((d.mean_p[0] - p0).abs() < 1e-6);
        assert!((d.mean_p[0] - d.mean_v[0]).abs() < 1e-6);
    }

    #[test]
    fn three_routes_agree_on_a_pure_state() {
        let g = UniformGrid::periodic_1d(128, 20.0).unwrap();
        let s = packet(&g, -1.0, 1.2, 0.8);
        let h = Hamiltonian::harmonic(&g, 1.0, 0.5).unwrap();
        let a = diagnostics(&s, Some(&h), 0.0).unwrap();
        let b = density_diagnostics(&DensityMatrix::from_wave(&s).unwrap(), &h, 0.0).unwrap();
        let c = phase_diagnostics(&crate::representations::wave_to_phase(&s).unwrap(), 1.0, Some(&h), 0.0).unwrap();
        for d in [&b, &c] {
            assert!((d.norm - a.norm).abs() < 1e-12);
            assert!((d.mean_x[0] - a.mean_x[0]).abs() < 1e-10);
            assert!((d.sigma_x - a.sigma_x).abs() < 1e-10);
            assert!((d.mean_p[0] - a.mean_p[0]).abs() < 1e-8);
            assert!((d.energy - a.energy).abs() < 1e-8);
        }
        assert!(b.continuity_residual.is_nan());
    }
}
