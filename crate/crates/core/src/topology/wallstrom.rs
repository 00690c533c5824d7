use std::f64::consts::PI;

use super::{label_components, phase_from_velocity_multicomponent};
use crate::dynamics::{evolve_wave, EvolutionConfig, Hamiltonian, Scheme};
use crate::error::{Error, Result};
use crate::grid::{RealField, UniformGrid};
use crate::representations::{wave_from_phase, ObservationalState};

/// Two Gaussian packets of width `sigma`, centred at `±separation/2`, at rest,
/// whose phase constants differ by `c_d` between the two components.
#[derive(Debug, Clone, PartialEq)]
pub struct WallstromSetup {
    pub separation: f64,
    pub sigma: f64,
    pub c_d: f64,
}

impl WallstromSetup {
    /// Separation 20σ, `c_d = π`, free evolution with `μ = 1` to `t = 20` on a
    /// 200-long periodic box; split-step is exact for `U = 0`, so large steps
    /// cost nothing in accuracy.
    pub fn canonical() -> Result<(Self, Hamiltonian, EvolutionConfig)> {
        let grid = UniformGrid::periodic_1d(2048, 200.0)?;
        let h = Hamiltonian::free(&grid, 1.0)?;
        let cfg = EvolutionConfig::new(Scheme::SplitStep, 0.05, 400).with_record_every(1);
        Ok((Self { separation: 20.0, sigma: 1.0, c_d: PI }, h, cfg))
    }

    pub fn density(&self, grid: &UniformGrid) -> Result<RealField> {
        if grid.dim() != 1 {
            return Err(Error::InvalidArgument("the two-packet setup is one-dimensional".into()));
        }
        if !(self.sigma > 0.0 && self.separation > 0.0) {
            return Err(Error::InvalidArgument("width and separation must be positive".into()));
        }
        let s2 = self.sigma * self.sigma;
        let g = |x: f64, c: f64| (-(x - c).powi(2) / (2.0 * s2)).exp();
        let w = RealField::from_fn(grid, |x| g(x[0], -0.5 * self.separation) + g(x[0], 0.5 * self.separation));
        let norm = w.integrate();
        Ok(w.scale(1.0 / norm))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WallstromReport {
    pub times: Vec<f64>,
    /// `max|w_A − w_B|` at each recorded time.
    pub linf: Vec<f64>,
    /// Support component count of each run at each recorded time.
    pub components: Vec<(usize, usize)>,
    /// The two runs start from bit-identical `{w, v}`.
    pub identical_observational: bool,
    /// First recorded time at which either support is connected.
    pub overlap_time: Option<f64>,
    pub max_before_overlap: f64,
    pub max_after_overlap: f64,
    pub final_difference: f64,
}

/// Builds two phase states with identical `{w, v = 0}` whose components carry
/// constants `(0, 0)` and `(0, c_d)`, evolves both with the same wave scheme,
/// and tracks the density difference.
pub fn wallstrom_demo(setup: &WallstromSetup, h: &Hamiltonian, cfg: &EvolutionConfig) -> Result<WallstromReport> {
    let grid = h.grid().clone();
    let mu = h.mu();
    let w = setup.density(&grid)?;
    if label_components(&w).count != 2 {
        return Err(Error::ComponentsMerged);
    }
    let obs = ObservationalState::new(w, vec![RealField::zeros(&grid)])?;
    let a = phase_from_velocity_multicomponent(&obs, mu, &[0.0, 0.0])?;
    let b = phase_from_velocity_multicomponent(&obs, mu, &[0.0, setup.c_d])?;
    let identical_observational = a.to_observational(mu)? == b.to_observational(mu)?;

    let run = |p| -> Result<Vec<(f64, RealField)>> {
        let mut out = Vec::new();
        evolve_wave(&wave_from_phase(p, mu)?, h, cfg, |_, t, s| {
            out.push((t, s.density()));
            Ok(())
        })?;
        Ok(out)
    };
    let (ra, rb) = rayon::join(|| run(&a), || run(&b));
    let (ra, rb) = (ra?, rb?);

    let mut report = WallstromReport {
        times: Vec::with_capacity(ra.len()),
        linf: Vec::with_capacity(ra.len()),
        components: Vec::with_capacity(ra.len()),
        identical_observational,
        overlap_time: None,
        max_before_overlap: 0.0,
        max_after_overlap: 0.0,
        final_difference: 0.0,
    };
    for ((t, wa), (_, wb)) in ra.iter().zip(&rb) {
        let diff = wa.zip_with(wb, |x, y| x - y)?.linf_norm();
        let counts = (label_components(wa).count, label_components(wb).count);
        if report.overlap_time.is_none() && (counts.0 < 2 || counts.1 < 2) {
            report.overlap_time = Some(*t);
        }
        if report.overlap_time.is_none() {
            report.max_before_overlap = report.max_before_overlap.max(diff);
        } else {
            report.max_after_overlap = report.max_after_overlap.max(diff);
        }
        report.times.push(*t);
        report.linf.push(diff);
        report.components.push(counts);
        report.final_difference = diff;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_constants_give_identical_runs() {
        let (mut setup, h, _) = WallstromSetup::canonical().unwrap();
        setup.c_d = 0.0;
        let cfg = EvolutionConfig::new(Scheme::SplitStep, 0.5, 40);
        let r = wallstrom_demo(&setup, &h, &cfg).unwrap();
        assert!(r.identical_observational);
        assert!(r.linf.iter().all(|&d| d < 1e-10));
    }

    #[test]
    fn merged_start_is_rejected() {
        let (mut setup, h, cfg) = WallstromSetup::canonical().unwrap();
        setup.separation = 2.0;
        assert_eq!(wallstrom_demo(&setup, &h, &cfg), Err(Error::ComponentsMerged));
    }
}
