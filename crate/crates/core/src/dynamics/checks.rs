use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{EvolutionConfig, Hamiltonian, LiouvilleStepper, WaveStepper};
use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::representations::{DensityMatrix, WaveState};

/// L² mismatch between two evaluations of `∂w/∂t`: `2·Im(η*·Ĥη)` from the
/// wave equation, and `−∇·J` with `J = Im(η*∇η)/μ` by fourth-order
/// differences. Zero at discretization order exactly when `Ĥ₀` is the
/// Schrödinger kinetic term for the state's mass.
pub fn continuity_residual(s: &WaveState, h: &Hamiltonian) -> Result<f64> {
    h.check_grid(s.grid())?;
    let grid = s.grid();
    let eta = s.eta();
    let he = h.apply(eta, 0.0)?;
    let mut diff: Vec<f64> = eta.values().iter().zip(he.values()).map(|(e, x)| 2.0 * (e.conj() * x).im).collect();
    for axis in 0..grid.dim() {
        let d = eta.gradient_fd(axis)?;
        let j = RealField::new(
            grid.clone(),
            eta.values().iter().zip(d.values()).map(|(e, de)| (e.conj() * de).im / h.mu()).collect(),
        )?;
        for (r, dj) in diff.iter_mut().zip(j.gradient_fd(axis)?.values()) {
            *r += dj;
        }
    }
    Ok(RealField::new(grid.clone(), diff)?.l2_norm())
}

/// Residuals over a `(b₂, b₄)` lattice, row-major in `b2`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianScan {
    pub b2: Vec<f64>,
    pub b4: Vec<f64>,
    pub residuals: Vec<Vec<f64>>,
    /// `(i, j)` of the smallest residual (first in row-major order on ties).
    pub argmin: (usize, usize),
}

impl HamiltonianScan {
    pub fn minimum(&self) -> (f64, f64, f64) {
        let (i, j) = self.argmin;
        (self.b2[i], self.b4[j], self.residuals[i][j])
    }
}

/// `n2` values of `b₂` on `[0.1, 2]` with `1/(2μ)` spliced in, and `n4`
/// values of `b₄` on `[−0.5, 0.5]` (forced odd, so 0 is included).
pub fn default_scan_axes(mu: f64, n2: usize, n4: usize) -> (Vec<f64>, Vec<f64>) {
    let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
        if n < 2 {
            return vec![a];
        }
        (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
    };
    let mut b2 = lin(0.1, 2.0, n2);
    let target = 0.5 / mu;
    if !b2.iter().any(|&b| (b - target).abs() < 1e-12) {
        b2.push(target);
        b2.sort_by(|a, b| a.total_cmp(b));
    }
    let n4 = if n4 % 2 == 0 { n4 + 1 } else { n4 };
    let mut b4 = lin(-0.5, 0.5, n4);
    b4[n4 / 2] = 0.0;
    (b2, b4)
}

/// Continuity residual of `s` for every `(b₂, b₄)` pair, evaluated in parallel.
pub fn hamiltonian_scan(s: &WaveState, base: &Hamiltonian, b2: &[f64], b4: &[f64]) -> Result<HamiltonianScan> {
    if b2.is_empty() || b4.is_empty() {
        return Err(Error::InvalidArgument("empty scan axis".into()));
    }
    let flat: Vec<f64> = (0..b2.len() * b4.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / b4.len(), k % b4.len());
            let mut coeffs = vec![(2, b2[i])];
            if b4[j] != 0.0 {
                coeffs.push((4, b4[j]));
            }
            continuity_residual(s, &base.clone().with_coefficients(coeffs)?)
        })
        .collect::<Result<_>>()?;
    let mut argmin = (0, 0);
    for (k, &r) in flat.iter().enumerate() {
        let (i, j) = argmin;
        if r < flat[i * b4.len() + j] {
            argmin = (k / b4.len(), k % b4.len());
        }
    }
    Ok(HamiltonianScan {
        b2: b2.to_vec(),
        b4: b4.to_vec(),
        residuals: flat.chunks(b4.len()).map(<[f64]>::to_vec).collect(),
        argmin,
    })
}

fn gram(states: &[Vec<Complex64>], dv: f64) -> DMatrix<Complex64> {
    let n = states.len();
    DMatrix::from_fn(n, n, |i, j| {
        states[i].iter().zip(&states[j]).map(|(a, b)| a.conj() * b).sum::<Complex64>() * dv
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    pub initial: DMatrix<Complex64>,
    pub evolved: DMatrix<Complex64>,
    /// `max |G_ij(T) − G_ij(0)|`.
    pub max_drift: f64,
    /// `max ||G_ij(T)| − |G_ij(0)||`.
    pub max_modulus_drift: f64,
}

/// Evolves each state independently and compares the Gram matrices of
/// pairwise inner products before and after.
pub fn orthogonality_preservation_check(
    states: &[WaveState],
    h: &Hamiltonian,
    cfg: &EvolutionConfig,
) -> Result<OrthogonalityReport> {
    let first = states.first().ok_or_else(|| Error::InvalidArgument("no states given".into()))?;
    let grid = first.grid().clone();
    for s in states {
        h.check_grid(s.grid())?;
    }
    let dv = grid.cell_volume();
    let before: Vec<Vec<Complex64>> = states.iter().map(|s| s.eta().values().to_vec()).collect();
    let after = states
        .par_iter()
        .map(|s| {
            let mut stepper = WaveStepper::new(h, cfg)?;
            let mut eta = s.eta().clone();
            for step in 0..cfg.steps {
                eta = stepper.step(&eta, step as f64 * cfg.dt)?;
            }
            Ok(eta.into_values())
        })
        .collect::<Result<Vec<_>>>()?;
    let initial = gram(&before, dv);
    let evolved = gram(&after, dv);
    let max_drift = initial.iter().zip(evolved.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let max_modulus_drift =
        initial.iter().zip(evolved.iter()).map(|(a, b)| (a.norm() - b.norm()).abs()).fold(0.0, f64::max);
    Ok(OrthogonalityReport { initial, evolved, max_drift, max_modulus_drift })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixtureReport {
    pub initial: Vec<f64>,
    pub evolved: Vec<f64>,
    pub max_drift: f64,
}

/// Builds `ρ = Σ P_i η_i η_i†`, evolves it by the Liouville equation and each
/// `η_i` by the same propagator, and reads back `P_i(t) = ⟨η_i(t)|ρ(t)|η_i(t)⟩`.
pub fn mixture_weight_drift(
    states: &[WaveState],
    weights: &[f64],
    h: &Hamiltonian,
    cfg: &EvolutionConfig,
) -> Result<MixtureReport> {
    cfg.validate()?;
    let rho0 = DensityMatrix::mixture(states, weights)?;
    let initial = states.iter().map(|s| rho0.overlap(s)).collect::<Result<Vec<_>>>()?;
    let mut stepper = LiouvilleStepper::new(h, cfg.dt, 0.0)?;
    stepper.load(&rho0)?;
    let mut etas: Vec<_> = states.iter().map(|s| s.eta().clone()).collect();
    for step in 0..cfg.steps {
        let t = step as f64 * cfg.dt;
        for e in etas.iter_mut() {
            *e = stepper.propagate_vector(e, t)?;
        }
        stepper.step()?;
    }
    let rho = stepper.density()?;
    let evolved = etas
        .into_iter()
        .map(|e| rho.overlap(&WaveState::from_evolved(e, states[0].mu())))
        .collect::<Result<Vec<_>>>()?;
    let max_drift = initial.iter().zip(&evolved).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(MixtureReport { initial, evolved, max_drift })
}

