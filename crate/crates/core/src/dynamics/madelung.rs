use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::representations::{support_floor, PhaseState};
use crate::topology::label_components;

/// RK4 substeps are capped at `MADELUNG_STABILITY·μ·h²`.
pub const MADELUNG_STABILITY: f64 = 0.2;

/// Drift of `∫w` beyond which the run halts.
const NORM_HALT: f64 = 1e-6;

const TINY: f64 = 1e-300;

/// RK4 for `∂w/∂t = −∇·(w∇γ/μ)` and
/// `∂γ/∂t = −|∇γ|²/(2μ) − U + ∇²√w/(2μ√w)`, the quantum-potential term written
/// as `∇²ℓ + |∇ℓ|²` with `ℓ = ½ ln w`. All derivatives use one-sided stencils
/// at the box ends: `γ` and `ln w` need not be periodic even when `w` is.
/// Points below the support floor are held fixed: there the polar form turns
/// round-off into exponentially growing relative errors.
pub(crate) struct MadelungStepper {
    h: Hamiltonian,
    template: PhaseState,
    w: RealField,
    gamma: RealField,
    dt: f64,
    substeps: usize,
    norm0: f64,
}

impl MadelungStepper {
    pub(crate) fn new(s: &PhaseState, h: &Hamiltonian, dt: f64) -> Result<Self> {
        h.check_grid(s.density().grid())?;
        if h.confinement().is_some() {
            return Err(Error::SchemeIncompatible("madelung-fd does not model confining walls".into()));
        }
        if !h.is_derived() {
            return Err(Error::UnsupportedHamiltonian("madelung-fd needs b2 = 1/(2μ) and no other term".into()));
        }
        if !s.vortices().is_empty() {
            return Err(Error::UnsupportedHamiltonian("madelung-fd cannot carry nodal lines".into()));
        }
        let labels = label_components(s.density());
        if labels.count != 1 {
            return Err(Error::DisjointSupport { components: labels.count });
        }
        let grid = s.density().grid();
        let cap = MADELUNG_STABILITY * h.mu() * grid.min_spacing().powi(2);
        let substeps = (dt / cap).ceil().max(1.0) as usize;
        Ok(Self {
            h: h.clone(),
            template: s.clone(),
            w: s.density().clone(),
            gamma: s.gamma_relative().clone(),
            dt,
            substeps,
            norm0: s.density().integrate(),
        })
    }

    fn rhs(&self, w: &RealField, gamma: &RealField, t: f64) -> (RealField, RealField) {
        let mu = self.h.mu();
        let grid = w.grid();
        let ell = w.map(|v| 0.5 * v.max(TINY).ln());
        let u = self.h.potential_at(t);
        let mut dw = vec![0.0; grid.len()];
        // below the support floor the polar variables only amplify round-off
        let frozen = support_floor(w);
        let mut dg: Vec<f64> = u.values().iter().zip(w.values()).map(|(&x, &wi)| if wi < frozen { 0.0 } else { -x }).collect();
        for axis in 0..grid.dim() {
            let g = gamma.gradient_open(axis);
            let dl = ell.gradient_open(axis);
            let d2l = ell.second_derivative_open(axis);
            let flux = w.zip_with(&g, |a, b| a * b / mu).expect("same grid");
            let div = flux.gradient_open(axis);
            for i in 0..grid.len() {
                if w.values()[i] < frozen {
                    continue;
                }
                dw[i] -= div.values()[i];
                let gi = g.values()[i];
                let li = dl.values()[i];
                dg[i] += (-gi * gi + d2l.values()[i] + li * li) / (2.0 * mu);
            }
        }
        (
            RealField::new(grid.clone(), dw).expect("same grid"),
            RealField::new(grid.clone(), dg).expect("same grid"),
        )
    }

    fn rk4(&mut self, t: f64, dt: f64) {
        let axpy = |base: &RealField, k: &RealField, c: f64| base.zip_with(k, |a, b| a + c * b).expect("same grid");
        let (w0, g0) = (self.w.clone(), self.gamma.clone());
        let (k1w, k1g) = self.rhs(&w0, &g0, t);
        let (k2w, k2g) = self.rhs(&axpy(&w0, &k1w, 0.5 * dt), &axpy(&g0, &k1g, 0.5 * dt), t + 0.5 * dt);
        let (k3w, k3g) = self.rhs(&axpy(&w0, &k2w, 0.5 * dt), &axpy(&g0, &k2g, 0.5 * dt), t + 0.5 * dt);
        let (k4w, k4g) = self.rhs(&axpy(&w0, &k3w, dt), &axpy(&g0, &k3g, dt), t + dt);
        let combine = |y: &RealField, k1: &RealField, k2: &RealField, k3: &RealField, k4: &RealField| {
            let values = (0..y.values().len())
                .map(|i| {
                    y.values()[i]
                        + dt / 6.0 * (k1.values()[i] + 2.0 * k2.values()[i] + 2.0 * k3.values()[i] + k4.values()[i])
                })
                .collect();
            RealField::new(y.grid().clone(), values).expect("same grid")
        };
        self.w = combine(&w0, &k1w, &k2w, &k3w, &k4w);
        self.gamma = combine(&g0, &k1g, &k2g, &k3g, &k4g);
    }

    pub(crate) fn step(&mut self, t: f64) -> Result<()> {
        let sub = self.dt / self.substeps as f64;
        for k in 0..self.substeps {
            self.rk4(t + k as f64 * sub, sub);
        }
        let t_end = t + self.dt;
        if !(self.w.is_finite() && self.gamma.is_finite()) {
            return Err(Error::NonFinite { t: t_end });
        }
        if label_components(&self.w).count != 1 {
            return Err(Error::NodeFormed { t: t_end });
        }
        let drift = (self.w.integrate() - self.norm0).abs();
        if drift > NORM_HALT {
            return Err(Error::NormDrift { t: t_end, drift });
        }
        Ok(())
    }

    pub(crate) fn state(&self) -> PhaseState {
        PhaseState::from_parts(
            self.w.clone(),
            self.gamma.clone(),
            self.template.owners().to_vec(),
            self.template.constants().to_vec(),
            Vec::new(),
        )
    }
}
