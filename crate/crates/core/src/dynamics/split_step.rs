use std::f64::consts::PI;

use num_complex::Complex64;

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::grid::spectral::apply_fourier_table;
use crate::grid::{ComplexField, RealField};

/// Strang splitting `e^{−iUdt/2}·e^{−iĤ₀dt}·e^{−iUdt/2}`, potential sampled at
/// the step midpoint.
pub(crate) struct SplitStepper {
    h: Hamiltonian,
    dt: f64,
    kinetic: Vec<Complex64>,
}

fn check_potential(u: &RealField, dt: f64) -> Result<()> {
    let umax = u.linf_norm();
    if dt * umax > PI {
        return Err(Error::StabilityBound(format!("dt·max|U| = {:.3} exceeds π", dt * umax)));
    }
    Ok(())
}

impl SplitStepper {
    pub(crate) fn new(h: &Hamiltonian, dt: f64) -> Result<Self> {
        if h.confinement().is_some() {
            return Err(Error::SchemeIncompatible("split-step needs a periodic, unconfined domain; use crank-nicolson".into()));
        }
        if !h.grid().is_periodic() {
            return Err(Error::SchemeIncompatible("split-step needs every axis periodic".into()));
        }
        if !h.is_second_order() {
            return Err(Error::UnsupportedHamiltonian("split-step handles the b2 term only".into()));
        }
        if !h.is_time_dependent() {
            check_potential(&h.potential_at(0.0), dt)?;
        }
        let kinetic = h.kinetic_table().iter().map(|s| Complex64::from_polar(1.0, -s.re * dt)).collect();
        Ok(Self { h: h.clone(), dt, kinetic })
    }

    pub(crate) fn step(&mut self, eta: &ComplexField, t: f64) -> Result<ComplexField> {
        let u = self.h.potential_at(t + 0.5 * self.dt);
        if self.h.is_time_dependent() {
            check_potential(&u, self.dt)?;
        }
        let half: Vec<Complex64> = u.values().iter().map(|&v| Complex64::from_polar(1.0, -0.5 * v * self.dt)).collect();
        let mut data: Vec<Complex64> = eta.values().iter().zip(&half).map(|(e, p)| e * p).collect();
        apply_fourier_table(self.h.grid(), &mut data, &self.kinetic);
        for (d, p) in data.iter_mut().zip(&half) {
            *d *= p;
        }
        ComplexField::new(eta.grid().clone(), data)
    }
}
