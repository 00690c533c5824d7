use std::borrow::Cow;
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::spectral::{apply_fourier_table, fourier_table};
use crate::grid::stencil;
use crate::grid::{ComplexField, RealField, UniformGrid};

/// `U(x, t)` sampled on the grid at time `t`.
pub type PotentialFn = Arc<dyn Fn(f64) -> RealField + Send + Sync>;

#[derive(Clone)]
pub enum Potential {
    Static(RealField),
    TimeDependent(PotentialFn),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Static(u) => f.debug_tuple("Static").field(&u.grid()).finish(),
            Potential::TimeDependent(_) => f.write_str("TimeDependent(..)"),
        }
    }
}

/// `Ĥ = −Σ b_{2l}·(∇²)^l + U(x, t)`, optionally confined to a box with
/// Dirichlet walls. The default coefficient list is the single term
/// `b₂ = 1/(2μ)`.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    mu: f64,
    grid: UniformGrid,
    potential: Potential,
    coeffs: Vec<(u32, f64)>,
    confinement: Option<Vec<bool>>,
    kinetic: OnceLock<Arc<[Complex64]>>,
}

impl Hamiltonian {
    pub fn new(mu: f64, u: RealField) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidArgument(format!("mass parameter {mu} must be positive")));
        }
        if !u.is_finite() {
            return Err(Error::InvalidArgument("potential must be finite".into()));
        }
        Ok(Self {
            mu,
            grid: u.grid().clone(),
            potential: Potential::Static(u),
            coeffs: vec![(2, 0.5 / mu)],
            confinement: None,
            kinetic: OnceLock::new(),
        })
    }

    pub fn free(grid: &UniformGrid, mu: f64) -> Result<Self> {
        Self::new(mu, RealField::zeros(grid))
    }

    /// `U = ½μω²|x|²`.
    pub fn harmonic(grid: &UniformGrid, mu: f64, omega: f64) -> Result<Self> {
        let k = 0.5 * mu * omega * omega;
        Self::new(mu, RealField::from_fn(grid, |x| k * x.iter().map(|c| c * c).sum::<f64>()))
    }

    /// Potential evaluated afresh at every step.
    pub fn time_dependent(grid: &UniformGrid, mu: f64, u: PotentialFn) -> Result<Self> {
        let mut h = Self::free(grid, mu)?;
        h.potential = Potential::TimeDependent(u);
        Ok(h)
    }

    /// Replaces the kinetic coefficients by `(order, b)` pairs; orders must be
    /// even, at least 2 and distinct.
    pub fn with_coefficients(mut self, coeffs: Vec<(u32, f64)>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("at least one kinetic coefficient required".into()));
        }
        let mut seen = Vec::new();
        for &(order, b) in &coeffs {
            if order < 2 || order % 2 == 1 {
                return Err(Error::InvalidArgument(format!("derivative order {order} must be even and at least 2")));
            }
            if !b.is_finite() {
                return Err(Error::InvalidArgument(format!("coefficient b{order} is not finite")));
            }
            if seen.contains(&order) {
                return Err(Error::InvalidArgument(format!("order {order} listed twice")));
            }
            seen.push(order);
        }
        self.coeffs = coeffs;
        self.kinetic = OnceLock::new();
        Ok(self)
    }

    /// Confines the particle to `[lo, hi]` along every axis; the wave state
    /// vanishes outside.
    pub fn with_box(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::InvalidArgument(format!("box ({lo}, {hi}) is empty")));
        }
        let grid = &self.grid;
        let mask: Vec<bool> = (0..grid.len()).map(|i| grid.position(i).iter().all(|&x| x > lo && x < hi)).collect();
        if mask.iter().filter(|&&m| m).count() < crate::grid::MIN_POINTS {
            return Err(Error::InvalidArgument(format!("box ({lo}, {hi}) holds too few grid points")));
        }
        self.confinement = Some(mask);
        Ok(self)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn coefficients(&self) -> &[(u32, f64)] {
        &self.coeffs
    }

    pub fn confinement(&self) -> Option<&[bool]> {
        self.confinement.as_deref()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn is_time_dependent(&self) -> bool {
        matches!(self.potential, Potential::TimeDependent(_))
    }

    pub fn potential_at(&self, t: f64) -> Cow<'_, RealField> {
        match &self.potential {
            Potential::Static(u) => Cow::Borrowed(u),
            Potential::TimeDependent(f) => Cow::Owned(f(t)),
        }
    }

    /// Only the `b₂` term is present.
    pub fn is_second_order(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].0 == 2
    }

    /// The Schrödinger form: `b₂ = 1/(2μ)` and nothing else.
    pub fn is_derived(&self) -> bool {
        self.is_second_order() && (self.coeffs[0].1 - 0.5 / self.mu).abs() <= 1e-15 * (0.5 / self.mu)
    }

    /// Fourier symbol of the kinetic part at `|k|² = k2`.
    pub(crate) fn kinetic_symbol(&self, k2: f64) -> f64 {
        self.coeffs.iter().map(|&(order, b)| -b * (-k2).powi(order as i32 / 2)).sum()
    }

    /// Spectral kinetic operator applies on fully periodic, unconfined grids;
    /// otherwise fourth-order differences with Dirichlet ends on open axes.
    pub fn is_spectral(&self) -> bool {
        self.grid.is_periodic() && self.confinement.is_none()
    }

    /// Kinetic symbol over the FFT bins, built once per Hamiltonian.
    pub(crate) fn kinetic_table(&self) -> Arc<[Complex64]> {
        self.kinetic
            .get_or_init(|| {
                fourier_table(&self.grid, |k| Complex64::new(self.kinetic_symbol(k.iter().map(|c| c * c).sum()), 0.0))
                    .into()
            })
            .clone()
    }

    pub(crate) fn check_grid(&self, grid: &UniformGrid) -> Result<()> {
        if grid == &self.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    fn mask_in_place(&self, data: &mut [Complex64]) {
        if let Some(mask) = &self.confinement {
            for (v, &m) in data.iter_mut().zip(mask) {
                if !m {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
        }
    }

    /// `Ĥ₀η`.
    pub(crate) fn apply_kinetic(&self, eta: &ComplexField) -> ComplexField {
        let mut data = eta.values().to_vec();
        self.mask_in_place(&mut data);
        if self.is_spectral() {
            apply_fourier_table(&self.grid, &mut data, &self.kinetic_table());
            return ComplexField::new(self.grid.clone(), data).expect("same grid");
        }
        let base = ComplexField::new(self.grid.clone(), data).expect("same grid");
        let max_power = self.coeffs.iter().map(|&(o, _)| o / 2).max().unwrap_or(0);
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        let mut power = base;
        for l in 1..=max_power {
            power = self.fd_laplacian(&power);
            for &(order, b) in &self.coeffs {
                if order / 2 == l {
                    for (o, p) in out.iter_mut().zip(power.values()) {
                        *o -= p * b;
                    }
                }
            }
        }
        self.mask_in_place(&mut out);
        ComplexField::new(self.grid.clone(), out).expect("same grid")
    }

    /// Symmetric fourth-order Laplacian: wrapping on periodic axes, zero data
    /// beyond open ends and outside the confinement box.
    fn fd_laplacian(&self, f: &ComplexField) -> ComplexField {
        let mut acc = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for axis in 0..self.grid.dim() {
            let h = self.grid.spacing(axis);
            let d2 = if self.grid.periodic()[axis] {
                f.map_lanes(axis, |lane, out| stencil::second_derivative(lane, h, true, out))
            } else {
                f.map_lanes(axis, |lane, out| stencil::second_derivative_dirichlet(lane, h, out))
            };
            for (a, b) in acc.iter_mut().zip(d2.values()) {
                *a += b;
            }
        }
        self.mask_in_place(&mut acc);
        ComplexField::new(self.grid.clone(), acc).expect("same grid")
    }

    /// `Ĥη` at time `t`.
    pub fn apply(&self, eta: &ComplexField, t: f64) -> Result<ComplexField> {
        self.check_grid(eta.grid())?;
        let mut out = self.apply_kinetic(eta);
        let u = self.potential_at(t);
        u.same_grid(&self.grid)?;
        for ((o, e), &uu) in out.values_mut().iter_mut().zip(eta.values()).zip(u.values()) {
            *o += e * uu;
        }
        self.mask_in_place(out.values_mut());
        Ok(out)
    }

    /// `⟨η|Ĥ|η⟩`.
    pub fn energy(&self, eta: &ComplexField, t: f64) -> Result<f64> {
        Ok(eta.inner(&self.apply(eta, t)?)?.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_wave_is_an_eigenvector() {
        let g = UniformGrid::periodic_1d(64, 10.0).unwrap();
        let k = 2.0 * std::f64::consts::PI * 3.0 / 10.0;
        let eta = ComplexField::from_fn(&g, |x| Complex64::from_polar(1.0, k * x[0]));
        for (coeffs, expect) in [
            (vec![(2, 0.5)], 0.5 * k * k),
            (vec![(2, 0.5), (4, 0.1)], 0.5 * k * k - 0.1 * k.powi(4)),
        ] {
            let h = Hamiltonian::free(&g, 1.0).unwrap().with_coefficients(coeffs).unwrap();
            let he = h.apply(&eta, 0.0).unwrap();
            for (a, b) in he.values().iter().zip(eta.values()) {
                assert!((a - b * expect).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn finite_difference_operator_is_hermitian() {
        let g = UniformGrid::open_1d(40, 8.0).unwrap();
        let h = Hamiltonian::harmonic(&g, 1.0, 1.0).unwrap().with_coefficients(vec![(2, 0.5), (4, 0.05)]).unwrap();
        let a = ComplexField::from_fn(&g, |x| Complex64::new((-x[0] * x[0]).exp(), x[0].sin()));
        let b = ComplexField::from_fn(&g, |x| Complex64::new(x[0].cos(), 0.3 * x[0]));
        let lhs = a.inner(&h.apply(&b, 0.0).unwrap()).unwrap();
        let rhs = h.apply(&a, 0.0).unwrap().inner(&b).unwrap();
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_coefficients() {
        let g = UniformGrid::periodic_1d(16, 1.0).unwrap();
        let h = Hamiltonian::free(&g, 1.0).unwrap();
        assert!(h.clone().with_coefficients(vec![(3, 1.0)]).is_err());
        assert!(h.clone().with_coefficients(vec![(2, 1.0), (2, 1.0)]).is_err());
        assert!(h.with_box(0.3, 0.2).is_err());
        assert!(Hamiltonian::free(&g, 0.0).is_err());
    }
}
