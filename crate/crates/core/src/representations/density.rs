use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{PhaseState, WaveState};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, RealField, UniformGrid};

/// Largest grid (total points) for which a dense density matrix is built.
pub const MAX_DENSITY_POINTS: usize = 1024;

/// Kernel samples `ρ(x_i, x_j)`. Traces and products carry the quadrature
/// weight `h^D`, so `Tr ρ = h^D Σ ρ_ii`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    grid: UniformGrid,
    rho: DMatrix<Complex64>,
}

pub(crate) fn check_dense_size(grid: &UniformGrid) -> Result<()> {
    if grid.len() > MAX_DENSITY_POINTS {
        Err(Error::ResourceBound { points: grid.len(), limit: MAX_DENSITY_POINTS })
    } else {
        Ok(())
    }
}

impl DensityMatrix {
    pub fn new(grid: UniformGrid, rho: DMatrix<Complex64>) -> Result<Self> {
        check_dense_size(&grid)?;
        if rho.nrows() != grid.len() || rho.ncols() != grid.len() {
            return Err(Error::InvalidArgument("matrix shape does not match the grid".into()));
        }
        Ok(Self { grid, rho })
    }

    /// `ρ = [w(r₁)w(r₂)]^{1/2}·e^{iκ(r₁,r₂)}`.
    pub fn from_phase(s: &PhaseState) -> Result<Self> {
        let grid = s.density().grid().clone();
        check_dense_size(&grid)?;
        let n = grid.len();
        let amp: Vec<f64> = s.density().values().iter().map(|w| w.sqrt()).collect();
        let rho = DMatrix::from_fn(n, n, |i, j| Complex64::from_polar(amp[i] * amp[j], s.kappa(i, j)));
        Ok(Self { grid, rho })
    }

    /// Pure-state projector `η(r₁)·η̄(r₂)`.
    pub fn from_wave(s: &WaveState) -> Result<Self> {
        Self::mixture(std::slice::from_ref(s), &[1.0])
    }

    /// `Σ P_i η_i η_i†`.
    pub fn mixture(states: &[WaveState], weights: &[f64]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        if states.len() != weights.len() {
            return Err(Error::InvalidArgument("one weight per state required".into()));
        }
        if weights.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument("mixture weights must be nonnegative".into()));
        }
        let grid = first.grid().clone();
        check_dense_size(&grid)?;
        let n = grid.len();
        let mut rho = DMatrix::zeros(n, n);
        for (s, &p) in states.iter().zip(weights) {
            s.eta().same_grid(&grid)?;
            let e = s.eta().values();
            for j in 0..n {
                let ej = e[j].conj() * p;
                for i in 0..n {
                    rho[(i, j)] += e[i] * ej;
                }
            }
        }
        Ok(Self { grid, rho })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn diagonal(&self) -> RealField {
        let values = (0..self.grid.len()).map(|i| self.rho[(i, i)].re).collect();
        RealField::new(self.grid.clone(), values).expect("square matrix on grid")
    }

    pub fn kappa(&self, i: usize, j: usize) -> f64 {
        self.rho[(i, j)].arg()
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|c| c.re).sum::<f64>() * self.grid.cell_volume()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.cell_volume().powi(2)
    }

    /// `max |ρ_ij − conj ρ_ji|`.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.grid.len();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..=i {
                err = err.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// Smallest eigenvalue of the integral operator with kernel `ρ`.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min) * self.grid.cell_volume()
    }

    /// `max |ρ_ij − σ_ij|`.
    pub fn max_abs_difference(&self, other: &DensityMatrix) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.rho.iter().zip(other.rho.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// `⟨η|ρ|η⟩ = h^{2D} Σ η̄_i ρ_ij η_j`.
    pub fn overlap(&self, s: &WaveState) -> Result<f64> {
        s.eta().same_grid(&self.grid)?;
        let e = nalgebra::DVector::from_column_slice(s.eta().values());
        let v = &self.rho * &e;
        let val: Complex64 = e.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
        Ok(val.re * self.grid.cell_volume().powi(2))
    }
}

/// Observables supported by [`expectation`].
#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Identity,
    Position { axis: usize },
    Momentum { axis: usize },
    /// `−∇²/(2μ)`.
    KineticEnergy { mu: f64 },
    PotentialEnergy(RealField),
    /// Any multiplication operator.
    Diagonal(RealField),
}

impl Observable {
    fn apply(&self, f: &ComplexField) -> Result<ComplexField> {
        let grid = f.grid();
        match self {
            Observable::Identity => Ok(f.clone()),
            Observable::Position { axis } => {
                grid.check_axis(*axis)?;
                let mut out = f.clone();
                for (i, v) in out.values_mut().iter_mut().enumerate() {
                    *v *= grid.coordinate(*axis, grid.multi_index(i)[*axis]);
                }
                Ok(out)
            }
            Observable::Momentum { axis } => Ok(f.gradient(*axis)?.scale(-Complex64::i())),
            Observable::KineticEnergy { mu } => {
                if !(*mu > 0.0) {
                    return Err(Error::InvalidArgument("kinetic energy needs a positive mass".into()));
                }
                Ok(f.laplacian().scale(Complex64::new(-0.5 / mu, 0.0)))
            }
            Observable::PotentialEnergy(u) | Observable::Diagonal(u) => {
                u.same_grid(grid)?;
                let mut out = f.clone();
                for (v, &d) in out.values_mut().iter_mut().zip(u.values()) {
                    *v *= d;
                }
                Ok(out)
            }
        }
    }
}

/// `Q̄ = Tr(Q̂ρ)`.
pub fn expectation(q: &Observable, rho: &DensityMatrix) -> Result<f64> {
    let grid = rho.grid();
    let n = grid.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let col = ComplexField::new(grid.clone(), rho.rho.column(j).iter().copied().collect())?;
        acc += q.apply(&col)?.values()[j];
    }
    Ok(acc.re * grid.cell_volume())
}

/// `⟨η|Q̂|η⟩` evaluated directly on the wave state.
pub fn wave_expectation(q: &Observable, s: &WaveState) -> Result<f64> {
    Ok(s.eta().inner(&q.apply(s.eta())?)?.re)
}
