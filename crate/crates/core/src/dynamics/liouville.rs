use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::Hamiltonian;
use crate::error::Result;
use crate::grid::spectral::{apply_fourier_table, fft_all};
use crate::grid::ComplexField;
use crate::representations::density::check_dense_size;
use crate::representations::DensityMatrix;

enum Basis {
    /// Plane waves: `Ĥ` is diagonal in Fourier space (periodic grid, constant `U`).
    Fourier,
    /// Columns are the orthonormal eigenvectors of the dense `Ĥ` matrix.
    Dense(DMatrix<Complex64>),
}

/// Evolves `ρ` by `ρ(t+dt) = e^{−iĤdt}·ρ·e^{iĤdt}`, exact in the eigenbasis of
/// `Ĥ`. Phases accumulate per step; the position-space matrix is rebuilt on
/// demand. A time-dependent potential re-diagonalizes `Ĥ(t + dt/2)` every step.
pub struct LiouvilleStepper {
    h: Hamiltonian,
    dt: f64,
    t: f64,
    basis: Basis,
    eigenvalues: Vec<f64>,
    rho_tilde: Option<DMatrix<Complex64>>,
    phases: Vec<Complex64>,
}

fn is_constant(values: &[f64]) -> bool {
    values.iter().all(|&v| v == values[0])
}

impl LiouvilleStepper {
    pub fn new(h: &Hamiltonian, dt: f64, t0: f64) -> Result<Self> {
        check_dense_size(h.grid())?;
        let mut s = Self {
            h: h.clone(),
            dt,
            t: t0,
            basis: Basis::Fourier,
            eigenvalues: Vec::new(),
            rho_tilde: None,
            phases: Vec::new(),
        };
        (s.basis, s.eigenvalues) = s.diagonalize(t0 + 0.5 * dt);
        s.phases = vec![Complex64::new(1.0, 0.0); h.grid().len()];
        Ok(s)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    fn diagonalize(&self, t: f64) -> (Basis, Vec<f64>) {
        let u = self.h.potential_at(t);
        let n = self.h.grid().len();
        if self.h.is_spectral() && is_constant(u.values()) {
            let u0 = u.values()[0];
            (Basis::Fourier, self.h.kinetic_table().iter().map(|s| s.re + u0).collect())
        } else {
            let grid = self.h.grid().clone();
            let columns: Vec<Vec<Complex64>> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let mut e = vec![Complex64::new(0.0, 0.0); n];
                    e[j] = Complex64::new(1.0, 0.0);
                    let f = ComplexField::new(grid.clone(), e).expect("grid-sized");
                    self.h.apply(&f, t).expect("grid checked").into_values()
                })
                .collect();
            let m = DMatrix::from_fn(n, n, |i, j| columns[j][i]);
            let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = nalgebra::SymmetricEigen::new(herm);
            (Basis::Dense(eig.eigenvectors), eig.eigenvalues.iter().copied().collect())
        }
    }

    /// `F·m·F†` (forward) or `F†·m·F` with the unitary DFT `F`.
    fn fourier_conjugate(&self, m: &DMatrix<Complex64>, forward: bool) -> DMatrix<Complex64> {
        let grid = self.h.grid();
        let n = grid.len();
        let cols = |mut a: DMatrix<Complex64>| {
            a.as_mut_slice().par_chunks_mut(n).for_each(|c| fft_all(grid, c, forward));
            a
        };
        let a = cols(m.clone());
        let b = cols(a.adjoint());
        b.adjoint() * Complex64::new(1.0 / n as f64, 0.0)
    }

    fn to_basis(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        match &self.basis {
            Basis::Fourier => self.fourier_conjugate(rho, true),
            Basis::Dense(v) => v.adjoint() * rho * v,
        }
    }

    fn from_basis(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        match &self.basis {
            Basis::Fourier => self.fourier_conjugate(rho, false),
            Basis::Dense(v) => v * rho * v.adjoint(),
        }
    }

    pub fn load(&mut self, rho: &DensityMatrix) -> Result<()> {
        self.h.check_grid(rho.grid())?;
        self.phases.iter_mut().for_each(|p| *p = Complex64::new(1.0, 0.0));
        self.rho_tilde = Some(self.to_basis(rho.matrix()));
        Ok(())
    }

    fn current_matrix(&self) -> DMatrix<Complex64> {
        let rt = self.rho_tilde.as_ref().expect("density loaded");
        let p = &self.phases;
        let evolved = DMatrix::from_fn(rt.nrows(), rt.ncols(), |i, j| p[i] * rt[(i, j)] * p[j].conj());
        self.from_basis(&evolved)
    }

    pub fn step(&mut self) -> Result<()> {
        if self.h.is_time_dependent() {
            let rho = DensityMatrix::new(self.h.grid().clone(), self.current_matrix())?;
            (self.basis, self.eigenvalues) = self.diagonalize(self.t + 0.5 * self.dt);
            self.load(&rho)?;
        }
        for (p, &l) in self.phases.iter_mut().zip(&self.eigenvalues) {
            *p *= Complex64::from_polar(1.0, -l * self.dt);
        }
        self.t += self.dt;
        Ok(())
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.h.grid().clone(), self.current_matrix())
    }

    /// `e^{−iĤdt}·η` with the same propagator, for states evolved alongside `ρ`.
    pub fn propagate_vector(&self, eta: &ComplexField, t: f64) -> Result<ComplexField> {
        self.h.check_grid(eta.grid())?;
        let fresh;
        let (basis, eigenvalues) = if self.h.is_time_dependent() {
            fresh = self.diagonalize(t + 0.5 * self.dt);
            (&fresh.0, &fresh.1)
        } else {
            (&self.basis, &self.eigenvalues)
        };
        let dt = self.dt;
        match basis {
            Basis::Fourier => {
                let table: Vec<Complex64> = eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * dt)).collect();
                let mut data = eta.values().to_vec();
                apply_fourier_table(self.h.grid(), &mut data, &table);
                ComplexField::new(eta.grid().clone(), data)
            }
            Basis::Dense(v) => {
                let x = DVector::from_column_slice(eta.values());
                let mut c = v.adjoint() * x;
                for (ci, &l) in c.iter_mut().zip(eigenvalues) {
                    *ci *= Complex64::from_polar(1.0, -l * dt);
                }
                ComplexField::new(eta.grid().clone(), (v * c).iter().copied().collect())
            }
        }
    }
}
