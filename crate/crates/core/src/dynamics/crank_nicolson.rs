use num_complex::Complex64;

use super::Hamiltonian;
use crate::error::{Error, Result};
use crate::grid::spectral::apply_fourier_table;
use crate::grid::ComplexField;

const TOL: f64 = 1e-14;
const ACCEPT: f64 = 1e-11;
const MAX_ITER: usize = 1000;

/// `(1 + iĤdt/2)·η' = (1 − iĤdt/2)·η` with `Ĥ` at the step midpoint, solved by
/// BiCGSTAB. On spectral grids the exact inverse of the kinetic part
/// preconditions the solve.
pub(crate) struct CnStepper {
    h: Hamiltonian,
    dt: f64,
    precond: Option<Vec<Complex64>>,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

impl CnStepper {
    pub(crate) fn new(h: &Hamiltonian, dt: f64) -> Result<Self> {
        let precond = h.is_spectral().then(|| {
            h.kinetic_table().iter().map(|s| Complex64::new(1.0, 0.5 * dt * s.re).inv()).collect()
        });
        Ok(Self { h: h.clone(), dt, precond })
    }

    fn apply_a(&self, x: &[Complex64], t: f64, sign: f64) -> Result<Vec<Complex64>> {
        let f = ComplexField::new(self.h.grid().clone(), x.to_vec())?;
        let hx = self.h.apply(&f, t)?;
        let c = Complex64::new(0.0, sign * 0.5 * self.dt);
        let mut out: Vec<Complex64> = x.iter().zip(hx.values()).map(|(a, b)| a + c * b).collect();
        if let Some(mask) = self.h.confinement() {
            for (o, &m) in out.iter_mut().zip(mask) {
                if !m {
                    *o = Complex64::new(0.0, 0.0);
                }
            }
        }
        Ok(out)
    }

    fn precondition(&self, x: &[Complex64]) -> Vec<Complex64> {
        match &self.precond {
            Some(table) => {
                let mut d = x.to_vec();
                apply_fourier_table(self.h.grid(), &mut d, table);
                d
            }
            None => x.to_vec(),
        }
    }

    pub(crate) fn step(&mut self, eta: &ComplexField, t: f64) -> Result<ComplexField> {
        let tm = t + 0.5 * self.dt;
        let b = self.apply_a(eta.values(), tm, -1.0)?;
        let x = self.bicgstab(&b, tm)?;
        ComplexField::new(eta.grid().clone(), x)
    }

    fn bicgstab(&self, b: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let bnorm = norm(b);
        if bnorm == 0.0 {
            return Ok(vec![Complex64::new(0.0, 0.0); b.len()]);
        }
        let zero = Complex64::new(0.0, 0.0);
        let mut x = self.precondition(b);
        let ax = self.apply_a(&x, t, 1.0)?;
        let mut r: Vec<Complex64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let r_hat = r.clone();
        let (mut rho, mut alpha, mut omega) = (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
        let mut v = vec![zero; b.len()];
        let mut p = vec![zero; b.len()];
        let mut best = norm(&r) / bnorm;
        for _ in 0..MAX_ITER {
            if best < TOL {
                return Ok(x);
            }
            let rho_new = dot(&r_hat, &r);
            if rho_new.norm() == 0.0 {
                break;
            }
            let beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            for i in 0..p.len() {
                p[i] = r[i] + beta * (p[i] - omega * v[i]);
            }
            let y = self.precondition(&p);
            v = self.apply_a(&y, t, 1.0)?;
            alpha = rho / dot(&r_hat, &v);
            let s: Vec<Complex64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
            if norm(&s) / bnorm < TOL {
                for (xi, yi) in x.iter_mut().zip(&y) {
                    *xi += alpha * yi;
                }
                return Ok(x);
            }
            let z = self.precondition(&s);
            let tv = self.apply_a(&z, t, 1.0)?;
            let tt = dot(&tv, &tv);
            if tt.norm() == 0.0 {
                break;
            }
            omega = dot(&tv, &s) / tt;
            for i in 0..x.len() {
                x[i] += alpha * y[i] + omega * z[i];
                r[i] = s[i] - omega * tv[i];
            }
            let rel = norm(&r) / bnorm;
            if rel >= best && rel < ACCEPT {
                // stagnated at round-off level
                return Ok(x);
            }
            best = best.min(rel);
        }
        // recompute the true residual before giving up
        let ax = self.apply_a(&x, t, 1.0)?;
        let rel = b.iter().zip(&ax).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt() / bnorm;
        if rel < ACCEPT {
            Ok(x)
        } else {
            Err(Error::SolverDiverged(format!("BiCGSTAB stopped at relative residual {rel:.3e}")))
        }
    }
}
