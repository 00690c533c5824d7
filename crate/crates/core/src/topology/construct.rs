use std::f64::consts::PI;

use super::{label_components, SupportLabeling, Vortex, WINDING_RESIDUAL_MAX};
use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::representations::{integrate_component, ObservationalState, PhaseState, PATH_MISMATCH_TOL};

/// `μ∮v·dl` (trapezoid) around the closed cycle of multi-indices `ring` in the
/// axis-0/axis-1 plane, or `None` if a point is off the mask or off the grid.
fn ring_circulation(s: &ObservationalState, mu: f64, mask: &[bool], ring: &[[isize; 2]], rest: &[usize]) -> Option<f64> {
    let grid = s.density().grid();
    let n = grid.shape();
    let to_linear = |c: [isize; 2]| -> Option<usize> {
        let mut idx = Vec::with_capacity(grid.dim());
        for (a, &v) in c.iter().enumerate() {
            let v = if grid.periodic()[a] {
                v.rem_euclid(n[a] as isize)
            } else if v < 0 || v >= n[a] as isize {
                return None;
            } else {
                v
            };
            idx.push(v as usize);
        }
        idx.extend_from_slice(rest);
        Some(grid.linear_index(&idx))
    };
    let lin: Vec<usize> = ring.iter().map(|&c| to_linear(c)).collect::<Option<_>>()?;
    if lin.iter().any(|&p| !mask[p]) {
        return None;
    }
    let v = s.velocity();
    let mut c = 0.0;
    for k in 0..ring.len() {
        let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
        let axis = if a[0] != b[0] { 0 } else { 1 };
        let dir = (b[axis] - a[axis]).signum() as f64;
        let (pa, pb) = (lin[k], lin[(k + 1) % ring.len()]);
        c += dir * 0.5 * grid.spacing(axis) * (v[axis].values()[pa] + v[axis].values()[pb]);
    }
    Some(mu * c)
}

/// Locates quantized circulation in the axis-0/axis-1 plane of a 2D state:
/// around every off-support point whose eight neighbours are on the support,
/// and around every plaquette with all four corners on the support.
pub fn detect_vortices(s: &ObservationalState, mu: f64) -> Result<Vec<Vortex>> {
    let grid = s.density().grid();
    if grid.dim() != 2 {
        return Err(Error::InvalidArgument("vortex detection works on 2D grids".into()));
    }
    let mask = s.support();
    let mut found = Vec::new();
    let (nx, ny) = (grid.shape()[0] as isize, grid.shape()[1] as isize);
    for i in 0..nx {
        for j in 0..ny {
            let here = grid.linear_index(&[i as usize, j as usize]);
            let (ring, center): (Vec<[isize; 2]>, [f64; 2]) = if !mask[here] {
                (
                    vec![
                        [i - 1, j - 1],
                        [i, j - 1],
                        [i + 1, j - 1],
                        [i + 1, j],
                        [i + 1, j + 1],
                        [i, j + 1],
                        [i - 1, j + 1],
                        [i - 1, j],
                    ],
                    [grid.coordinate(0, i as usize), grid.coordinate(1, j as usize)],
                )
            } else {
                (
                    vec![[i, j], [i + 1, j], [i + 1, j + 1], [i, j + 1]],
                    [
                        grid.coordinate(0, i as usize) + 0.5 * grid.spacing(0),
                        grid.coordinate(1, j as usize) + 0.5 * grid.spacing(1),
                    ],
                )
            };
            if let Some(c) = ring_circulation(s, mu, &mask, &ring, &[]) {
                let charge = (c / (2.0 * PI)).round() as i32;
                if charge != 0 {
                    found.push(Vortex { center, charge });
                }
            }
        }
    }
    Ok(found)
}

/// Relative phase of component `id`, removing the winding of any vortex
/// inside it before integrating and restoring it afterwards.
fn integrate_with_vortices(
    s: &ObservationalState,
    mu: f64,
    labels: &SupportLabeling,
    id: u32,
    vortices: &[Vortex],
) -> Result<Vec<f64>> {
    let grid = s.density().grid();
    let mut v_reg: Vec<RealField> = s.velocity().to_vec();
    for (i, &c) in labels.ids.iter().enumerate() {
        if c != id {
            continue;
        }
        let x = grid.position(i);
        for vortex in vortices {
            let g = vortex.phase_gradient_at(&x);
            for (axis, comp) in v_reg.iter_mut().enumerate() {
                comp.values_mut()[i] -= g[axis] / mu;
            }
        }
    }
    // Velocities differentiated from a sampled wave carry discretization curl
    // next to the core, so only an unquantized remainder is rejected here.
    let (mut rel, mismatch) = integrate_component(s.density(), &v_reg, mu, labels, id)?;
    if mismatch > WINDING_RESIDUAL_MAX {
        return Err(Error::NodalCirculation { mismatch });
    }
    for (i, val) in rel.iter_mut().enumerate() {
        if labels.ids[i] == id {
            let x = grid.position(i);
            *val += vortices.iter().map(|v| v.phase_at(&x)).sum::<f64>();
        }
    }
    Ok(rel)
}

/// `γ = μ∫v + c_γ` for a single component whose velocity may wind around
/// straight nodal lines. Detected vortex phases are carried analytically,
/// with their branch cuts along the negative axis-0 direction.
pub fn phase_from_velocity_winding_aware(s: &ObservationalState, mu: f64, c_gamma: f64) -> Result<PhaseState> {
    let labels = label_components(s.density());
    match labels.count {
        0 => return Err(Error::ZeroNorm),
        1 => {}
        n => return Err(Error::DisjointSupport { components: n }),
    }
    phase_from_velocity_multicomponent(s, mu, &[c_gamma])
}

/// Phase construction on each support component separately, each with its
/// own constant. Points off the support take the constant of the nearest
/// component.
pub fn phase_from_velocity_multicomponent(s: &ObservationalState, mu: f64, constants: &[f64]) -> Result<PhaseState> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!("mass parameter {mu} must be positive")));
    }
    let grid = s.density().grid().clone();
    let labels = label_components(s.density());
    if labels.count == 0 {
        return Err(Error::ZeroNorm);
    }
    if constants.len() != labels.count {
        return Err(Error::ConstantsMismatch { expected: labels.count, got: constants.len() });
    }
    let mut rel = vec![0.0; grid.len()];
    let mut all_vortices = Vec::new();
    for id in 1..=labels.count as u32 {
        let (plain, mismatch) = integrate_component(s.density(), s.velocity(), mu, &labels, id)?;
        let comp = if mismatch <= PATH_MISMATCH_TOL {
            plain
        } else if grid.dim() == 2 {
            let inside: Vec<_> = detect_vortices(s, mu)?
                .into_iter()
                .filter(|v| owning_component(&grid, &labels, v.center) == Some(id))
                .collect();
            let r = integrate_with_vortices(s, mu, &labels, id, &inside)?;
            all_vortices.extend(inside);
            r
        } else {
            return Err(Error::NodalCirculation { mismatch });
        };
        for (i, &c) in labels.ids.iter().enumerate() {
            if c == id {
                rel[i] = comp[i];
            }
        }
    }
    let owner = crate::representations::assign_owners(&grid, &labels);
    Ok(PhaseState::from_parts(
        s.density().clone(),
        RealField::new(grid, rel)?,
        owner,
        constants.to_vec(),
        all_vortices,
    ))
}

/// Component owning the grid point nearest to `center` or any of its face
/// neighbours (a vortex core itself is usually off the support).
fn owning_component(grid: &crate::grid::UniformGrid, labels: &SupportLabeling, center: [f64; 2]) -> Option<u32> {
    let idx = grid.nearest_index(&center).ok()?;
    let p = grid.linear_index(&idx);
    std::iter::once(p).chain(grid.neighbors(p)).map(|q| labels.ids[q]).find(|&c| c != 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ComplexField, UniformGrid};
    use crate::representations::{support_mask, WaveState};
    use num_complex::Complex64;

    fn observational_from(eta: ComplexField, mu: f64) -> ObservationalState {
        let ws = WaveState::normalized(eta, mu).unwrap();
        let w = ws.density();
        let mask = support_mask(&w);
        let v = (0..w.grid().dim())
            .map(|a| {
                let j = ws.current(a).unwrap();
                j.zip_with(&w, |jj, ww| if ww > 0.0 { jj / ww } else { 0.0 }).unwrap()
            })
            .collect();
        let _ = mask;
        ObservationalState::new(w, v).unwrap()
    }

    #[test]
    fn two_components_offset_by_constants() {
        let g = UniformGrid::periodic_1d(1024, 80.0).unwrap();
        let w = RealField::from_fn(&g, |x| {
            let n = |c: f64| (-(x[0] - c).powi(2) / 2.0).exp() / (2.0 * PI).sqrt();
            0.5 * (n(-10.0) + n(10.0))
        });
        let s = ObservationalState::new(w, vec![RealField::zeros(&g)]).unwrap();
        let p = phase_from_velocity_multicomponent(&s, 1.0, &[0.0, PI]).unwrap();
        let gamma = p.gamma();
        let labels = label_components(s.density());
        for (i, &id) in labels.ids.iter().enumerate() {
            match id {
                1 => assert_eq!(gamma.values()[i], 0.0),
                2 => assert_eq!(gamma.values()[i], PI),
                _ => {}
            }
        }
        assert!(matches!(
            phase_from_velocity_multicomponent(&s, 1.0, &[0.0]),
            Err(Error::ConstantsMismatch { expected: 2, got: 1 })
        ));
        // one component reduces to the plain construction
        let single = ObservationalState::new(
            RealField::from_fn(&g, |x| (-x[0] * x[0] / 2.0).exp() / (2.0 * PI).sqrt()),
            vec![RealField::from_fn(&g, |x| 0.3 * x[0])],
        )
        .unwrap();
        let a = phase_from_velocity_multicomponent(&single, 1.0, &[0.4]).unwrap();
        let b = crate::representations::phase_from_velocity(&single, 1.0, 0.4).unwrap();
        assert_eq!(a.gamma(), b.gamma());
    }

    #[test]
    fn vortex_component_round_trip() {
        let g = UniformGrid::cube(2, 128, 12.0, false).unwrap();
        let mu = 2.0;
        let w = RealField::from_fn(&g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            r2 * (-r2).exp() / PI
        });
        let swirl = |x: &[f64], axis: usize| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            if r2 == 0.0 {
                return 0.0;
            }
            if axis == 0 { 0.5 - x[1] / r2 } else { x[0] / r2 }
        };
        let v = (0..2).map(|a| RealField::from_fn(&g, |x| swirl(x, a) / mu)).collect();
        let s = ObservationalState::new(w, v).unwrap();
        assert!(matches!(
            crate::representations::phase_from_velocity(&s, mu, 0.0),
            Err(Error::NodalCirculation { .. })
        ));
        let p = phase_from_velocity_winding_aware(&s, mu, 0.0).unwrap();
        assert_eq!(p.vortices().len(), 1);
        assert_eq!(p.vortices()[0].charge, 1);
        assert!(p.vortices()[0].center.iter().all(|c| c.abs() < 1e-12));
        let w = s.density();
        let wmax = w.max();
        // the core node is off the support; stencils reaching it are skipped
        let clear = |i: usize| g.position(i).iter().map(|c| c * c).sum::<f64>() > (2.5 * g.spacing(0)).powi(2);
        for axis in 0..2 {
            let back = p.phase_gradient(axis).unwrap();
            for i in 0..g.len() {
                if w.values()[i] > 1e-6 * wmax && clear(i) {
                    let d = back.values()[i] / mu - s.velocity()[axis].values()[i];
                    assert!(d.abs() < 1e-9, "axis {axis} point {i}: {d}");
                }
            }
        }

        // velocities read off a sampled wave carry curl near the core but still resolve
        let eta = ComplexField::from_fn(&g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            Complex64::new(x[0], x[1]) * (-r2 / 2.0).exp() * Complex64::from_polar(1.0, 0.5 * x[0])
        });
        let p = phase_from_velocity_winding_aware(&observational_from(eta, mu), mu, 0.0).unwrap();
        assert_eq!(p.vortices().len(), 1);
    }
}
