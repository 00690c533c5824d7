//! Canned demonstrations. Each prints one `PASS`/`FAIL` verdict line, the
//! evidence behind it, and writes plot-ready CSV under the output directory.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use fuzzmech_core::dynamics::{continuity_residual, default_scan_axes, hamiltonian_scan};
use fuzzmech_core::states::{cubic_phase_gaussian, vortex};
use fuzzmech_core::topology::{wallstrom_demo, winding_number, GridLoop, WallstromSetup};
use fuzzmech_core::variational::{
    certify_constancy, functional_i, gaussian_mixture_samples, verify_f_equals_sqrt_w, bump_norm_1d, bump_norm_3d,
    BumpFamily, ConstancyVerdict,
};
use fuzzmech_core::{Hamiltonian, RealField, UniformGrid};
use rayon::prelude::*;

use crate::checkpoint::Checkpoint;
use crate::error::{CliError, CliResult};
use crate::scenario::read_columns;

#[derive(Debug, Clone, PartialEq)]
pub struct DemoOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub summary: String,
    pub evidence: Vec<String>,
}

impl DemoOutcome {
    pub fn verdict_line(&self) -> String {
        format!("{} {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.name, self.summary)
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(out: &Path, name: &str, text: &str) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(CliError::io(out))?;
    let path = out.join(name);
    std::fs::write(&path, text).map_err(CliError::io(&path))
}

pub const DEMOS: [&str; 4] = ["wallstrom", "winding", "hamiltonian-scan", "dbr"];

pub fn run_demo(name: &str, out: &Path) -> CliResult<DemoOutcome> {
    match name {
        "wallstrom" => wallstrom(out),
        "winding" => winding(out),
        "hamiltonian-scan" => hamiltonian(out),
        "dbr" => dbr(out),
        other => Err(CliError::Usage(format!("unknown demo '{other}'; expected one of {}", DEMOS.join(", ")))),
    }
}

/// Two packets with identical `{w, v}` and relative phase 0 or π.
pub fn wallstrom(out: &Path) -> CliResult<DemoOutcome> {
    let (setup, h, cfg) = WallstromSetup::canonical()?;
    let r = wallstrom_demo(&setup, &h, &cfg)?;
    let mut csv = String::from("t,linf,components_a,components_b\n");
    for ((t, d), (a, b)) in r.times.iter().zip(&r.linf).zip(&r.components) {
        writeln!(csv, "{},{},{a},{b}", num(*t), num(*d)).unwrap();
    }
    write_csv(out, "wallstrom.csv", &csv)?;
    let pass = r.identical_observational && r.max_before_overlap < 1e-10 && r.max_after_overlap > 0.01;
    Ok(DemoOutcome {
        name: "wallstrom",
        pass,
        summary: format!(
            "same {{w, v}}, relative phase {:.4}: max gap {:.3e} before overlap, {:.3e} after",
            setup.c_d, r.max_before_overlap, r.max_after_overlap
        ),
        evidence: vec![
            format!("identical initial {{w, v}}: {}", r.identical_observational),
            format!("supports first connect at t = {}", r.overlap_time.map_or("never".into(), |t| t.to_string())),
            format!("final L-inf density difference {:.6e}", r.final_difference),
        ],
    })
}

/// Constructed vortices of charge 0, ±1, 2 read back on four loop shapes.
pub fn winding(out: &Path) -> CliResult<DemoOutcome> {
    let g = UniformGrid::cube(2, 128, 10.0, true)?;
    let shapes: Vec<(&str, GridLoop)> = vec![
        ("rectangle", GridLoop::rectangle(&g, [-1.0, -0.7], [1.2, 0.9], &[])?),
        ("circle", GridLoop::circle(&g, [0.0, 0.0], 1.3, &[])?),
        ("diamond", GridLoop::diamond(&g, [0.0, 0.0], 1.6, &[])?),
        ("quadrilateral", GridLoop::polygon(&g, &[[-0.5, -1.5], [1.4, -0.2], [0.3, 1.1], [-1.6, 0.4]], &[])?),
    ];
    let mut csv = String::from("charge,loop,n_l,raw_circulation,residual\n");
    let mut evidence = vec![format!("{:>6} {:>14} {:>4} {:>12}", "charge", "loop", "n_l", "residual")];
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for charge in [0, 1, -1, 2] {
        let s = vortex(&g, charge, 1.0)?;
        for (name, l) in &shapes {
            let r = winding_number(&s, l)?;
            pass &= r.n_l == charge as i64 && r.residual < 0.05 * 2.0 * PI;
            worst = worst.max(r.residual);
            writeln!(csv, "{charge},{name},{},{},{}", r.n_l, num(r.raw_circulation), num(r.residual)).unwrap();
            evidence.push(format!("{charge:>6} {name:>14} {:>4} {:>12.3e}", r.n_l, r.residual));
        }
    }
    write_csv(out, "winding.csv", &csv)?;
    Ok(DemoOutcome {
        name: "winding",
        pass,
        summary: format!("4 charges x {} loops, largest residual {:.3e} rad (bound {:.3e})", shapes.len(), worst, 0.1 * PI),
        evidence,
    })
}

/// Continuity residual of a cubic-phase Gaussian at `(b₂, b₄)`.
pub fn residual_at(n: usize, length: f64, mu: f64, b2: f64, b4: f64) -> CliResult<f64> {
    let g = UniformGrid::periodic_1d(n, length)?;
    let s = cubic_phase_gaussian(&g, 1.0, 0.1, mu)?;
    let mut coeffs = vec![(2, b2)];
    if b4 != 0.0 {
        coeffs.push((4, b4));
    }
    let h = Hamiltonian::free(&g, mu)?.with_coefficients(coeffs)?;
    Ok(continuity_residual(&s, &h)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessEvidence {
    pub argmin: (f64, f64),
    pub at_target: f64,
    pub wrong_b4: f64,
    pub wrong_b2: f64,
    /// `(N, residual at the target)` for successive grid doublings.
    pub convergence: Vec<(usize, f64)>,
}

impl UniquenessEvidence {
    pub fn ratios(&self) -> Vec<f64> {
        self.convergence.windows(2).map(|p| p[0].1 / p[1].1).collect()
    }
}

/// Scans `(b₂, b₄)` on a cubic-phase Gaussian (`L = 20`, `N = 1024`) and
/// measures grid convergence of the residual at `(1/(2μ), 0)`.
pub fn uniqueness_scan(mu: f64, out: Option<&Path>) -> CliResult<UniquenessEvidence> {
    let (n, length) = (1024, 20.0);
    let g = UniformGrid::periodic_1d(n, length)?;
    let s = cubic_phase_gaussian(&g, 1.0, 0.1, mu)?;
    let (b2, b4) = default_scan_axes(mu, 20, 11);
    let scan = hamiltonian_scan(&s, &Hamiltonian::free(&g, mu)?, &b2, &b4)?;
    let (a2, a4, _) = scan.minimum();
    let target = 0.5 / mu;
    let convergence = [256, 512, 1024]
        .par_iter()
        .map(|&k| Ok((k, residual_at(k, length, mu, target, 0.0)?)))
        .collect::<CliResult<Vec<_>>>()?;
    let ev = UniquenessEvidence {
        argmin: (a2, a4),
        at_target: residual_at(n, length, mu, target, 0.0)?,
        wrong_b4: residual_at(n, length, mu, target, 0.1)?,
        wrong_b2: residual_at(n, length, mu, 1.0 / mu, 0.0)?,
        convergence,
    };
    if let Some(out) = out {
        let mut csv = String::from("b2,b4,residual\n");
        for (i, row) in scan.residuals.iter().enumerate() {
            for (j, r) in row.iter().enumerate() {
                writeln!(csv, "{},{},{}", num(scan.b2[i]), num(scan.b4[j]), num(*r)).unwrap();
            }
        }
        write_csv(out, "hamiltonian_scan.csv", &csv)?;
        let mut conv = String::from("n,residual\n");
        for (k, r) in &ev.convergence {
            writeln!(conv, "{k},{}", num(*r)).unwrap();
        }
        write_csv(out, "hamiltonian_convergence.csv", &conv)?;
    }
    Ok(ev)
}

pub fn hamiltonian(out: &Path) -> CliResult<DemoOutcome> {
    let mu = 1.0;
    let ev = uniqueness_scan(mu, Some(out))?;
    let ratios = ev.ratios();
    let pass = (ev.argmin.0 - 0.5 / mu).abs() < 1e-12
        && ev.argmin.1 == 0.0
        && ev.at_target < 1e-6
        && ev.wrong_b4 > 1e-2
        && ev.wrong_b2 > 1e-2
        && ratios.iter().all(|&r| r >= 3.5);
    Ok(DemoOutcome {
        name: "hamiltonian-scan",
        pass,
        summary: format!(
            "minimum at (b2, b4) = ({}, {}), residual {:.3e}; expected ({}, 0)",
            ev.argmin.0,
            ev.argmin.1,
            ev.at_target,
            0.5 / mu
        ),
        evidence: vec![
            format!("residual with b4 = 0.1: {:.3e}", ev.wrong_b4),
            format!("residual with b2 = 1/mu: {:.3e}", ev.wrong_b2),
            format!(
                "refinement N = {}: ratios {}",
                ev.convergence.iter().map(|(k, _)| k.to_string()).collect::<Vec<_>>().join("/"),
                ratios.iter().map(|r| format!("{r:.1}")).collect::<Vec<_>>().join(", ")
            ),
        ],
    })
}

pub fn describe_verdict(v: &ConstancyVerdict, offset: f64) -> String {
    match &v.witness {
        None => format!("PASS(constancy) max |I| {:.3e} over {} pairs", v.max_abs_i, v.pairs_tested),
        Some(w) => format!(
            "FAIL(constancy) witness n={} x0={} x1={} I={:.6e} > (d1-d2)*4/(3n)={:.6e}",
            w.n,
            w.x0 + offset,
            w.x1 + offset,
            w.i_value,
            w.bound
        ),
    }
}

pub fn dbr(out: &Path) -> CliResult<DemoOutcome> {
    let g = UniformGrid::open_1d(256, 12.0)?;
    let constant = certify_constancy(&RealField::constant(&g, 5.0), 6)?;
    let linear = certify_constancy(&RealField::from_fn(&g, |x| x[0]), 6)?;
    let witness_ok = linear.witness.as_ref().is_some_and(|w| w.i_value > w.bound && w.bound > 0.0);

    // sphere pairs against interval pairs on a field varying along one axis
    let g3 = UniformGrid::cube(3, 40, 10.0, false)?;
    let g1 = UniformGrid::open_1d(40, 10.0)?;
    let n = 2;
    let radius = PI / (2.0 * n as f64);
    let (xa, xb) = (-2.5, 2.0);
    let i3 = functional_i(&RealField::from_fn(&g3, |r| r[0]), &BumpFamily::cos3(n, [xa, 0.0, 0.0], [xb, 0.0, 0.0]))?
        / bump_norm_3d(n);
    let i1 = functional_i(&RealField::from_fn(&g1, |r| r[0]), &BumpFamily::sin3(n, xa - radius, xb - radius))? / bump_norm_1d(n);
    let agree = i3.signum() == i1.signum() && (i3 - i1).abs() < 0.15 * (xa - xb).abs();

    let gs = UniformGrid::periodic_1d(1024, 40.0)?;
    let samples = gaussian_mixture_samples(&gs, 20, 2024)?;
    let sqrt = verify_f_equals_sqrt_w(f64::sqrt, &samples)?;
    let power = verify_f_equals_sqrt_w(|w| w.powf(0.6), &samples)?;
    let scaled = verify_f_equals_sqrt_w(|w| 1.1 * w.sqrt(), &samples)?;

    let mut csv = String::from("x,n_linear\n");
    for (i, v) in RealField::from_fn(&g, |x| x[0]).values().iter().enumerate() {
        writeln!(csv, "{},{}", num(g.coordinate(0, i)), num(*v)).unwrap();
    }
    write_csv(out, "dbr_linear.csv", &csv)?;
    let mut csv = String::from("sample,norm_sqrt,norm_pow06,norm_scaled\n");
    for k in 0..samples.len() {
        writeln!(csv, "{k},{},{},{}", num(sqrt.norms[k]), num(power.norms[k]), num(scaled.norms[k])).unwrap();
    }
    write_csv(out, "dbr_sqrt_screening.csv", &csv)?;

    let pass = constant.constant && !linear.constant && witness_ok && agree && sqrt.pass && !power.pass && !scaled.pass;
    Ok(DemoOutcome {
        name: "dbr",
        pass,
        summary: "constant N certified, N(x)=x falsified, only f = sqrt(w) survives screening".into(),
        evidence: vec![
            format!("N(x)=5: {}", describe_verdict(&constant, 0.0)),
            format!("N(x)=x: {}", describe_verdict(&linear, 0.0)),
            format!("3D sphere pair {i3:.4} vs 1D interval pair {i1:.4} (exact {})", xa - xb),
            format!("sqrt(w): max deviation {:.3e} -> {}", sqrt.max_deviation, if sqrt.pass { "accepted" } else { "rejected" }),
            format!("w^0.6: max deviation {:.3e} -> {}", power.max_deviation, if power.pass { "accepted" } else { "rejected" }),
            format!("1.1*sqrt(w): max deviation {:.3e} -> {}", scaled.max_deviation, if scaled.pass { "accepted" } else { "rejected" }),
        ],
    })
}

/// Samples `x, N` read from a file; `x` must be uniformly spaced. Returns the
/// field on a centred grid and the offset back to the file's coordinates.
pub fn load_samples(path: &Path) -> CliResult<(RealField, f64)> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    let rows = read_columns(&text, path)?;
    if rows.len() < fuzzmech_core::grid::MIN_POINTS {
        return Err(CliError::Usage(format!("{}: need at least {} samples", path.display(), fuzzmech_core::grid::MIN_POINTS)));
    }
    let h = (rows[rows.len() - 1].0 - rows[0].0) / (rows.len() - 1) as f64;
    if !(h > 0.0) || rows.iter().enumerate().any(|(i, r)| (r.0 - (rows[0].0 + i as f64 * h)).abs() > 1e-6 * h) {
        return Err(CliError::Usage(format!("{}: x column must be uniformly increasing", path.display())));
    }
    let grid = UniformGrid::open_1d(rows.len(), h * rows.len() as f64)?;
    let offset = rows[0].0 - grid.coordinate(0, 0);
    Ok((RealField::new(grid, rows.iter().map(|r| r.1).collect())?, offset))
}

pub fn dbr_file(path: &Path, n_max: u32) -> CliResult<(ConstancyVerdict, String)> {
    let (f, offset) = load_samples(path)?;
    let v = certify_constancy(&f, n_max)?;
    let line = describe_verdict(&v, offset);
    Ok((v, line))
}

/// Winding number of a stored state around a circle `(cx, cy, r)` in the first two axes.
pub fn winding_file(path: &Path, circle: [f64; 3]) -> CliResult<fuzzmech_core::topology::WindingResult> {
    let c = Checkpoint::read(path)?;
    if c.grid.dim() < 2 {
        return Err(CliError::Usage("winding needs a checkpoint of dimension 2 or 3".into()));
    }
    let s = c.to_wave()?;
    let plane: Vec<usize> = if c.grid.dim() == 3 { vec![c.grid.shape()[2] / 2] } else { vec![] };
    let l = GridLoop::circle(&c.grid, [circle[0], circle[1]], circle[2], &plane)?;
    Ok(winding_number(&s, &l)?)
}
