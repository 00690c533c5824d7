use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn fuzzmech(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzmech")).args(args).current_dir(dir).output().expect("binary runs")
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

const FREE: &str = "\
# free packet
grid.n = 1024
grid.length = 40
particle.mu = 1
initial.kind = gaussian
initial.sigma = 1
evolve.scheme = split-step-spectral
evolve.dt = 1e-3
evolve.steps = 1000
evolve.record_every = 50
output.path = out
";

fn series_column(path: &Path, name: &str) -> Vec<f64> {
    let body = std::fs::read_to_string(path).unwrap();
    let mut lines = body.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn free_run_conserves_norm_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "free.cfg", FREE);
    let o = fuzzmech(&["run", "free.cfg"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    let series = dir.path().join("out/series.csv");
    let norms = series_column(&series, "norm");
    assert_eq!(norms.len(), 21);
    assert!(norms.iter().all(|n| (n - 1.0).abs() < 1e-8));
    let first = std::fs::read(&series).unwrap();
    assert!(String::from_utf8_lossy(&first).contains("# evolve.record_every = 50"));
    assert!(fuzzmech(&["run", "free.cfg"], dir.path()).status.success());
    assert_eq!(first, std::fs::read(&series).unwrap());
}

#[test]
fn config_errors_exit_with_usage_status() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "nomu.cfg", &FREE.replace("particle.mu = 1\n", ""));
    let o = fuzzmech(&["run", "nomu.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("particle.mu"));

    let walls = format!("{FREE}potential.kind = box\npotential.x1 = -8\npotential.x2 = 8\n");
    write(dir.path(), "box.cfg", &walls);
    let o = fuzzmech(&["run", "box.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("scheme incompatible with non-periodic boundary"));

    write(dir.path(), "typo.cfg", &FREE.replace("evolve.dt = 1e-3", "evolve.dt = 1e-3x"));
    let o = fuzzmech(&["run", "typo.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("line 8, column 13"), "{}", text(&o));

    assert_eq!(fuzzmech(&["run", "absent.cfg"], dir.path()).status.code(), Some(2));
    assert_eq!(fuzzmech(&["demo", "nonesuch"], dir.path()).status.code(), Some(2));
    assert_eq!(fuzzmech(&["explode"], dir.path()).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_fuzzmech"))
        .args(["run", "free.cfg"])
        .env("FUZZMECH_THREADS", "many")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn walls_confine_under_crank_nicolson() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{FREE}potential.kind = box\npotential.x1 = -6\npotential.x2 = 6\n")
        .replace("split-step-spectral", "crank-nicolson")
        .replace("grid.n = 1024", "grid.n = 256")
        .replace("evolve.steps = 1000", "evolve.steps = 200");
    write(dir.path(), "box.cfg", &cfg);
    let o = fuzzmech(&["run", "box.cfg"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    let norms = series_column(&dir.path().join("out/series.csv"), "norm");
    assert!(norms.iter().all(|n| (n - 1.0).abs() < 1e-8));
}

const NODAL: &str = "\
grid.n = 512
grid.length = 20
particle.mu = 1
potential.kind = harmonic
potential.omega = 1
initial.kind = eigenstate
initial.index = 0, 1
evolve.scheme = madelung-fd
evolve.dt = 1e-3
evolve.steps = 100
output.path = out
";

#[test]
fn madelung_node_halts_run_but_not_compare() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "nodal.cfg", NODAL);
    let o = fuzzmech(&["run", "nodal.cfg"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("madelung halted at t="), "{}", text(&o));
    let o = fuzzmech(&["compare", "nodal.cfg"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).contains("madelung halted at t="));
}

#[test]
fn compare_passes_on_a_free_packet() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "free.cfg", FREE);
    let o = fuzzmech(&["compare", "free.cfg"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).starts_with("PASS compare"));
    let l2 = series_column(&dir.path().join("out/compare.csv"), "l2");
    assert!(*l2.last().unwrap() < 1e-4);
}

#[test]
fn potential_file_matches_builtin_oscillator() {
    let dir = TempDir::new().unwrap();
    let samples: String = (0..=400).map(|k| {
        let x = -10.0 + 0.05 * k as f64;
        format!("{x} {}\n", 0.5 * x * x)
    }).collect();
    write(dir.path(), "u.txt", &samples);
    let base = FREE
        .replace("grid.n = 1024", "grid.n = 256")
        .replace("grid.length = 40", "grid.length = 16")
        .replace("evolve.steps = 1000", "evolve.steps = 100");
    write(dir.path(), "file.cfg", &format!("{base}potential.kind = file\npotential.path = u.txt\n"));
    write(dir.path(), "osc.cfg", &format!("{base}potential.kind = harmonic\npotential.omega = 1\n").replace("output.path = out", "output.path = osc"));
    assert!(fuzzmech(&["run", "file.cfg"], dir.path()).status.success());
    assert!(fuzzmech(&["run", "osc.cfg"], dir.path()).status.success());
    let a = series_column(&dir.path().join("out/series.csv"), "energy");
    let b = series_column(&dir.path().join("osc/series.csv"), "energy");
    // linear interpolation of x²/2 on a 0.05 mesh overshoots by at most h²/8
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-3), "{a:?} vs {b:?}");
}

#[test]
fn winding_reads_checkpointed_vortex() {
    let dir = TempDir::new().unwrap();
    let cfg = "\
grid.dim = 2
grid.n = 96
grid.length = 10
particle.mu = 1
initial.kind = vortex
initial.charge = -1
evolve.scheme = split-step-spectral
evolve.dt = 0.01
evolve.steps = 10
output.path = snaps
output.formats = checkpoint
";
    write(dir.path(), "vortex.cfg", cfg);
    let o = fuzzmech(&["run", "vortex.cfg"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(!dir.path().join("snaps/series.csv").exists());
    let o = fuzzmech(&["winding", "--checkpoint", "snaps/checkpoint_000010.fzm", "--loop", "0,0,1.5"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).starts_with("n_l = -1"), "{}", text(&o));
    let o = fuzzmech(&["winding", "--checkpoint", "snaps/checkpoint_000010.fzm", "--loop", "-3,0,0.8"], dir.path());
    assert!(text(&o).starts_with("n_l = 0"), "{}", text(&o));
    write(dir.path(), "junk.fzm", "FZM1 but not really");
    assert_eq!(fuzzmech(&["winding", "--checkpoint", "junk.fzm", "--loop", "0,0,1"], dir.path()).status.code(), Some(2));
}

#[test]
fn dbr_reads_sampled_columns() {
    let dir = TempDir::new().unwrap();
    let column = |f: fn(f64) -> f64| -> String {
        std::iter::once("x,N\n".to_string())
            .chain((0..200).map(|k| {
                let x = 3.0 + 0.06 * k as f64;
                format!("{x},{}\n", f(x))
            }))
            .collect()
    };
    write(dir.path(), "flat.csv", &column(|_| 5.0));
    write(dir.path(), "ramp.csv", &column(|x| x));
    let o = fuzzmech(&["dbr", "--input", "flat.csv"], dir.path());
    assert!(o.status.success());
    assert!(text(&o).starts_with("PASS(constancy)"), "{}", text(&o));
    let o = fuzzmech(&["dbr", "--input", "ramp.csv", "--n-max", "3"], dir.path());
    assert!(o.status.success());
    let out = text(&o);
    assert!(out.starts_with("FAIL(constancy) witness n=1"), "{out}");
    // witness placements are reported in the file's own coordinates
    let x0: f64 = out.split("x0=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!((3.0..15.0).contains(&x0), "{out}");
    write(dir.path(), "ragged.csv", "0,1\n0.1,1\n0.3,1\n0.4,1\n0.5,1\n0.6,1\n0.7,1\n0.8,1\n0.9,1\n");
    assert_eq!(fuzzmech(&["dbr", "--input", "ragged.csv"], dir.path()).status.code(), Some(2));
}

#[test]
fn demos_write_plot_data() {
    let dir = TempDir::new().unwrap();
    let o = fuzzmech(&["demo", "winding", "--out", "plots"], dir.path());
    assert!(o.status.success(), "{}", text(&o));
    assert!(text(&o).starts_with("PASS winding"));
    let table = std::fs::read_to_string(dir.path().join("plots/winding.csv")).unwrap();
    assert_eq!(table.lines().count(), 17);
}
