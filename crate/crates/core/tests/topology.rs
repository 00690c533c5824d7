use num_complex::Complex64;

use fuzzmech_core::topology::{label_components, wallstrom_demo, winding_number, GridLoop, WallstromSetup};
use fuzzmech_core::states::{two_gaussian, vortex};
use fuzzmech_core::{ComplexField, Error, UniformGrid, WaveState};

fn loops(g: &UniformGrid, center: [f64; 2]) -> Vec<GridLoop> {
    let [cx, cy] = center;
    vec![
        GridLoop::rectangle(g, [cx - 1.0, cy - 0.7], [cx + 1.2, cy + 0.9], &[]).unwrap(),
        GridLoop::circle(g, center, 1.3, &[]).unwrap(),
        GridLoop::diamond(g, center, 1.6, &[]).unwrap(),
        GridLoop::polygon(g, &[[cx - 0.5, cy - 1.5], [cx + 1.4, cy - 0.2], [cx + 0.3, cy + 1.1], [cx - 1.6, cy + 0.4]], &[])
            .unwrap(),
        GridLoop::circle(g, center, 0.5, &[]).unwrap(),
    ]
}

#[test]
fn charges_are_read_back_on_every_loop_shape() {
    let g = UniformGrid::cube(2, 128, 10.0, true).unwrap();
    for charge in [0, 1, -1, 2, -2] {
        let s = vortex(&g, charge, 1.0).unwrap();
        for l in loops(&g, [0.0, 0.0]) {
            let r = winding_number(&s, &l).unwrap();
            assert_eq!(r.n_l, charge as i64);
            assert!(r.residual < 0.05 * 2.0 * std::f64::consts::PI, "charge {charge}: residual {}", r.residual);
        }
        // a loop not enclosing the core winds zero times
        let aside = GridLoop::circle(&g, [2.5, 0.0], 0.8, &[]).unwrap();
        assert_eq!(winding_number(&s, &aside).unwrap().n_l, 0);
    }
}

#[test]
fn windings_add_over_enclosed_vortices() {
    let g = UniformGrid::cube(2, 160, 12.0, true).unwrap();
    let eta = ComplexField::from_fn(&g, |x| {
        let a = Complex64::new(x[0] - 1.5, x[1]);
        let b = Complex64::new(x[0] + 1.5, x[1]);
        a * b * (-(x[0] * x[0] + x[1] * x[1]) / 8.0).exp()
    });
    let s = WaveState::normalized(eta, 1.0).unwrap();
    let both = GridLoop::rectangle(&g, [-3.0, -2.0], [3.0, 2.0], &[]).unwrap();
    assert_eq!(winding_number(&s, &both).unwrap().n_l, 2);
    let one = GridLoop::circle(&g, [1.5, 0.0], 1.0, &[]).unwrap();
    assert_eq!(winding_number(&s, &one).unwrap().n_l, 1);
}

#[test]
fn p_orbital_section_carries_unit_charge() {
    // (x ± iy)·e^{−r/2}: the m = ±1 orbital's nodal line is the z axis
    let g = UniformGrid::cube(3, 48, 16.0, false).unwrap();
    for sign in [1.0, -1.0] {
        let eta = ComplexField::from_fn(&g, |x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            Complex64::new(x[0], sign * x[1]) * (-r / 2.0).exp()
        });
        let s = WaveState::normalized(eta, 1.0).unwrap();
        for z in [10, 24, 37] {
            let l = GridLoop::circle(&g, [0.0, 0.0], 2.0, &[z]).unwrap();
            assert_eq!(winding_number(&s, &l).unwrap().n_l, sign as i64);
        }
    }
}

#[test]
fn loop_through_a_node_is_rejected() {
    let g = UniformGrid::cube(2, 64, 8.0, true).unwrap();
    let s = vortex(&g, 1, 1.0).unwrap();
    let through = GridLoop::rectangle(&g, [0.0, 0.0], [1.0, 1.0], &[]).unwrap();
    assert!(matches!(winding_number(&s, &through), Err(Error::LoopTouchesNode { .. })));
}

#[test]
fn separated_packets_split_the_mass_evenly() {
    let g = UniformGrid::periodic_1d(1024, 60.0).unwrap();
    let s = two_gaussian(&g, 20.0, 1.0, 0.0).unwrap();
    let labels = label_components(s.density());
    assert_eq!(labels.count, 2);
    for m in &labels.masses {
        assert!((m - 0.5).abs() < 1e-8);
    }
    assert_eq!(label_components(&s.density().clone()), labels);
}

#[test]
fn phase_constant_is_invisible_until_the_packets_meet() {
    let (setup, h, cfg) = WallstromSetup::canonical().unwrap();
    let rep = wallstrom_demo(&setup, &h, &cfg).unwrap();
    assert!(rep.identical_observational);
    let t = rep.overlap_time.expect("packets overlap within the run");
    assert!(t > 0.0);
    assert!(rep.max_before_overlap < 1e-10, "{}", rep.max_before_overlap);
    assert!(rep.max_after_overlap > 0.01, "{}", rep.max_after_overlap);
}
