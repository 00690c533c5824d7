use fuzzmech_core::dynamics::{
    continuity_residual, default_scan_axes, hamiltonian_scan, mixture_weight_drift, orthogonality_preservation_check,
    Hamiltonian,
};
use fuzzmech_core::states::{cubic_phase_gaussian, gaussian, harmonic_eigenstate};
use fuzzmech_core::{EvolutionConfig, Scheme, UniformGrid};

#[test]
fn residual_vanishes_only_for_the_schrodinger_kinetic_term() {
    for mu in [1.0, 3.0] {
        let g = UniformGrid::periodic_1d(1024, 20.0).unwrap();
        let s = cubic_phase_gaussian(&g, 1.0, 0.1, mu).unwrap();
        let h = Hamiltonian::free(&g, mu).unwrap();
        assert!(continuity_residual(&s, &h).unwrap() < 1e-6);
        let (b2, b4) = default_scan_axes(mu, 9, 5);
        let scan = hamiltonian_scan(&s, &h, &b2, &b4).unwrap();
        let (best2, best4, r) = scan.minimum();
        assert!((best2 - 0.5 / mu).abs() < 1e-15 && best4 == 0.0 && r < 1e-6, "mu={mu}: {:?}", scan.minimum());
    }
}

#[test]
fn residual_converges_at_fourth_order() {
    let r: Vec<f64> = [256, 512, 1024]
        .iter()
        .map(|&n| {
            let g = UniformGrid::periodic_1d(n, 20.0).unwrap();
            let s = cubic_phase_gaussian(&g, 1.0, 0.1, 1.0).unwrap();
            continuity_residual(&s, &Hamiltonian::free(&g, 1.0).unwrap()).unwrap()
        })
        .collect();
    assert!(r[0] / r[1] > 12.0 && r[1] / r[2] > 12.0, "{r:?}");
}

#[test]
fn open_grid_residual_uses_dirichlet_kinetic_term() {
    let g = UniformGrid::open_1d(512, 20.0).unwrap();
    let s = cubic_phase_gaussian(&g, 1.0, 0.1, 1.0).unwrap();
    let h = Hamiltonian::free(&g, 1.0).unwrap();
    assert!(continuity_residual(&s, &h).unwrap() < 1e-5);
    let wrong = h.with_coefficients(vec![(2, 0.5), (4, 0.1)]).unwrap();
    assert!(continuity_residual(&s, &wrong).unwrap() > 1e-2);
}

#[test]
fn inner_products_survive_evolution() {
    let g = UniformGrid::periodic_1d(256, 30.0).unwrap();
    let h = Hamiltonian::harmonic(&g, 1.0, 0.5).unwrap();
    let states = vec![
        gaussian(&g, &[-2.0], 1.0, &[0.5], 1.0).unwrap(),
        gaussian(&g, &[1.0], 0.7, &[-1.0], 1.0).unwrap(),
        cubic_phase_gaussian(&g, 1.2, 0.05, 1.0).unwrap(),
        harmonic_eigenstate(&g, &[1], 1.0, 0.5).unwrap(),
    ];
    for scheme in [Scheme::SplitStep, Scheme::CrankNicolson, Scheme::Liouville] {
        let rep = orthogonality_preservation_check(&states, &h, &EvolutionConfig::new(scheme, 0.01, 200)).unwrap();
        assert!(rep.max_drift < 1e-8, "{scheme}: {}", rep.max_drift);
        assert!(rep.max_modulus_drift <= rep.max_drift + 1e-15);
    }
}

#[test]
fn orthogonal_mixture_keeps_its_weights() {
    let g = UniformGrid::periodic_1d(128, 20.0).unwrap();
    // oscillator eigenstates are orthogonal but spread under the free Hamiltonian
    let h = Hamiltonian::free(&g, 1.0).unwrap();
    let states: Vec<_> = (0..3).map(|k| harmonic_eigenstate(&g, &[k], 1.0, 1.0).unwrap()).collect();
    let rep = mixture_weight_drift(&states, &[0.5, 0.3, 0.2], &h, &EvolutionConfig::new(Scheme::Liouville, 0.01, 100))
        .unwrap();
    for (p, q) in rep.initial.iter().zip([0.5, 0.3, 0.2]) {
        assert!((p - q).abs() < 1e-10);
    }
    assert!(rep.max_drift < 1e-8, "{}", rep.max_drift);
}
