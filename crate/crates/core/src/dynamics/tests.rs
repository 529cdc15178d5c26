use approx::assert_abs_diff_eq;
use num_complex::Complex64;

use super::*;
use crate::error::Error;
use crate::models::{
    build_interaction_hamiltonian, lindblad_rhs, DrivenHamiltonian, EffectiveParams,
};
use crate::space::{
    annihilation, coherent_state, default_n_max, fidelity_pure, fock, number, partial_trace,
    phi_plus, psi_plus, qubit_excited, qubit_ground, tensor, trace_distance, vacuum, DensityState,
    Operator, PureState, SpaceSignature,
};

fn gg0(n_max: usize) -> PureState {
    tensor(&[qubit_ground(), qubit_ground(), vacuum(n_max)]).unwrap()
}

#[test]
fn zero_hamiltonian_leaves_state_unchanged() {
    let sig = SpaceSignature::atoms_field(3);
    let psi = tensor(&[qubit_excited(), qubit_ground(), fock(2, 3).unwrap()]).unwrap();
    let h = DrivenHamiltonian::from(Operator::zeros(&sig));
    let cfg = IntegratorConfig {
        sample_stride: 1,
        ..IntegratorConfig::until(2.0)
    };
    let r = evolve_pure(&h, &psi, &cfg).unwrap();
    for s in &r.states {
        assert_eq!(s, &psi);
    }
}

#[test]
fn free_field_only_changes_phase() {
    let n_max = 4;
    let h = DrivenHamiltonian::from(number(n_max).unwrap().scale_real(1.7));
    let one = fock(1, n_max).unwrap();
    let r = evolve_pure(&h, &one, &IntegratorConfig::until(3.0)).unwrap();
    let pops: Vec<f64> = r
        .final_state
        .amplitudes()
        .iter()
        .map(|z| z.norm_sqr())
        .collect();
    assert_abs_diff_eq!(pops[1], 1.0, epsilon = 1e-10);
    let phase = r.final_state.amplitudes()[1];
    assert_abs_diff_eq!(
        (phase - Complex64::from_polar(1.0, -1.7 * 3.0)).norm(),
        0.0,
        epsilon = 1e-7
    );
}

#[test]
fn unitary_evolution_matches_closed_form() {
    let p = EffectiveParams::symmetric(1.0, 1.0).unwrap();
    let tau = 2.0;
    let n_max = default_n_max(p.g_eff * tau);
    let h = build_interaction_hamiltonian(&p, n_max).unwrap();
    let r = evolve_pure(
        &DrivenHamiltonian::from(h.clone()),
        &gg0(n_max),
        &IntegratorConfig::until(tau),
    )
    .unwrap();
    let exact = closed_form_evolved_state(&p, tau, n_max).unwrap();
    let f = r.final_state.inner(&exact).unwrap().norm_sqr();
    assert!(f >= 1.0 - 1e-6, "fidelity {f}");
    // independent path through the eigendecomposition
    let e = propagate_exact(&h, &gg0(n_max), &[tau]).unwrap();
    assert!(e[0].inner(&exact).unwrap().norm_sqr() >= 1.0 - 1e-9);
}

#[test]
fn halving_the_step_barely_moves_fidelity() {
    let p = EffectiveParams::symmetric(1.0, 1.0).unwrap();
    let n_max = 30;
    let h = DrivenHamiltonian::from(build_interaction_hamiltonian(&p, n_max).unwrap());
    let exact = closed_form_evolved_state(&p, 2.0, n_max).unwrap();
    let run = |dt: f64| {
        let cfg = IntegratorConfig {
            dt: Some(dt),
            ..IntegratorConfig::until(2.0)
        };
        evolve_pure(&h, &gg0(n_max), &cfg)
            .unwrap()
            .final_state
            .inner(&exact)
            .unwrap()
            .norm_sqr()
    };
    assert!((run(0.004) - run(0.002)).abs() < 1e-7);
}

#[test]
fn oversized_step_is_rejected() {
    let p = EffectiveParams::symmetric(1.0, 1.0).unwrap();
    let h = DrivenHamiltonian::from(build_interaction_hamiltonian(&p, 10).unwrap());
    let cfg = IntegratorConfig {
        dt: Some(0.5),
        ..IntegratorConfig::until(1.0)
    };
    assert!(matches!(
        evolve_pure(&h, &gg0(10), &cfg),
        Err(Error::StepSize { .. })
    ));
}

#[test]
fn generator_matches_dense_reference() {
    let p = EffectiveParams::symmetric(0.8, 1.0).unwrap();
    let n_max = 6;
    let h = build_interaction_hamiltonian(&p, n_max).unwrap();
    let psi = closed_form_evolved_state(&p, 0.9, 6).ok();
    let rho = match psi {
        Some(s) => s.projector(),
        None => gg0(n_max).projector(),
    };
    let gen = LindbladGenerator::new(&h, 1.3).unwrap();
    let dense = lindblad_rhs(&h, 1.3, &rho).unwrap();
    assert!((gen.apply(rho.matrix()) - dense).norm() < 1e-12);
}

#[test]
fn lossless_master_equation_matches_schrodinger() {
    let p = EffectiveParams::symmetric(1.0, 1.0).unwrap();
    let n_max = 12;
    let h = build_interaction_hamiltonian(&p, n_max).unwrap();
    let cfg = IntegratorConfig {
        dt: Some(0.002),
        ..IntegratorConfig::until(1.0)
    };
    let pure = evolve_pure(&DrivenHamiltonian::from(h.clone()), &gg0(n_max), &cfg).unwrap();
    let mixed = evolve_master(&h, 0.0, &gg0(n_max).projector(), &cfg).unwrap();
    let d = trace_distance(&pure.final_state.projector(), &mixed.final_state).unwrap();
    assert!(d < 1e-8, "distance {d}");
}

#[test]
fn single_photon_decays_exponentially() {
    let n_max = 3;
    let sig = SpaceSignature::field(n_max);
    let kappa = 0.8;
    let cfg = IntegratorConfig {
        sample_stride: 50,
        ..IntegratorConfig::until(4.0)
    };
    let r = evolve_master(
        &Operator::zeros(&sig),
        kappa,
        &fock(1, n_max).unwrap().projector(),
        &cfg,
    )
    .unwrap();
    for (t, s) in r.times.iter().zip(&r.states) {
        assert_abs_diff_eq!(s.matrix()[(1, 1)].re, (-kappa * t).exp(), epsilon = 1e-6);
    }
    assert!(r.diagnostics.trace_drift < 1e-8);
    assert!(r.diagnostics.positivity_margin >= -1e-8);
}

#[test]
fn driven_cavity_reaches_coherent_state() {
    let n_max = 20;
    let a = annihilation(n_max).unwrap();
    let lambda = 0.4;
    let kappa = 1.0;
    let h = (&a + &a.adjoint()).scale_real(lambda);
    let cfg = IntegratorConfig {
        steady_tol: 1e-9,
        ..IntegratorConfig::default()
    };
    let r = find_steady_state(&h, kappa, &vacuum(n_max).projector(), &cfg).unwrap();
    assert!(r.converged);
    let amp = r.state.expectation(&a).unwrap();
    let expected = Complex64::new(0.0, -2.0 * lambda / kappa);
    assert_abs_diff_eq!((amp - expected).norm(), 0.0, epsilon = 1e-4);
    let coh = coherent_state(expected, n_max).unwrap().state;
    assert!(fidelity_pure(&coh, &r.state).unwrap() > 1.0 - 1e-6);
}

#[test]
fn pure_decay_keeps_atoms() {
    let n_max = 4;
    let sig = SpaceSignature::atoms_field(n_max);
    let atoms = psi_plus().projector();
    let field = DensityState::mixture(&[
        (0.5, &fock(0, n_max).unwrap().projector()),
        (0.3, &fock(2, n_max).unwrap().projector()),
        (0.2, &fock(4, n_max).unwrap().projector()),
    ])
    .unwrap();
    let rho0 = tensor(&[atoms.clone(), field]).unwrap();
    let r = find_steady_state(
        &Operator::zeros(&sig),
        1.0,
        &rho0,
        &IntegratorConfig::default(),
    )
    .unwrap();
    assert!(r.converged);
    let expected = tensor(&[atoms, vacuum(n_max).projector()]).unwrap();
    assert!(trace_distance(&r.state, &expected).unwrap() < 1e-7);
}

#[test]
fn dark_state_is_stationary() {
    let p = EffectiveParams::symmetric(1.0, 1.0).unwrap();
    let n_max = 30;
    let h = build_interaction_hamiltonian(&p, n_max).unwrap();
    let rho0 = tensor(&[psi_plus(), vacuum(n_max)]).unwrap().projector();
    let cfg = IntegratorConfig {
        sample_stride: 200,
        ..IntegratorConfig::until(5.0)
    };
    let r = evolve_master(&h, 1.0, &rho0, &cfg).unwrap();
    assert!(r.states.len() > 3);
    for s in &r.states {
        assert!(trace_distance(s, &rho0).unwrap() < 1e-8);
    }
}

fn steady_check(p: &EffectiveParams) {
    let n_max = default_n_max(2.0 * p.alpha_tilde());
    let h = build_interaction_hamiltonian(p, n_max).unwrap();
    let cfg = IntegratorConfig::default().adaptive(1e-10, 1e-12);
    let r = find_steady_state(&h, p.kappa, &gg0(n_max).projector(), &cfg).unwrap();
    assert!(r.converged, "residual {}", r.residual);
    let exact = analytic_steady_state(p, n_max).unwrap();
    let d = trace_distance(&r.state, &exact).unwrap();
    assert!(d <= 1e-3, "trace distance {d}");
    let dark = if p.is_opposite_phase() {
        phi_plus()
    } else {
        psi_plus()
    };
    let atoms = partial_trace(&r.state, &[0, 1]).unwrap();
    assert_abs_diff_eq!(fidelity_pure(&dark, &atoms).unwrap(), 0.5, epsilon = 1e-3);
}

#[test]
fn steady_state_matches_analytic_mixture() {
    steady_check(&EffectiveParams::symmetric(1.0, 1.0).unwrap());
}

#[test]
fn variant_steady_state_matches_analytic_mixture() {
    steady_check(&EffectiveParams::opposite_phase(1.0, 1.0).unwrap());
}
