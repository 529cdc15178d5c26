use approx::assert_abs_diff_eq;

use super::*;
use crate::models::EffectiveParams;
use crate::space::{fidelity_pure, phi_plus};

#[test]
fn first_round_steady_state_matches_exact_projection() {
    let p = ProtocolParams::new(
        EffectiveParams::symmetric(1.0, 1.0).unwrap(),
        2,
        Mode::SteadyState,
    );
    let r = purify(&p).unwrap();
    let first = &r.rounds[0];
    assert!(first.converged);
    assert_abs_diff_eq!(first.closed_fidelity, 0.96466, epsilon = 5e-6);
    assert_abs_diff_eq!(first.closed_success, 0.4910069, epsilon = 5e-7);
    assert_abs_diff_eq!(first.probability, 0.509158, epsilon = 1e-4);
    assert_abs_diff_eq!(first.fidelity, first.oracle_fidelity, epsilon = 1e-4);
    assert!(first.lambda.is_some());
    assert!(r.monotone);
    assert!(r.rounds[1].fidelity > first.fidelity);
    assert!(r.max_trace_drift < 1e-8);
}

#[test]
fn undamped_pulse_probability() {
    let tau = 1.2;
    let g = 0.6;
    let mode = Mode::Timed { tau, damped: false };
    let p = ProtocolParams::new(EffectiveParams::symmetric(g, 1.0).unwrap(), 1, mode);
    let r = purify(&p).unwrap();
    let two_alpha = g * tau;
    assert_abs_diff_eq!(
        r.rounds[0].probability,
        0.5 + 0.5 * (-two_alpha * two_alpha).exp(),
        epsilon = 1e-6
    );
}

#[test]
fn variant_targets_phi_plus() {
    let mode = Mode::Timed {
        tau: 2.0,
        damped: true,
    };
    let p = ProtocolParams::new(EffectiveParams::opposite_phase(1.0, 1.0).unwrap(), 2, mode);
    let r = purify(&p).unwrap();
    assert!(r.opposite_phase);
    let last = r.rounds.last().unwrap();
    assert_abs_diff_eq!(
        fidelity_pure(&phi_plus(), &last.state).unwrap(),
        last.fidelity,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(last.fidelity, last.oracle_fidelity, epsilon = 1e-5);
    assert!(r.monotone);
}

#[test]
fn detector_columns_follow_model() {
    let mode = Mode::Timed {
        tau: 1.0,
        damped: true,
    };
    let mut p = ProtocolParams::new(EffectiveParams::symmetric(0.8, 1.0).unwrap(), 1, mode);
    p.detector_trials = 4000;
    p.seed = 7;
    let a = purify(&p).unwrap();
    let b = purify(&p).unwrap();
    let (ra, rb) = (&a.rounds[0], &b.rounds[0]);
    assert_eq!(ra.sampled_accept, rb.sampled_accept);
    let sampled = ra.sampled_accept.unwrap();
    assert!(
        (sampled - ra.detector_accept).abs() < 0.03,
        "{sampled} vs {}",
        ra.detector_accept
    );
    // a window longer than 1/κ sees more than the instantaneous photon number
    assert!(ra.detector_accept <= ra.probability + 1e-9);
}

#[test]
fn bad_parameters_are_rejected() {
    let e = EffectiveParams::symmetric(1.0, 1.0).unwrap();
    assert!(purify(&ProtocolParams::new(e, 0, Mode::SteadyState)).is_err());
    let p = ProtocolParams::new(
        e,
        1,
        Mode::Timed {
            tau: -1.0,
            damped: true,
        },
    );
    assert!(purify(&p).is_err());
}
