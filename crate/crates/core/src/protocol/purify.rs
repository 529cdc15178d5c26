use serde::{Deserialize, Serialize};

use super::bell::{chsh_max, family_lambda};
use super::closed_form::{
    closed_form_fidelity, closed_form_success, oracle_fidelity, oracle_round_probability,
    oracle_success,
};
use super::detector::{cell_rng, sample_clicks, DetectorModel, Verdict};
use super::projection::project_vacuum;
use crate::dynamics::{evolve_with, steady_state_with, IntegratorConfig, LindbladGenerator};
use crate::error::{Error, Result};
use crate::models::{build_interaction_hamiltonian_with_couplings, EffectiveParams};
use crate::space::{
    default_n_max, fidelity_pure, phi_plus, psi_plus, qubit_ground, sigma_x_product_basis, tensor,
    vacuum, DensityState, PureState,
};

/// How long the lasers act before each no-photon measurement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Mode {
    /// Wait for the steady state of the damped dynamics.
    SteadyState,
    /// Evolve for `tau`, then switch the lasers off. With `damped = false`
    /// cavity loss is neglected during the pulse.
    Timed { tau: f64, damped: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolParams {
    pub effective: EffectiveParams,
    pub rounds: u32,
    pub mode: Mode,
    pub detector: DetectorModel,
    pub seed: u64,
    /// Field cutoff; `None` applies the truncation rule to the largest pointer amplitude.
    pub n_max: Option<usize>,
    pub integrator: IntegratorConfig,
    /// Monte Carlo detector samples per round; 0 disables sampling.
    pub detector_trials: u32,
}

impl ProtocolParams {
    pub fn new(effective: EffectiveParams, rounds: u32, mode: Mode) -> Self {
        Self {
            effective,
            rounds,
            mode,
            detector: DetectorModel::default(),
            seed: 0,
            n_max: None,
            integrator: default_protocol_integrator(),
            detector_trials: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.effective.validate()?;
        self.detector.validate()?;
        self.integrator.validate()?;
        if self.rounds < 1 {
            return Err(Error::InvalidArgument(
                "at least one round is required".into(),
            ));
        }
        if let Mode::Timed { tau, .. } = self.mode {
            if !(tau > 0.0 && tau.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "tau must be > 0, got {tau}"
                )));
            }
        }
        Ok(())
    }
}

/// Adaptive stepping keeps long steady-state searches affordable.
pub fn default_protocol_integrator() -> IntegratorConfig {
    IntegratorConfig::default().adaptive(1e-10, 1e-12)
}

/// Field amplitude of the brightest sector, `max |Σ g_j s_j|` scaled by the mode.
pub fn pointer_amplitude(couplings: [f64; 2], kappa: f64, mode: Mode) -> f64 {
    let x = couplings[0].abs() + couplings[1].abs();
    match mode {
        Mode::SteadyState => x / kappa,
        Mode::Timed { tau, damped: false } => x * tau / 2.0,
        Mode::Timed { tau, damped: true } => x / kappa * (1.0 - (-kappa * tau / 2.0).exp()),
    }
}

#[derive(Clone, Debug)]
pub struct RoundRecord {
    pub round: u32,
    /// No-photon probability of this round.
    pub probability: f64,
    pub cumulative_probability: f64,
    /// Projected atomic state.
    pub state: DensityState,
    /// Overlap with the target Bell state.
    pub fidelity: f64,
    /// λ when the state lies in the λ family, otherwise `None` (off-family).
    pub lambda: Option<f64>,
    pub family_distance: f64,
    pub s_max: f64,
    pub closed_fidelity: f64,
    pub closed_success: f64,
    pub oracle_fidelity: f64,
    pub oracle_probability: f64,
    pub oracle_success: f64,
    /// Residual `‖dρ/dt‖₁` of the steady state (steady-state mode only).
    pub steady_residual: Option<f64>,
    pub converged: bool,
    /// Zero-click probability under the detector model, from the pre-measurement branch weights.
    pub detector_accept: f64,
    /// Fraction of sampled detector runs with zero clicks.
    pub sampled_accept: Option<f64>,
}

impl RoundRecord {
    /// Numeric fidelity minus the reference closed form.
    pub fn closed_gap(&self) -> f64 {
        self.fidelity - self.closed_fidelity
    }

    /// Numeric fidelity minus the exact-projection oracle.
    pub fn oracle_gap(&self) -> f64 {
        self.fidelity - self.oracle_fidelity
    }
}

#[derive(Clone, Debug)]
pub struct PurificationReport {
    pub rounds: Vec<RoundRecord>,
    /// `true` when the target is Φ⁺ (opposite coupling signs).
    pub opposite_phase: bool,
    /// `|α̃|` entering the closed forms: half the brightest pointer amplitude.
    pub alpha_tilde: f64,
    pub n_max: usize,
    /// Fidelity rose strictly each round until it came within 1e-12 of one.
    pub monotone: bool,
    pub max_trace_drift: f64,
    pub min_positivity: f64,
}

/// Weight and mean photon number of each σx product sector of an atoms⊗field state.
pub(crate) fn sector_statistics(rho: &DensityState) -> Vec<(f64, f64)> {
    let df = rho.signature().n_max() + 1;
    let m = rho.matrix();
    sigma_x_product_basis()
        .into_iter()
        .map(|(_, s)| {
            let v = s.amplitudes();
            let mut w = 0.0;
            let mut n_mean = 0.0;
            for n in 0..df {
                let mut acc = num_complex::Complex64::new(0.0, 0.0);
                for a in 0..4 {
                    for b in 0..4 {
                        acc += v[a].conj() * m[(a * df + n, b * df + n)] * v[b];
                    }
                }
                w += acc.re;
                n_mean += n as f64 * acc.re;
            }
            (w, if w > 0.0 { n_mean / w } else { 0.0 })
        })
        .collect()
}

pub(crate) struct RoundOutcome {
    pub pre_measurement: DensityState,
    pub atoms: DensityState,
    pub probability: f64,
    pub residual: Option<f64>,
    pub converged: bool,
    pub trace_drift: f64,
    pub positivity: f64,
}

/// One laser period and no-photon projection from `atoms ⊗ |0⟩`.
pub(crate) fn run_round(
    gen: &LindbladGenerator,
    gen_lossless: Option<&LindbladGenerator>,
    atoms: &DensityState,
    n_max: usize,
    mode: Mode,
    cfg: &IntegratorConfig,
) -> Result<RoundOutcome> {
    let rho0 = tensor(&[atoms.clone(), vacuum(n_max).projector()])?;
    let (state, residual, converged, diag) = match mode {
        Mode::SteadyState => {
            let r = steady_state_with(gen, &rho0, cfg)?;
            (r.state, Some(r.residual), r.converged, r.diagnostics)
        }
        Mode::Timed { tau, damped } => {
            let g = if damped {
                gen
            } else {
                gen_lossless.expect("lossless generator for undamped pulses")
            };
            let cfg = IntegratorConfig {
                t_final: tau,
                sample_stride: 0,
                ..cfg.clone()
            };
            let r = evolve_with(g, &rho0, &cfg)?;
            (r.final_state, None, true, r.diagnostics)
        }
    };
    let (projected, probability) = project_vacuum(&state)?;
    Ok(RoundOutcome {
        pre_measurement: state,
        atoms: projected,
        probability,
        residual,
        converged,
        trace_drift: diag.trace_drift,
        positivity: diag.positivity_margin,
    })
}

pub(crate) fn ground_atoms() -> DensityState {
    tensor(&[qubit_ground(), qubit_ground()])
        .expect("two qubits")
        .projector()
}

pub(crate) fn target_state(opposite_phase: bool) -> PureState {
    if opposite_phase {
        phi_plus()
    } else {
        psi_plus()
    }
}

pub(crate) struct Generators {
    pub damped: LindbladGenerator,
    pub lossless: Option<LindbladGenerator>,
    pub n_max: usize,
}

pub(crate) fn generators(
    couplings: [f64; 2],
    kappa: f64,
    mode: Mode,
    n_max: Option<usize>,
) -> Result<Generators> {
    let n_max = n_max.unwrap_or_else(|| default_n_max(pointer_amplitude(couplings, kappa, mode)));
    let h = build_interaction_hamiltonian_with_couplings(couplings, n_max)?;
    let damped = LindbladGenerator::new(&h, kappa)?;
    let lossless = match mode {
        Mode::Timed { damped: false, .. } => Some(LindbladGenerator::new(&h, 0.0)?),
        _ => None,
    };
    Ok(Generators {
        damped,
        lossless,
        n_max,
    })
}

/// Repeats {laser period from `ρ_at ⊗ |0⟩`, no-photon projection} `rounds`
/// times from `|gg⟩` and tabulates the numeric results next to the closed forms.
pub fn purify(p: &ProtocolParams) -> Result<PurificationReport> {
    p.validate()?;
    let e = &p.effective;
    let gens = generators(e.couplings(), e.kappa, p.mode, p.n_max)?;
    let alpha = pointer_amplitude([e.g_eff, e.g_eff], e.kappa, p.mode) / 2.0;
    let target = target_state(e.is_opposite_phase());

    let mut atoms = ground_atoms();
    let mut cumulative = 1.0;
    let mut rounds = Vec::with_capacity(p.rounds as usize);
    let mut max_drift: f64 = 0.0;
    let mut min_pos = f64::INFINITY;
    for m in 1..=p.rounds {
        let out = run_round(
            &gens.damped,
            gens.lossless.as_ref(),
            &atoms,
            gens.n_max,
            p.mode,
            &p.integrator,
        )?;
        max_drift = max_drift.max(out.trace_drift);
        min_pos = min_pos.min(out.positivity);
        cumulative *= out.probability;

        let sectors = sector_statistics(&out.pre_measurement);
        let accept_of = |n: f64| (-p.detector.mean_clicks_for_photons(n, e.kappa)).exp();
        let detector_accept: f64 = sectors.iter().map(|&(w, n)| w * accept_of(n)).sum();
        let sampled_accept = (p.detector_trials > 0).then(|| {
            use rand::Rng;
            let mut rng = cell_rng(p.seed, m as u64);
            let total: f64 = sectors.iter().map(|s| s.0).sum();
            let mut accepted = 0u32;
            for _ in 0..p.detector_trials {
                let mut u = rng.gen::<f64>() * total;
                let mut pick = sectors.len() - 1;
                for (k, s) in sectors.iter().enumerate() {
                    if u < s.0 {
                        pick = k;
                        break;
                    }
                    u -= s.0;
                }
                let mean = p.detector.mean_clicks_for_photons(sectors[pick].1, e.kappa);
                if sample_clicks(mean, &mut rng).verdict == Verdict::NoPhoton {
                    accepted += 1;
                }
            }
            accepted as f64 / p.detector_trials as f64
        });

        let fidelity = fidelity_pure(&target, &out.atoms)?;
        let (lambda, family_distance) = family_lambda(&out.atoms, e.is_opposite_phase())?;
        let bell = chsh_max(&out.atoms)?;
        rounds.push(RoundRecord {
            round: m,
            probability: out.probability,
            cumulative_probability: cumulative,
            fidelity,
            lambda,
            family_distance,
            s_max: bell.s_max,
            closed_fidelity: closed_form_fidelity(m, alpha),
            closed_success: closed_form_success(m, alpha),
            oracle_fidelity: oracle_fidelity(m, alpha),
            oracle_probability: oracle_round_probability(m, alpha),
            oracle_success: oracle_success(m, alpha),
            steady_residual: out.residual,
            converged: out.converged,
            detector_accept,
            sampled_accept,
            state: out.atoms.clone(),
        });
        atoms = out.atoms;
    }
    let monotone = rounds
        .windows(2)
        .all(|w| w[0].fidelity >= 1.0 - 1e-12 || w[1].fidelity > w[0].fidelity);
    Ok(PurificationReport {
        rounds,
        opposite_phase: e.is_opposite_phase(),
        alpha_tilde: alpha,
        n_max: gens.n_max,
        monotone,
        max_trace_drift: max_drift,
        min_positivity: min_pos,
    })
}
