use super::closed_form::oracle_fidelity;
use super::purify::{
    generators, ground_atoms, pointer_amplitude, run_round, target_state, ProtocolParams,
};
use crate::error::{Error, Result};
use crate::space::fidelity_pure;

/// Coupling asymmetry between the two atoms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalizationParams {
    /// `ε = δg/κ`.
    pub epsilon: f64,
}

impl LocalizationParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be ≥ 0, got {epsilon}"
            )));
        }
        Ok(Self { epsilon })
    }

    pub fn delta_g(&self, kappa: f64) -> f64 {
        self.epsilon * kappa
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationRow {
    pub epsilon: f64,
    /// Fidelity of the once-purified state with the target Bell state.
    pub fidelity: f64,
    /// `1/(1 + ε²)`.
    pub model_fidelity: f64,
    /// Exact-projection fidelity without asymmetry.
    pub ideal_fidelity: f64,
    pub probability: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizationReport {
    pub rows: Vec<LocalizationRow>,
    /// Fit `1 − F ≈ c εᵏ` over the rows with `ε ∈ [FIT_RANGE]`; `None` with
    /// fewer than two usable points.
    pub fit: Option<PowerLawFit>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerLawFit {
    pub exponent: f64,
    pub prefactor: f64,
    pub points: usize,
}

pub const FIT_RANGE: (f64, f64) = (0.02, 0.2);

/// Least-squares line through `(ln x, ln y)`; points with non-positive values are skipped.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<PowerLawFit> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = logs.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let exponent = sxy / sxx;
    Some(PowerLawFit {
        exponent,
        prefactor: (my - exponent * mx).exp(),
        points: n,
    })
}

/// Runs one purification round with couplings `g_eff` and `g_eff + εκ`
/// (signs kept) for every `ε` in `epsilons`.
pub fn localization_sweep(p: &ProtocolParams, epsilons: &[f64]) -> Result<LocalizationReport> {
    p.validate()?;
    let e = &p.effective;
    let signs = e.coupling_signs.map(f64::from);
    let target = target_state(e.is_opposite_phase());
    let ideal = oracle_fidelity(
        1,
        pointer_amplitude([e.g_eff, e.g_eff], e.kappa, p.mode) / 2.0,
    );
    // one cutoff for the whole sweep, sized for the largest asymmetry
    let eps_max = epsilons.iter().copied().fold(0.0, f64::max);
    let widest = [e.g_eff, e.g_eff + eps_max * e.kappa];
    let n_max = p
        .n_max
        .unwrap_or_else(|| crate::space::default_n_max(pointer_amplitude(widest, e.kappa, p.mode)));

    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let loc = LocalizationParams::new(eps)?;
        let couplings = [
            signs[0] * e.g_eff,
            signs[1] * (e.g_eff + loc.delta_g(e.kappa)),
        ];
        let gens = generators(couplings, e.kappa, p.mode, Some(n_max))?;
        let out = run_round(
            &gens.damped,
            gens.lossless.as_ref(),
            &ground_atoms(),
            n_max,
            p.mode,
            &p.integrator,
        )?;
        rows.push(LocalizationRow {
            epsilon: eps,
            fidelity: fidelity_pure(&target, &out.atoms)?,
            model_fidelity: 1.0 / (1.0 + eps * eps),
            ideal_fidelity: ideal,
            probability: out.probability,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.epsilon >= FIT_RANGE.0 - 1e-12 && r.epsilon <= FIT_RANGE.1 + 1e-12)
        .map(|r| (r.epsilon, 1.0 - r.fidelity))
        .collect();
    Ok(LocalizationReport {
        fit: fit_power_law(&pts),
        rows,
    })
}
