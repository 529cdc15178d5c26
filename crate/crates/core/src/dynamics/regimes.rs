//! Dynamical check of the adiabatic-elimination and rotating-wave steps:
//! the three-level laboratory model against the effective two-level model.

use num_complex::Complex64;

use super::integrate::{evolve_pure, propagate_exact, IntegratorConfig};
use crate::error::{Error, Result};
use crate::models::{
    build_effective_hamiltonian, field_annihilation, full_hamiltonian_source, FullModelParams,
};
use crate::space::{
    qubit_ground, tensor, vacuum, CMatrix, CVector, Operator, PureState, SpaceSignature,
};

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeComparison {
    pub times: Vec<f64>,
    /// Trace distance between the effective state and the dressed, reduced full-model state.
    pub distances: Vec<f64>,
    /// Same, projecting the bare full-model state without undoing the dressing.
    pub bare_distances: Vec<f64>,
    /// Bare population outside the `{g, e}` manifold.
    pub leakage: Vec<f64>,
    pub max_distance: f64,
    pub max_bare_distance: f64,
    pub max_norm_drift: f64,
}

/// Couplings into `|c⟩`, as `(W, Δ)` with `W` mapping `{g, e}` to `c` and
/// oscillating as `e^{iΔt}` in the frame of the bare energies.
fn virtual_couplings(p: &FullModelParams, n_max: usize) -> Result<Vec<(Operator, f64)>> {
    let sig = SpaceSignature::three_level_atoms_field(n_max);
    let a = field_annihilation(&sig)?;
    let to_c = |from: usize| -> Result<Operator> {
        let mut m = CMatrix::zeros(3, 3);
        m[(2, from)] = Complex64::new(1.0, 0.0);
        let local = Operator::local(m)?;
        Ok(&Operator::embed(&local, 0, &sig)? + &Operator::embed(&local, 1, &sig)?)
    };
    let cavity = |from: usize| -> Result<Operator> {
        let mut out = Operator::zeros(&sig);
        for (atom, g) in [(0, p.g1), (1, p.g2)] {
            let mut m = CMatrix::zeros(3, 3);
            m[(2, from)] = Complex64::new(g, 0.0);
            out = &out + &Operator::embed(&Operator::local(m)?, atom, &sig)?.compose(&a)?;
        }
        Ok(out)
    };
    let cavity_detuning = p.omega_c - p.omega_e - p.omega_f;
    let terms = [
        (to_c(0)?.scale_real(p.omega), p.delta, p.omega),
        (to_c(0)?.scale_real(p.omega1p), p.delta_p, p.omega1p),
        (to_c(1)?.scale_real(p.omega2p), p.delta_p, p.omega2p),
        (cavity(1)?, cavity_detuning, p.max_cavity_coupling()),
    ];
    let mut out = Vec::new();
    for (w, detuning, strength) in terms {
        if strength == 0.0 {
            continue;
        }
        if detuning == 0.0 {
            return Err(Error::InvalidArgument(
                "resonant coupling to the eliminated level".into(),
            ));
        }
        out.push((w, detuning));
    }
    Ok(out)
}

/// `e^{T(t)}` with `T = Σ_k (e^{iΔ_k t} W_k − h.c.)/Δ_k`, the first-order
/// transformation to the frame in which the `c` couplings vanish.
fn dressing(couplings: &[(Operator, f64)], t: f64, dim: usize) -> CMatrix {
    let mut h = CMatrix::zeros(dim, dim);
    for (w, detuning) in couplings {
        let x = w.matrix() * (Complex64::from_polar(1.0, detuning * t) / *detuning);
        // iT is Hermitian
        h += (&x - x.adjoint()) * Complex64::i();
    }
    let eig = h.symmetric_eigen();
    let v = &eig.eigenvectors;
    let phases = CMatrix::from_diagonal(&CVector::from_fn(dim, |k, _| {
        Complex64::from_polar(1.0, -eig.eigenvalues[k])
    }));
    v * phases * v.adjoint()
}

/// `{g, e}` block of `psi` (bare-energy frame), renormalized, with its lost weight.
fn project(psi: &CVector, n_max: usize) -> Result<(PureState, f64)> {
    let df = n_max + 1;
    let mut out = CVector::zeros(4 * df);
    for a1 in 0..2 {
        for a2 in 0..2 {
            for n in 0..df {
                out[(a1 * 2 + a2) * df + n] = psi[(a1 * 3 + a2) * df + n];
            }
        }
    }
    let kept = out.norm_squared() / psi.norm_squared();
    Ok((
        PureState::normalized(SpaceSignature::atoms_field(n_max), out)?,
        1.0 - kept,
    ))
}

fn bare_frame(p: &FullModelParams, psi: &PureState, t: f64, n_max: usize) -> CVector {
    let df = n_max + 1;
    let energy = [0.0, p.omega_e, p.omega_c];
    let mut out = psi.amplitudes().clone();
    for a1 in 0..3 {
        for a2 in 0..3 {
            for n in 0..df {
                let e = energy[a1] + energy[a2] + n as f64 * p.omega_f;
                out[(a1 * 3 + a2) * df + n] *= Complex64::from_polar(1.0, e * t);
            }
        }
    }
    out
}

fn distance(a: &PureState, b: &PureState) -> Result<f64> {
    Ok((1.0 - a.inner(b)?.norm_sqr().min(1.0)).sqrt())
}

/// Evolves `|gg0⟩` under the full laboratory Hamiltonian and compares it at
/// `samples` evenly spaced times up to `g_eff t = horizon` (or `t = horizon`
/// when `g_eff = 0`) with the effective two-level evolution.
///
/// The full state is taken to the frame rotating with the bare level and mode
/// energies, undressed to first order in the couplings to `|c⟩`, and
/// projected onto `{g, e}`; the effective evolution starts from the same
/// undressed initial state.
pub fn compare_full_effective(
    p: &FullModelParams,
    n_max: usize,
    horizon: f64,
    samples: usize,
    cfg: &IntegratorConfig,
) -> Result<RegimeComparison> {
    if !(horizon > 0.0) || samples == 0 {
        return Err(Error::InvalidArgument(
            "horizon must be > 0 with at least one sample".into(),
        ));
    }
    let source = full_hamiltonian_source(p, n_max)?;
    let couplings = virtual_couplings(p, n_max)?;
    let dim = source.signature().total_dim();
    let h_eff = build_effective_hamiltonian(&p.effective(1.0)?, n_max)?;
    let t_final = if p.g_eff() != 0.0 {
        horizon / p.g_eff().abs()
    } else {
        horizon
    };
    let dt = t_final / samples as f64;
    let times: Vec<f64> = (0..=samples).map(|k| k as f64 * dt).collect();

    let mut full = PureState::basis(SpaceSignature::three_level_atoms_field(n_max), 0)?;
    let (start, _) = project(&(dressing(&couplings, 0.0, dim) * full.amplitudes()), n_max)?;
    let bare_start = tensor(&[qubit_ground(), qubit_ground(), vacuum(n_max)])?;
    let effective = propagate_exact(&h_eff, &start, &times)?;
    let effective_bare = propagate_exact(&h_eff, &bare_start, &times)?;

    let mut distances = vec![distance(&start, &effective[0])?];
    let mut bare_distances = vec![0.0];
    let mut leakage = vec![0.0];
    let mut max_norm_drift: f64 = 0.0;
    for (k, &t) in times.iter().enumerate().skip(1) {
        let seg = IntegratorConfig {
            t_final: dt,
            sample_stride: 0,
            ..cfg.clone()
        };
        let r = evolve_pure(&source.shifted(times[k - 1]), &full, &seg)?;
        max_norm_drift = max_norm_drift.max(r.diagnostics.norm_drift);
        full = r.final_state;
        let rotated = bare_frame(p, &full, t, n_max);
        let (bare, leak) = project(&rotated, n_max)?;
        let (dressed, _) = project(&(dressing(&couplings, t, dim) * &rotated), n_max)?;
        distances.push(distance(&dressed, &effective[k])?);
        bare_distances.push(distance(&bare, &effective_bare[k])?);
        leakage.push(leak);
    }
    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    Ok(RegimeComparison {
        max_distance: max(&distances),
        max_bare_distance: max(&bare_distances),
        times,
        distances,
        bare_distances,
        leakage,
        max_norm_drift,
    })
}
