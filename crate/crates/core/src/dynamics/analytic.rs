//! Closed-form reference states of the interaction Hamiltonian, built
//! directly from their branch decompositions rather than from any dynamics.

use num_complex::Complex64;

use crate::error::Result;
use crate::models::EffectiveParams;
use crate::space::{
    coherent_state, phi_plus, plus_minus_basis, psi_plus, tensor, vacuum, CVector, DensityState,
    PureState, SpaceSignature,
};

fn product(s1: i32, s2: i32) -> PureState {
    let (p, m) = plus_minus_basis();
    let pick = |s: i32| if s > 0 { p.clone() } else { m.clone() };
    tensor(&[pick(s1), pick(s2)]).expect("two qubits")
}

fn branch(atoms: &PureState, amplitude: Complex64, n_max: usize) -> Result<PureState> {
    let field = coherent_state(amplitude, n_max)?.state;
    Ok(tensor(&[atoms.clone(), field]).expect("atoms and field"))
}

/// The two bright product states and the dark Bell state for the coupling
/// signs of `p`: `(|++⟩, |−−⟩, Ψ⁺)` or `(|+−⟩, |−+⟩, Φ⁺)`. The first bright
/// state carries field amplitude `+2α`, the second `−2α`.
fn branches(p: &EffectiveParams) -> (PureState, PureState, PureState) {
    if p.is_opposite_phase() {
        (product(1, -1), product(-1, 1), phi_plus())
    } else {
        (product(1, 1), product(-1, -1), psi_plus())
    }
}

/// State reached from `|gg0⟩` after unitary evolution for `tau`:
/// `½|++⟩|2α⟩ + ½|−−⟩|−2α⟩ + (1/√2)|Ψ⁺⟩|0⟩` with `α = i g_eff τ/2`
/// (bright pair `|+−⟩, |−+⟩` and dark `Φ⁺` for opposite signs).
pub fn closed_form_evolved_state(p: &EffectiveParams, tau: f64, n_max: usize) -> Result<PureState> {
    let alpha = Complex64::new(0.0, p.g_eff * tau / 2.0);
    let (up, down, dark) = branches(p);
    let a = branch(&up, alpha * 2.0, n_max)?;
    let b = branch(&down, -alpha * 2.0, n_max)?;
    let c = tensor(&[dark, vacuum(n_max)]).expect("atoms and field");
    let half = Complex64::new(0.5, 0.0);
    let v: CVector = a.amplitudes() * half
        + b.amplitudes() * half
        + c.amplitudes() * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    // the truncated coherent states are renormalized, so the sum is unit up to the tail
    PureState::normalized(SpaceSignature::atoms_field(n_max), v)
}

/// Steady state of the damped interaction dynamics reached from `|gg0⟩`:
/// `¼|++⟩⟨++|⊗|2α̃⟩⟨2α̃| + ¼|−−⟩⟨−−|⊗|−2α̃⟩⟨−2α̃| + ½|Ψ⁺⟩⟨Ψ⁺|⊗|0⟩⟨0|`
/// with `α̃ = i g_eff/κ`; for opposite signs `|+−⟩` carries `2α̃`, `|−+⟩`
/// carries `−2α̃`, and the dark state is `Φ⁺`.
pub fn analytic_steady_state(p: &EffectiveParams, n_max: usize) -> Result<DensityState> {
    let alpha = Complex64::new(0.0, p.alpha_tilde());
    let (up, down, dark) = branches(p);
    let a = branch(&up, alpha * 2.0, n_max)?.projector();
    let b = branch(&down, -alpha * 2.0, n_max)?.projector();
    let c = tensor(&[dark, vacuum(n_max)])
        .expect("atoms and field")
        .projector();
    DensityState::mixture(&[(0.25, &a), (0.25, &b), (0.5, &c)])
}
