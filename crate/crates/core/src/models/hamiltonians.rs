use num_complex::Complex64;

use super::params::{EffectiveParams, FullModelParams};
use crate::error::Result;
use crate::space::{
    annihilation, number, sigma_minus, sigma_plus, sigma_x, CMatrix, Operator, SpaceSignature,
};

const G: usize = 0;
const E: usize = 1;
const C: usize = 2;

/// One laser term `e^{−iωt} X + e^{iωt} X†`.
#[derive(Clone, Debug)]
pub struct Drive {
    pub operator: Operator,
    pub frequency: f64,
}

/// Time-dependent Hamiltonian `H(t) = H_s + Σ_k (e^{−iω_k t} X_k + h.c.)`.
#[derive(Clone, Debug)]
pub struct DrivenHamiltonian {
    pub static_part: Operator,
    pub drives: Vec<Drive>,
}

impl DrivenHamiltonian {
    pub fn signature(&self) -> &SpaceSignature {
        self.static_part.signature()
    }

    pub fn at(&self, t: f64) -> Operator {
        let mut m = self.static_part.matrix().clone();
        for d in &self.drives {
            let phase = Complex64::from_polar(1.0, -d.frequency * t);
            let x = d.operator.matrix();
            m += x * phase + x.adjoint() * phase.conj();
        }
        Operator::new(self.signature().clone(), m).expect("same signature")
    }

    pub fn is_time_independent(&self) -> bool {
        self.drives.is_empty()
    }

    /// `H(t + t0)` as a function of `t`.
    pub fn shifted(&self, t0: f64) -> Self {
        let drives = self
            .drives
            .iter()
            .map(|d| Drive {
                operator: d
                    .operator
                    .scale(Complex64::from_polar(1.0, -d.frequency * t0)),
                frequency: d.frequency,
            })
            .collect();
        Self {
            static_part: self.static_part.clone(),
            drives,
        }
    }
}

impl From<Operator> for DrivenHamiltonian {
    fn from(op: Operator) -> Self {
        Self {
            static_part: op,
            drives: Vec::new(),
        }
    }
}

fn level_projector(from: usize, to: usize) -> Operator {
    let mut m = CMatrix::zeros(3, 3);
    m[(to, from)] = Complex64::new(1.0, 0.0);
    Operator::local(m).expect("3x3")
}

fn on_atom(local: &Operator, atom: usize, sig: &SpaceSignature) -> Operator {
    Operator::embed(local, atom, sig).expect("atom site exists")
}

/// Field annihilation operator embedded on the last subsystem of `sig`.
pub fn field_annihilation(sig: &SpaceSignature) -> Result<Operator> {
    let a = annihilation(sig.n_max())?;
    Operator::embed(&a, sig.len() - 1, sig)
}

fn sum(ops: impl IntoIterator<Item = Operator>, sig: &SpaceSignature) -> Operator {
    ops.into_iter()
        .fold(Operator::zeros(sig), |acc, op| &acc + &op)
}

/// Diagonal level-shift operator that cancels the second-order light shifts of
/// the adiabatically eliminated level:
///
/// `δH = Σ_j [(Ω²/Δ + Ω′₁²/Δ′) |g_j⟩⟨g_j| + (Ω′₂²/Δ′ + (g_j²/Δ) a†a) |e_j⟩⟨e_j|]`.
///
/// Each laser (or the cavity) coupling a level to `|c⟩` with detuning `D`
/// pushes that level down by `coupling²/D`; the cavity shift of `|e, n⟩`
/// scales with `n` because the matrix element is `g√n`. Adding `δH` makes the
/// remaining second-order dynamics the pure Raman terms.
pub fn stark_counter_term(p: &FullModelParams, n_max: usize) -> Result<Operator> {
    let sig = SpaceSignature::three_level_atoms_field(n_max);
    let field_n = Operator::embed(&number(n_max)?, 2, &sig)?;
    let g_shift = p.omega * p.omega / p.delta + p.omega1p * p.omega1p / p.delta_p;
    let e_shift = p.omega2p * p.omega2p / p.delta_p;
    let mut out = Operator::zeros(&sig);
    for (atom, g) in [(0, p.g1), (1, p.g2)] {
        let pg = on_atom(&level_projector(G, G), atom, &sig);
        let pe = on_atom(&level_projector(E, E), atom, &sig);
        out = &out + &pg.scale_real(g_shift);
        out = &out + &pe.scale_real(e_shift);
        out = &out + &pe.compose(&field_n)?.scale_real(g * g / p.delta);
    }
    Ok(out)
}

/// Laboratory-frame Hamiltonian of two three-level atoms, the cavity mode and
/// three lasers, split into static and oscillating parts.
pub fn full_hamiltonian_source(p: &FullModelParams, n_max: usize) -> Result<DrivenHamiltonian> {
    p.validate()?;
    let sig = SpaceSignature::three_level_atoms_field(n_max);
    let a = field_annihilation(&sig)?;
    let ad = a.adjoint();
    let n_op = ad.compose(&a)?;

    let mut static_part = n_op.scale_real(p.omega_f);
    for (atom, g) in [(0, p.g1), (1, p.g2)] {
        let ee = on_atom(&level_projector(E, E), atom, &sig);
        let cc = on_atom(&level_projector(C, C), atom, &sig);
        let e_from_c = on_atom(&level_projector(C, E), atom, &sig); // |e⟩⟨c|
        let c_from_e = e_from_c.adjoint();
        static_part = &static_part + &ee.scale_real(p.omega_e);
        static_part = &static_part + &cc.scale_real(p.omega_c);
        let jc = &ad.compose(&e_from_c)? + &a.compose(&c_from_e)?;
        static_part = &static_part + &jc.scale_real(g);
    }
    if p.stark_compensation {
        static_part = &static_part + &stark_counter_term(p, n_max)?;
    }

    let c_from_g = sum(
        (0..2).map(|j| on_atom(&level_projector(G, C), j, &sig)),
        &sig,
    );
    let c_from_e = sum(
        (0..2).map(|j| on_atom(&level_projector(E, C), j, &sig)),
        &sig,
    );
    let drives = vec![
        Drive {
            operator: c_from_g.scale_real(p.omega),
            frequency: p.omega_c - p.delta,
        },
        Drive {
            operator: c_from_e.scale_real(p.omega2p),
            frequency: p.omega_c - p.omega_e - p.delta_p,
        },
        Drive {
            operator: c_from_g.scale_real(p.omega1p),
            frequency: p.omega_c - p.delta_p,
        },
    ];
    Ok(DrivenHamiltonian {
        static_part,
        drives,
    })
}

/// Full Hamiltonian evaluated at time `t` on `[3, 3, n_max + 1]`.
pub fn build_full_hamiltonian(p: &FullModelParams, n_max: usize, t: f64) -> Result<Operator> {
    if t < 0.0 {
        return Err(crate::Error::InvalidArgument(format!("negative time {t}")));
    }
    Ok(full_hamiltonian_source(p, n_max)?.at(t))
}

fn two_level_parts(
    n_max: usize,
) -> Result<(SpaceSignature, Operator, [Operator; 2], [Operator; 2])> {
    let sig = SpaceSignature::atoms_field(n_max);
    let a = field_annihilation(&sig)?;
    let sm = [0, 1].map(|j| on_atom(&sigma_minus(), j, &sig));
    let sp = [0, 1].map(|j| on_atom(&sigma_plus(), j, &sig));
    Ok((sig, a, sm, sp))
}

/// `−g_eff Σ_j s_j (a†σ†_j + aσ_j) − Ω′_eff Σ_j (σ†_j + σ_j)` on `[2, 2, n_max + 1]`.
pub fn build_effective_hamiltonian(p: &EffectiveParams, n_max: usize) -> Result<Operator> {
    Ok(&effective_cavity_term(p, n_max)? + &effective_drive_term(p, n_max)?)
}

/// Anti-Jaynes-Cummings part `−g_eff Σ_j s_j (a†σ†_j + aσ_j)`.
pub fn effective_cavity_term(p: &EffectiveParams, n_max: usize) -> Result<Operator> {
    let (sig, a, sm, sp) = two_level_parts(n_max)?;
    let ad = a.adjoint();
    let mut h = Operator::zeros(&sig);
    for (j, g) in p.couplings().into_iter().enumerate() {
        let term = &ad.compose(&sp[j])? + &a.compose(&sm[j])?;
        h = &h + &term.scale_real(-g);
    }
    Ok(h)
}

/// Classical drive part `−Ω′_eff Σ_j (σ†_j + σ_j)`.
pub fn effective_drive_term(p: &EffectiveParams, n_max: usize) -> Result<Operator> {
    let (sig, _, sm, sp) = two_level_parts(n_max)?;
    let mut h = Operator::zeros(&sig);
    for j in 0..2 {
        h = &h + &(&sp[j] + &sm[j]).scale_real(-p.omega_eff_drive);
    }
    Ok(h)
}

/// Strong-driving interaction-picture Hamiltonian
/// `−(g_eff/2)(a† + a) Σ_j s_j σx_j`.
///
/// Signs `(+, −)` give the opposite-phase variant with the overall sign of
/// the symmetric scheme kept.
pub fn build_interaction_hamiltonian(p: &EffectiveParams, n_max: usize) -> Result<Operator> {
    build_interaction_hamiltonian_with_couplings(p.couplings(), n_max)
}

/// `−(1/2)(a† + a) Σ_j g_j σx_j` with arbitrary per-atom couplings.
pub fn build_interaction_hamiltonian_with_couplings(
    couplings: [f64; 2],
    n_max: usize,
) -> Result<Operator> {
    let sig = SpaceSignature::atoms_field(n_max);
    let a = field_annihilation(&sig)?;
    let quad = &a + &a.adjoint();
    let mut collective = Operator::zeros(&sig);
    for (j, g) in couplings.into_iter().enumerate() {
        collective = &collective + &on_atom(&sigma_x(), j, &sig).scale_real(g);
    }
    Ok(quad.compose(&collective)?.scale_real(-0.5))
}
