use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the two three-level atoms, the cavity mode and the
/// three lasers. All values are angular frequencies in a common unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullModelParams {
    /// Bohr frequency of `|e⟩` above `|g⟩`.
    pub omega_e: f64,
    /// Bohr frequency of `|c⟩` above `|g⟩`.
    pub omega_c: f64,
    /// Cavity mode frequency.
    pub omega_f: f64,
    /// Cavity coupling of atom 1.
    pub g1: f64,
    /// Cavity coupling of atom 2; opposite sign to `g1` selects the Φ⁺ variant.
    pub g2: f64,
    /// Laser on `|g⟩ ↔ |c⟩` detuned by `delta`.
    pub omega: f64,
    /// Laser on `|g⟩ ↔ |c⟩` detuned by `delta_p`.
    pub omega1p: f64,
    /// Laser on `|e⟩ ↔ |c⟩` detuned by `delta_p`.
    pub omega2p: f64,
    pub delta: f64,
    pub delta_p: f64,
    #[serde(default)]
    pub stark_compensation: bool,
}

impl FullModelParams {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.omega_e,
            self.omega_c,
            self.omega_f,
            self.g1,
            self.g2,
            self.omega,
            self.omega1p,
            self.omega2p,
            self.delta,
            self.delta_p,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite model parameter".into()));
        }
        if self.delta == 0.0 || self.delta_p == 0.0 {
            return Err(Error::InvalidArgument("detunings must be non-zero".into()));
        }
        if !self.is_opposite_phase() && self.delta == self.delta_p {
            return Err(Error::InvalidArgument(
                "delta and delta_p must differ for the symmetric scheme".into(),
            ));
        }
        Ok(())
    }

    /// Couplings of opposite sign: the scheme that targets Φ⁺ (with `omega = 0`
    /// and a single detuning).
    pub fn is_opposite_phase(&self) -> bool {
        self.g1 * self.g2 < 0.0
    }

    pub fn max_cavity_coupling(&self) -> f64 {
        self.g1.abs().max(self.g2.abs())
    }

    /// Raman coupling `Ω g/Δ` (symmetric) or `Ω′₁ |g|/Δ` (opposite phase).
    pub fn g_eff(&self) -> f64 {
        if self.is_opposite_phase() {
            self.omega1p * self.max_cavity_coupling() / self.delta
        } else {
            self.omega * self.g1 / self.delta
        }
    }

    /// Two-laser drive `Ω′₁Ω′₂/Δ′`.
    pub fn omega_eff_drive(&self) -> f64 {
        self.omega1p * self.omega2p / self.delta_p
    }

    /// Effective two-level parameters after adiabatic elimination of `|c⟩`.
    pub fn effective(&self, kappa: f64) -> Result<EffectiveParams> {
        self.validate()?;
        let signs = if self.is_opposite_phase() {
            [1, -1]
        } else {
            [1, 1]
        };
        EffectiveParams::new(self.g_eff(), self.omega_eff_drive(), kappa, signs)
    }

    /// A symmetric-scheme parameter set whose largest adiabatic-elimination
    /// ratio equals `ratio`, with Raman coupling `g_eff` and drive `omega_eff`.
    ///
    /// `Ω = g = g_eff/r`, `Δ = g_eff/r²`, `Δ′ = Δ/2`, `Ω′₁ = Ω′₂ = √(Ω′_eff Δ′)`;
    /// the laser frequencies are chosen for two-photon resonance with the cavity
    /// (`ω_f = ω_c − Δ − ω_e`). Requires `omega_eff ≤ g_eff/2` for `Ω′/Δ′ ≤ r`.
    pub fn design(
        g_eff: f64,
        omega_eff: f64,
        ratio: f64,
        omega_e: f64,
        omega_f: f64,
    ) -> Result<Self> {
        if !(g_eff > 0.0 && ratio > 0.0 && omega_eff >= 0.0) {
            return Err(Error::InvalidArgument(
                "design needs g_eff > 0, ratio > 0, drive ≥ 0".into(),
            ));
        }
        let delta = g_eff / (ratio * ratio);
        let coupling = g_eff / ratio;
        let delta_p = delta / 2.0;
        let laser_p = (omega_eff * delta_p).sqrt();
        let p = Self {
            omega_e,
            omega_c: delta + omega_e + omega_f,
            omega_f,
            g1: coupling,
            g2: coupling,
            omega: coupling,
            omega1p: laser_p,
            omega2p: laser_p,
            delta,
            delta_p,
            stark_compensation: true,
        };
        p.validate()?;
        Ok(p)
    }
}

/// Parameters of the effective two-level model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffectiveParams {
    /// Raman atom-cavity coupling (`g_eff`, or `g′_eff` for the variant).
    pub g_eff: f64,
    /// Classical two-laser drive `Ω′_eff`.
    pub omega_eff_drive: f64,
    pub kappa: f64,
    /// `[1, 1]` for the Ψ⁺ scheme, `[1, -1]` for the Φ⁺ variant.
    pub coupling_signs: [i8; 2],
}

impl EffectiveParams {
    pub fn new(
        g_eff: f64,
        omega_eff_drive: f64,
        kappa: f64,
        coupling_signs: [i8; 2],
    ) -> Result<Self> {
        let p = Self {
            g_eff,
            omega_eff_drive,
            kappa,
            coupling_signs,
        };
        p.validate()?;
        Ok(p)
    }

    /// Ψ⁺ scheme with signs `(+, +)`.
    pub fn symmetric(g_eff: f64, kappa: f64) -> Result<Self> {
        Self::new(g_eff, 0.0, kappa, [1, 1])
    }

    /// Φ⁺ variant with signs `(+, −)`.
    pub fn opposite_phase(g_eff: f64, kappa: f64) -> Result<Self> {
        Self::new(g_eff, 0.0, kappa, [1, -1])
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g_eff >= 0.0 && self.g_eff.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "g_eff must be ≥ 0, got {}",
                self.g_eff
            )));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be > 0, got {}",
                self.kappa
            )));
        }
        if !self.omega_eff_drive.is_finite() {
            return Err(Error::InvalidArgument("non-finite drive".into()));
        }
        if self.coupling_signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::InvalidArgument(format!(
                "coupling signs must be ±1, got {:?}",
                self.coupling_signs
            )));
        }
        Ok(())
    }

    pub fn is_opposite_phase(&self) -> bool {
        self.coupling_signs[0] != self.coupling_signs[1]
    }

    /// Signed per-atom couplings `s_j g_eff`.
    pub fn couplings(&self) -> [f64; 2] {
        [
            f64::from(self.coupling_signs[0]) * self.g_eff,
            f64::from(self.coupling_signs[1]) * self.g_eff,
        ]
    }

    /// `|α̃| = g_eff/κ`; the pointer states carry amplitude `2α̃`.
    pub fn alpha_tilde(&self) -> f64 {
        self.g_eff / self.kappa
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> FullModelParams {
        FullModelParams {
            omega_e: 1.0,
            omega_c: 50.0,
            omega_f: 2.0,
            g1: 2.0,
            g2: 2.0,
            omega: 3.0,
            omega1p: 1.5,
            omega2p: 2.5,
            delta: 40.0,
            delta_p: 20.0,
            stark_compensation: false,
        }
    }

    #[test]
    fn derived_couplings() {
        let p = sample();
        let e = p.effective(1.0).unwrap();
        assert_eq!(e.g_eff, 3.0 * 2.0 / 40.0);
        assert_eq!(e.omega_eff_drive, 1.5 * 2.5 / 20.0);
        assert_eq!(e.coupling_signs, [1, 1]);

        let mut v = sample();
        v.omega = 0.0;
        v.g2 = -2.0;
        v.delta_p = v.delta;
        let e = v.effective(1.0).unwrap();
        assert_eq!(e.g_eff, 1.5 * 2.0 / 40.0);
        assert_eq!(e.coupling_signs, [1, -1]);
    }

    #[test]
    fn equal_detunings_rejected_for_symmetric_scheme() {
        let mut p = sample();
        p.delta_p = p.delta;
        assert!(p.validate().is_err());
    }

    #[test]
    fn design_hits_requested_ratio() {
        let p = FullModelParams::design(1.0, 0.5, 0.05, 5.0, 3.0).unwrap();
        assert!((p.g_eff() - 1.0).abs() < 1e-12);
        assert!((p.omega_eff_drive() - 0.5).abs() < 1e-12);
        assert!((p.omega / p.delta - 0.05).abs() < 1e-15);
        assert!((p.omega1p / p.delta_p - 0.05).abs() < 1e-12);
        assert!((p.omega_c - p.delta - p.omega_e - p.omega_f).abs() < 1e-12);
    }

    #[test]
    fn effective_params_reject_bad_values() {
        assert!(EffectiveParams::new(1.0, 0.0, 0.0, [1, 1]).is_err());
        assert!(EffectiveParams::new(-1.0, 0.0, 1.0, [1, 1]).is_err());
        assert!(EffectiveParams::new(1.0, 0.0, 1.0, [1, 0]).is_err());
    }
}
