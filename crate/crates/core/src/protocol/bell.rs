use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::space::{
    phi_plus, plus_minus_basis, psi_plus, sigma_x, sigma_y, sigma_z, tensor, trace_distance,
    DensityState, Operator, SpaceSignature,
};

/// Largest allowed trace distance between a state and its λ-family projection.
pub const FAMILY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct BellReport {
    /// `T_ij = ⟨σ_i ⊗ σ_j⟩` with `i, j ∈ {x, y, z}`.
    pub correlation: Matrix3<f64>,
    /// Two largest eigenvalues of `TᵀT`, descending.
    pub m1: f64,
    pub m2: f64,
    /// Maximal CHSH value `2√(m₁ + m₂)`.
    pub s_max: f64,
    pub violation: bool,
}

fn paulis() -> [Operator; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

fn check_two_qubits(rho: &DensityState) -> Result<()> {
    if rho.signature() != &SpaceSignature::two_qubits() {
        return Err(Error::SignatureMismatch {
            expected: SpaceSignature::two_qubits(),
            found: rho.signature().clone(),
        });
    }
    Ok(())
}

/// Spin correlation matrix of a two-qubit state.
pub fn correlation_matrix(rho: &DensityState) -> Result<Matrix3<f64>> {
    check_two_qubits(rho)?;
    let s = paulis();
    let mut t = Matrix3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let op = tensor(&[s[i].clone(), s[j].clone()])?;
            t[(i, j)] = rho.expectation(&op)?.re;
        }
    }
    Ok(t)
}

/// Maximal CHSH value from the Horodecki criterion.
pub fn chsh_max(rho: &DensityState) -> Result<BellReport> {
    let t = correlation_matrix(rho)?;
    let mut ev: Vec<f64> = (t.transpose() * t)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    let (m1, m2) = (ev[0].max(0.0), ev[1].max(0.0));
    let s_max = 2.0 * (m1 + m2).sqrt();
    Ok(BellReport {
        correlation: t,
        m1,
        m2,
        s_max,
        violation: s_max > 2.0,
    })
}

/// `λ|D⟩⟨D| + (1−λ)/2 (|b₁⟩⟨b₁| + |b₂⟩⟨b₂|)` with dark state `D = Ψ⁺` and
/// bright pair `|++⟩, |−−⟩`, or `D = Φ⁺` with `|+−⟩, |−+⟩` when `opposite_phase`.
pub fn gisin_state(lambda: f64, opposite_phase: bool) -> Result<DensityState> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidArgument(format!(
            "λ must lie in [0, 1], got {lambda}"
        )));
    }
    let (p, m) = plus_minus_basis();
    let (dark, b1, b2) = if opposite_phase {
        (
            phi_plus(),
            tensor(&[p.clone(), m.clone()])?,
            tensor(&[m, p])?,
        )
    } else {
        (
            psi_plus(),
            tensor(&[p.clone(), p])?,
            tensor(&[m.clone(), m])?,
        )
    };
    let w = (1.0 - lambda) / 2.0;
    DensityState::mixture(&[
        (lambda, &dark.projector()),
        (w, &b1.projector()),
        (w, &b2.projector()),
    ])
}

/// `λ = ⟨D|ρ|D⟩` when `rho` lies within `FAMILY_TOL` of the λ family, with the
/// measured distance either way.
pub fn family_lambda(rho: &DensityState, opposite_phase: bool) -> Result<(Option<f64>, f64)> {
    check_two_qubits(rho)?;
    let dark = if opposite_phase {
        phi_plus()
    } else {
        psi_plus()
    };
    let lambda = rho.overlap(&dark)?.re.clamp(0.0, 1.0);
    let distance = trace_distance(rho, &gisin_state(lambda, opposite_phase)?)?;
    Ok(((distance <= FAMILY_TOL).then_some(lambda), distance))
}

fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    Vector3::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

/// CHSH maximum by direct search over Bob's two measurement directions
/// (grid, then compass refinement); Alice's optimal directions follow from
/// `max_a a·v = |v|`. Approaches the Horodecki value from below.
pub fn brute_force_chsh(rho: &DensityState) -> Result<f64> {
    let t = correlation_matrix(rho)?;
    let value = |p: &[f64; 4]| {
        let b = direction(p[0], p[1]);
        let bp = direction(p[2], p[3]);
        (t * (b + bp)).norm() + (t * (b - bp)).norm()
    };
    let (nt, np) = (10, 20);
    let grid: Vec<(f64, f64)> = (0..nt)
        .flat_map(|i| {
            let th = std::f64::consts::PI * (i as f64 + 0.5) / nt as f64;
            (0..np).map(move |j| (th, 2.0 * std::f64::consts::PI * j as f64 / np as f64))
        })
        .collect();
    let mut best = ([0.0; 4], f64::NEG_INFINITY);
    for &(t1, p1) in &grid {
        for &(t2, p2) in &grid {
            let x = [t1, p1, t2, p2];
            let v = value(&x);
            if v > best.1 {
                best = (x, v);
            }
        }
    }
    // compass refinement
    let (mut x, mut v) = best;
    let mut step = std::f64::consts::PI / nt as f64;
    while step > 1e-7 {
        let mut improved = false;
        for k in 0..4 {
            for sgn in [1.0, -1.0] {
                let mut y = x;
                y[k] += sgn * step;
                let w = value(&y);
                if w > v {
                    x = y;
                    v = w;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bell_state_violates_maximally() {
        let r = chsh_max(&psi_plus().projector()).unwrap();
        assert_abs_diff_eq!(r.s_max, 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        assert!(r.violation);
    }

    #[test]
    fn family_correlations() {
        let r = chsh_max(&gisin_state(0.5, false).unwrap()).unwrap();
        assert_abs_diff_eq!(r.s_max, 2f64.sqrt(), epsilon = 1e-12);
        assert!(!r.violation);
        let t = r.correlation;
        assert_abs_diff_eq!(t[(0, 0)], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(t[(1, 1)], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(t[(2, 2)], 0.5, epsilon = 1e-12);
        let r = chsh_max(&gisin_state(std::f64::consts::FRAC_1_SQRT_2, true).unwrap()).unwrap();
        assert_abs_diff_eq!(r.s_max, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn brute_force_agrees_on_family() {
        for lambda in [0.3, 0.5, 0.8, 1.0] {
            let rho = gisin_state(lambda, false).unwrap();
            let h = chsh_max(&rho).unwrap().s_max;
            let b = brute_force_chsh(&rho).unwrap();
            assert!(b <= h + 1e-9);
            assert_abs_diff_eq!(b, h, epsilon = 1e-3);
        }
    }

    #[test]
    fn family_membership() {
        let rho = gisin_state(0.9, false).unwrap();
        let (l, d) = family_lambda(&rho, false).unwrap();
        assert_abs_diff_eq!(l.unwrap(), 0.9, epsilon = 1e-12);
        assert!(d < 1e-12);
        let (l, _) = family_lambda(&rho, true).unwrap();
        assert!(l.is_none());
    }

    #[test]
    fn rejects_other_spaces() {
        assert!(chsh_max(&crate::space::vacuum(1).projector()).is_err());
    }
}
