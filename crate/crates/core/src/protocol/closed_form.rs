//! Purification figures of merit in closed form, in the reference
//! form and as given by exact projection arithmetic.

/// `x = |2α̃|²`, the pointer-state distinguishability exponent.
pub fn pointer_exponent(alpha_tilde: f64) -> f64 {
    4.0 * alpha_tilde * alpha_tilde
}

/// Reference fidelity after `n` rounds: `1/(1 + 2e^{−N|2α̃|²})`.
pub fn closed_form_fidelity(n: u32, alpha_tilde: f64) -> f64 {
    let x = pointer_exponent(alpha_tilde);
    1.0 / (1.0 + 2.0 * (-(n as f64) * x).exp())
}

/// Reference success probability after `n` rounds:
/// `½ (1 + e^{−x})^{−1} Π_{m=2..N} (1 + 2e^{−m x})^{−1}`.
pub fn closed_form_success(n: u32, alpha_tilde: f64) -> f64 {
    let x = pointer_exponent(alpha_tilde);
    let first = 0.5 / (1.0 + (-x).exp());
    (2..=n).fold(first, |acc, m| acc / (1.0 + 2.0 * (-(m as f64) * x).exp()))
}

/// Dark-state weight after `n` exact vacuum projections of the steady state
/// started from `|gg⟩`: `1/(1 + e^{−N x})`.
pub fn oracle_fidelity(n: u32, alpha_tilde: f64) -> f64 {
    let x = pointer_exponent(alpha_tilde);
    1.0 / (1.0 + (-(n as f64) * x).exp())
}

/// No-photon probability of round `m` under exact projection:
/// `(1 + e^{−m x}) / (1 + e^{−(m−1) x})`, which is `½ + ½e^{−x}` for `m = 1`
/// from the initial weight ½.
pub fn oracle_round_probability(m: u32, alpha_tilde: f64) -> f64 {
    let x = pointer_exponent(alpha_tilde);
    let mf = m as f64;
    (1.0 + (-mf * x).exp()) / (1.0 + (-(mf - 1.0) * x).exp())
}

/// Probability that all `n` rounds give no photon: `½(1 + e^{−N x})`.
pub fn oracle_success(n: u32, alpha_tilde: f64) -> f64 {
    let x = pointer_exponent(alpha_tilde);
    0.5 * (1.0 + (-(n as f64) * x).exp())
}

/// Value of `N|α̃|²` on the contour where the reference fidelity equals `1/√2`.
pub fn closed_form_threshold() -> f64 {
    (2.0 / (std::f64::consts::SQRT_2 - 1.0)).ln() / 4.0
}

/// Value of `N|α̃|²` where the exact-projection fidelity equals `1/√2`.
pub fn oracle_threshold() -> f64 {
    (1.0 / (std::f64::consts::SQRT_2 - 1.0)).ln() / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reference_values() {
        assert_abs_diff_eq!(
            closed_form_fidelity(1, 1.0),
            1.0 / (1.0 + 2.0 * (-4.0f64).exp()),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(closed_form_fidelity(1, 1.0), 0.96466, epsilon = 5e-6);
        assert_abs_diff_eq!(closed_form_success(1, 1.0), 0.4910069, epsilon = 5e-7);
        assert_abs_diff_eq!(closed_form_fidelity(2, 0.5), 0.7869860, epsilon = 5e-7);
        assert_abs_diff_eq!(closed_form_fidelity(2, 1.0), 0.99933, epsilon = 5e-6);
    }

    #[test]
    fn strong_coupling_limit() {
        assert_eq!(closed_form_fidelity(1, 40.0), 1.0);
        assert_eq!(closed_form_success(3, 40.0), 0.5);
        assert_eq!(oracle_success(3, 40.0), 0.5);
    }

    #[test]
    fn success_product_is_empty_for_one_round() {
        let x = pointer_exponent(0.3);
        assert_abs_diff_eq!(
            closed_form_success(1, 0.3),
            0.5 / (1.0 + (-x).exp()),
            epsilon = 1e-15
        );
    }

    #[test]
    fn oracle_is_consistent() {
        for a in [0.2, 0.5, 1.0] {
            assert_abs_diff_eq!(
                oracle_round_probability(1, a),
                0.5 + 0.5 * (-pointer_exponent(a)).exp(),
                epsilon = 1e-15
            );
            let mut total = 1.0;
            for m in 1..=5 {
                total *= oracle_round_probability(m, a);
                assert_abs_diff_eq!(total, oracle_success(m, a), epsilon = 1e-14);
            }
        }
        assert_abs_diff_eq!(oracle_round_probability(1, 1.0), 0.509158, epsilon = 5e-7);
    }

    #[test]
    fn thresholds() {
        assert_abs_diff_eq!(closed_form_threshold(), 0.3936302, epsilon = 5e-7);
        for n in 1..4 {
            let a = (closed_form_threshold() / n as f64).sqrt();
            assert_abs_diff_eq!(
                closed_form_fidelity(n, a),
                std::f64::consts::FRAC_1_SQRT_2,
                epsilon = 1e-14
            );
            let a = (oracle_threshold() / n as f64).sqrt();
            assert_abs_diff_eq!(
                oracle_fidelity(n, a),
                std::f64::consts::FRAC_1_SQRT_2,
                epsilon = 1e-14
            );
        }
    }
}
