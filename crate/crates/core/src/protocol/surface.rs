use std::f64::consts::FRAC_1_SQRT_2;

use super::bell::{chsh_max, gisin_state};
use super::closed_form::{closed_form_fidelity, oracle_fidelity};
use super::purify::{purify, Mode, ProtocolParams};
use crate::error::{Error, Result};
use crate::models::EffectiveParams;

#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceCell {
    pub alpha: f64,
    pub rounds: u32,
    /// Reference closed-form fidelity.
    pub lambda_closed: f64,
    /// Exact-projection fidelity.
    pub lambda_oracle: f64,
    /// λ from a simulated purification; `None` when not requested or off-family.
    pub lambda_numeric: Option<f64>,
    pub off_family: bool,
    pub s_max_closed: f64,
    pub violation_closed: bool,
    pub s_max_numeric: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourPoint {
    pub rounds: u32,
    /// `|α̃|` where the reference fidelity equals `1/√2`.
    pub alpha_closed: f64,
    pub alpha_oracle: f64,
}

impl ContourPoint {
    pub fn product_closed(&self) -> f64 {
        self.rounds as f64 * self.alpha_closed * self.alpha_closed
    }

    pub fn product_oracle(&self) -> f64 {
        self.rounds as f64 * self.alpha_oracle * self.alpha_oracle
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellSurface {
    pub cells: Vec<SurfaceCell>,
    pub contour: Vec<ContourPoint>,
}

/// Root of an increasing function on `[lo, hi]` by bisection.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    if f(lo) > 0.0 || f(hi) < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "no sign change on [{lo}, {hi}]"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.max(1.0) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// λ on the grid `alpha_grid × n_grid`, plus the `λ = 1/√2` contour per `N`.
///
/// With `numeric` set, each `|α̃|` is simulated in steady-state mode (coupling
/// `|α̃|κ`, other settings taken from `numeric`) for `max(n_grid)` rounds.
pub fn bell_surface(
    alpha_grid: &[f64],
    n_grid: &[u32],
    numeric: Option<&ProtocolParams>,
) -> Result<BellSurface> {
    if alpha_grid.iter().any(|a| !(*a >= 0.0)) || n_grid.contains(&0) {
        return Err(Error::InvalidArgument(
            "grid needs |α̃| ≥ 0 and N ≥ 1".into(),
        ));
    }
    let n_top = n_grid.iter().copied().max().unwrap_or(1);
    let mut cells = Vec::with_capacity(alpha_grid.len() * n_grid.len());
    for &alpha in alpha_grid {
        let sim = match numeric {
            Some(base) => {
                let kappa = base.effective.kappa;
                let effective =
                    EffectiveParams::new(alpha * kappa, 0.0, kappa, base.effective.coupling_signs)?;
                let p = ProtocolParams {
                    effective,
                    rounds: n_top,
                    mode: Mode::SteadyState,
                    ..base.clone()
                };
                Some(purify(&p)?)
            }
            None => None,
        };
        for &n in n_grid {
            let lambda_closed = closed_form_fidelity(n, alpha);
            let closed = chsh_max(&gisin_state(lambda_closed, false)?)?;
            let record = sim.as_ref().map(|r| &r.rounds[n as usize - 1]);
            cells.push(SurfaceCell {
                alpha,
                rounds: n,
                lambda_closed,
                lambda_oracle: oracle_fidelity(n, alpha),
                lambda_numeric: record.and_then(|r| r.lambda),
                off_family: record.is_some_and(|r| r.lambda.is_none()),
                s_max_closed: closed.s_max,
                violation_closed: closed.violation,
                s_max_numeric: record.map(|r| r.s_max),
            });
        }
    }
    let mut contour = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let alpha_closed = bisect(|a| closed_form_fidelity(n, a) - FRAC_1_SQRT_2, 0.0, 10.0)?;
        let alpha_oracle = bisect(|a| oracle_fidelity(n, a) - FRAC_1_SQRT_2, 0.0, 10.0)?;
        contour.push(ContourPoint {
            rounds: n,
            alpha_closed,
            alpha_oracle,
        });
    }
    Ok(BellSurface { cells, contour })
}

/// λ where the CHSH maximum of the λ family crosses 2, by bisection.
pub fn family_threshold(opposite_phase: bool) -> Result<f64> {
    let s = |l: f64| {
        chsh_max(&gisin_state(l, opposite_phase).expect("λ in range")).map(|r| r.s_max - 2.0)
    };
    // S is increasing on [1/2, 1]
    let mut lo = 0.5;
    let mut hi = 1.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if s(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
