use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ode::{DormandPrince, Rhs, Rk4};
use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::models::{field_annihilation, DrivenHamiltonian};
use crate::space::{
    trace_norm, CMatrix, CVector, DensityState, Operator, PureState, SpaceSignature,
};

/// Largest allowed product of the time step and the generator's spectral radius estimate.
pub const STEP_LIMIT: f64 = 0.1;
/// Bound on norm or trace drift over a run.
pub const DRIFT_TOL: f64 = 1e-8;
/// Most negative eigenvalue tolerated in an integrated density matrix.
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Model-time spacing of residual checks in `find_steady_state`.
pub const CHECK_INTERVAL: f64 = 0.5;
// adaptive steps may grow up to this multiple of 1/radius (inside the stability region)
const ADAPTIVE_STABILITY: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Method {
    /// Classical fixed-step fourth-order Runge-Kutta.
    Rk4,
    /// Dormand-Prince 5(4) with error control; the first step obeys the same
    /// bound as `Rk4`.
    Adaptive { rtol: f64, atol: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Step size; `None` picks `STEP_LIMIT / radius`.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub method: Method,
    /// Record every `sample_stride`-th step; 0 keeps only the endpoints.
    pub sample_stride: usize,
    /// Trace norm of `dρ/dt` below which a state counts as stationary.
    pub steady_tol: f64,
    pub max_time: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            dt: None,
            t_final: 1.0,
            method: Method::Rk4,
            sample_stride: 0,
            steady_tol: 1e-8,
            max_time: 50.0,
        }
    }
}

impl IntegratorConfig {
    pub fn until(t_final: f64) -> Self {
        Self {
            t_final,
            ..Self::default()
        }
    }

    pub fn adaptive(mut self, rtol: f64, atol: f64) -> Self {
        self.method = Method::Adaptive { rtol, atol };
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidArgument(format!("dt must be > 0, got {dt}")));
            }
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "t_final must be ≥ 0, got {}",
                self.t_final
            )));
        }
        if !(self.steady_tol > 0.0) {
            return Err(Error::InvalidArgument("steady_tol must be > 0".into()));
        }
        if !(self.max_time > 0.0 && self.max_time.is_finite()) {
            return Err(Error::InvalidArgument("max_time must be > 0".into()));
        }
        if let Method::Adaptive { rtol, atol } = self.method {
            if !(rtol > 0.0 && atol > 0.0) {
                return Err(Error::InvalidArgument(
                    "adaptive tolerances must be > 0".into(),
                ));
            }
        }
        Ok(())
    }

    /// Step size for a generator with spectral radius estimate `radius`.
    fn step_for(&self, radius: f64, horizon: f64) -> Result<f64> {
        match self.dt {
            Some(dt) => {
                let product = dt * radius;
                if product > STEP_LIMIT * (1.0 + 1e-12) {
                    return Err(Error::StepSize {
                        product,
                        limit: STEP_LIMIT,
                    });
                }
                Ok(dt)
            }
            None if radius > 0.0 => Ok(STEP_LIMIT / radius),
            None => Ok(horizon.max(1e-3)),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Largest `|tr ρ(t) − tr ρ(0)|` seen at any step (master equation).
    pub trace_drift: f64,
    /// Largest `|‖ψ(t)‖ − 1|` seen at any step (Schrödinger equation).
    pub norm_drift: f64,
    /// Smallest eigenvalue over sampled density matrices (1 for pure runs).
    pub positivity_margin: f64,
    pub hermitian_residual: f64,
    pub steps: usize,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub final_state: S,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Debug)]
pub struct SteadyStateResult {
    pub state: DensityState,
    /// Trace norm of `dρ/dt` at the returned state.
    pub residual: f64,
    pub elapsed: f64,
    pub converged: bool,
    pub diagnostics: Diagnostics,
}

/// Sparse form of `−i H(t) ψ` for a driven Hamiltonian.
struct Schrodinger {
    static_part: SparseMatrix,
    drives: Vec<(SparseMatrix, SparseMatrix, f64)>,
}

impl Schrodinger {
    fn new(h: &DrivenHamiltonian) -> Self {
        let drives = h
            .drives
            .iter()
            .map(|d| {
                let x = SparseMatrix::from_dense(d.operator.matrix());
                let xd = x.adjoint();
                (x, xd, d.frequency)
            })
            .collect();
        Self {
            static_part: SparseMatrix::from_dense(h.static_part.matrix()),
            drives,
        }
    }
}

impl Rhs for Schrodinger {
    fn eval(&self, t: f64, y: &CMatrix, out: &mut CMatrix) {
        let mi = Complex64::new(0.0, -1.0);
        self.static_part.mul_dense_into(y, out);
        for (x, xd, w) in &self.drives {
            let phase = Complex64::from_polar(1.0, -w * t);
            x.mul_dense_add(phase, y, out);
            xd.mul_dense_add(phase.conj(), y, out);
        }
        for z in out.as_mut_slice() {
            *z *= mi;
        }
    }
}

fn pure_radius(h: &DrivenHamiltonian) -> f64 {
    h.static_part.spectral_norm()
        + h.drives
            .iter()
            .map(|d| 2.0 * d.operator.spectral_norm())
            .sum::<f64>()
}

/// Sparse Lindblad generator with cavity loss `√κ a` on the last subsystem:
/// `L ρ = −i H_eff ρ + i ρ H_eff† + κ a ρ a†`, `H_eff = H − (iκ/2) a†a`.
pub struct LindbladGenerator {
    signature: SpaceSignature,
    h_eff: SparseMatrix,
    jump: SparseMatrix,
    radius: f64,
    scratch: std::cell::RefCell<(CMatrix, CMatrix)>,
}

impl LindbladGenerator {
    pub fn new(h: &Operator, kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kappa must be ≥ 0, got {kappa}"
            )));
        }
        let sig = h.signature().clone();
        let a = field_annihilation(&sig)?;
        let n = a.adjoint().compose(&a)?;
        let h_eff = h.matrix() - n.matrix() * Complex64::new(0.0, kappa / 2.0);
        let jump = a.matrix() * Complex64::new(kappa.sqrt(), 0.0);
        let radius = 2.0 * h.spectral_norm() + kappa * sig.n_max() as f64;
        let d = sig.total_dim();
        Ok(Self {
            signature: sig,
            h_eff: SparseMatrix::from_dense(&h_eff),
            jump: SparseMatrix::from_dense(&jump),
            radius,
            scratch: std::cell::RefCell::new((CMatrix::zeros(d, d), CMatrix::zeros(d, d))),
        })
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    /// `2‖H‖ + κ n_max`, an upper bound on the generator's spectral radius.
    pub fn spectral_radius_estimate(&self) -> f64 {
        self.radius
    }

    /// `dρ/dt`, evaluated on the Hermitian part of `rho`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        self.eval(0.0, rho, &mut out);
        out
    }

    /// Trace norm of `dρ/dt`.
    pub fn residual(&self, rho: &DensityState) -> f64 {
        trace_norm(&self.apply(rho.matrix()))
    }
}

impl Rhs for LindbladGenerator {
    // Acts on the Hermitian part of `rho`, so roundoff anti-Hermitian parts
    // are carried along instead of being fed through the adjoint shortcuts.
    fn eval(&self, _t: f64, rho: &CMatrix, out: &mut CMatrix) {
        let d = self.h_eff.dim();
        let mut guard = self.scratch.borrow_mut();
        let (x, herm) = &mut *guard;
        let half = 0.5;
        for j in 0..d {
            for i in 0..d {
                herm[(i, j)] = (rho[(i, j)] + rho[(j, i)].conj()) * half;
            }
        }
        self.h_eff.mul_dense_into(herm, x);
        for j in 0..d {
            for i in 0..d {
                // −i X_ij + (−i X_ji)^*
                let a = x[(i, j)];
                let b = x[(j, i)];
                out[(i, j)] = Complex64::new(a.im + b.im, b.re - a.re);
            }
        }
        if self.jump.is_empty() {
            return;
        }
        self.jump.mul_dense_into(herm, x);
        // herm is no longer needed: reuse it for (J ρ)† = ρ J†
        for j in 0..d {
            for i in 0..d {
                herm[(i, j)] = x[(j, i)].conj();
            }
        }
        self.jump.mul_dense_add(Complex64::new(1.0, 0.0), herm, out);
    }
}

enum Stepper {
    Fixed(Rk4, f64),
    Adaptive(DormandPrince),
}

impl Stepper {
    fn new(
        cfg: &IntegratorConfig,
        shape: (usize, usize),
        radius: f64,
        horizon: f64,
    ) -> Result<Self> {
        let dt = cfg.step_for(radius, horizon)?;
        Ok(match cfg.method {
            Method::Rk4 => Stepper::Fixed(Rk4::new(shape.0, shape.1), dt),
            Method::Adaptive { rtol, atol } => {
                let h_max = if radius > 0.0 {
                    ADAPTIVE_STABILITY / radius
                } else {
                    f64::INFINITY
                };
                Stepper::Adaptive(DormandPrince::new(shape.0, shape.1, rtol, atol, dt, h_max))
            }
        })
    }

    /// Integrates from `t` to `t_end`, calling `on_step(t, y)` after each step.
    fn advance(
        &mut self,
        f: &impl Rhs,
        t: f64,
        t_end: f64,
        y: &mut CMatrix,
        mut on_step: impl FnMut(f64, &CMatrix),
    ) {
        match self {
            Stepper::Fixed(rk, dt) => {
                let span = t_end - t;
                if span <= 0.0 {
                    return;
                }
                let n = (span / *dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
                let h = span / n as f64;
                for i in 0..n {
                    let ti = t + i as f64 * h;
                    rk.step(f, ti, h, y);
                    on_step(if i + 1 == n { t_end } else { ti + h }, y);
                }
            }
            Stepper::Adaptive(dp) => {
                let mut tc = t;
                while t_end - tc > 1e-14 * t_end.abs().max(1.0) {
                    let h = dp.step(f, tc, t_end - tc, y);
                    tc += h;
                    on_step(tc, y);
                }
            }
        }
    }
}

/// Integrates the Schrödinger equation under a possibly driven Hamiltonian.
pub fn evolve_pure(
    h: &DrivenHamiltonian,
    psi0: &PureState,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult<PureState>> {
    cfg.validate()?;
    let sig = h.signature().clone();
    if psi0.signature() != &sig {
        return Err(Error::SignatureMismatch {
            expected: sig,
            found: psi0.signature().clone(),
        });
    }
    let f = Schrodinger::new(h);
    let d = sig.total_dim();
    let mut stepper = Stepper::new(cfg, (d, 1), pure_radius(h), cfg.t_final)?;
    let mut y = CMatrix::from_column_slice(d, 1, psi0.amplitudes().as_slice());

    let to_state = |y: &CMatrix| -> Result<PureState> {
        PureState::normalized(sig.clone(), CVector::from_column_slice(y.as_slice()))
    };
    let mut times = vec![0.0];
    let mut samples = vec![y.clone()];
    let mut diag = Diagnostics {
        positivity_margin: 1.0,
        ..Diagnostics::default()
    };
    let stride = cfg.sample_stride;
    stepper.advance(&f, 0.0, cfg.t_final, &mut y, |t, y| {
        diag.steps += 1;
        diag.norm_drift = diag.norm_drift.max((y.norm() - 1.0).abs());
        if stride > 0 && diag.steps.is_multiple_of(stride) {
            times.push(t);
            samples.push(y.clone());
        }
    });
    if diag.norm_drift > DRIFT_TOL {
        return Err(Error::Drift(format!(
            "norm drift {:.3e} exceeds {DRIFT_TOL:e}",
            diag.norm_drift
        )));
    }
    if times.last() != Some(&cfg.t_final) {
        times.push(cfg.t_final);
        samples.push(y.clone());
    }
    let states = samples.iter().map(to_state).collect::<Result<Vec<_>>>()?;
    Ok(EvolutionResult {
        times,
        final_state: to_state(&y)?,
        states,
        diagnostics: diag,
    })
}

fn check_density(rho0: &DensityState, sig: &SpaceSignature) -> Result<()> {
    if rho0.signature() != sig {
        return Err(Error::SignatureMismatch {
            expected: sig.clone(),
            found: rho0.signature().clone(),
        });
    }
    Ok(())
}

fn finish_density(
    y: &CMatrix,
    sig: &SpaceSignature,
    diag: &mut Diagnostics,
) -> Result<DensityState> {
    let state = DensityState::from_raw(sig.clone(), y.clone());
    diag.hermitian_residual = diag.hermitian_residual.max(state.hermitian_residual());
    diag.positivity_margin = diag.positivity_margin.min(state.min_eigenvalue());
    Ok(state)
}

fn check_master_diagnostics(diag: &Diagnostics) -> Result<()> {
    if diag.trace_drift > DRIFT_TOL {
        return Err(Error::Drift(format!(
            "trace drift {:.3e} exceeds {DRIFT_TOL:e}",
            diag.trace_drift
        )));
    }
    if diag.positivity_margin < -POSITIVITY_TOL {
        return Err(Error::Drift(format!(
            "minimum eigenvalue {:.3e} below {:e}",
            diag.positivity_margin, -POSITIVITY_TOL
        )));
    }
    Ok(())
}

/// Integrates the master equation with cavity loss at rate `kappa`.
pub fn evolve_master(
    h: &Operator,
    kappa: f64,
    rho0: &DensityState,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult<DensityState>> {
    cfg.validate()?;
    let gen = LindbladGenerator::new(h, kappa)?;
    evolve_with(&gen, rho0, cfg)
}

/// Master-equation evolution with a prebuilt generator.
pub fn evolve_with(
    gen: &LindbladGenerator,
    rho0: &DensityState,
    cfg: &IntegratorConfig,
) -> Result<EvolutionResult<DensityState>> {
    let sig = gen.signature().clone();
    check_density(rho0, &sig)?;
    let d = sig.total_dim();
    let mut stepper = Stepper::new(cfg, (d, d), gen.spectral_radius_estimate(), cfg.t_final)?;
    let mut y = rho0.matrix().clone();
    let tr0 = y.trace();
    let mut times = vec![0.0];
    let mut samples = vec![y.clone()];
    let mut diag = Diagnostics {
        positivity_margin: f64::INFINITY,
        ..Diagnostics::default()
    };
    let stride = cfg.sample_stride;
    stepper.advance(gen, 0.0, cfg.t_final, &mut y, |t, y| {
        diag.steps += 1;
        diag.trace_drift = diag.trace_drift.max((y.trace() - tr0).norm());
        if stride > 0 && diag.steps.is_multiple_of(stride) {
            times.push(t);
            samples.push(y.clone());
        }
    });
    if times.last() != Some(&cfg.t_final) {
        times.push(cfg.t_final);
        samples.push(y.clone());
    }
    let states = samples
        .iter()
        .map(|m| finish_density(m, &sig, &mut diag))
        .collect::<Result<Vec<_>>>()?;
    let final_state = states.last().cloned().expect("at least one sample");
    check_master_diagnostics(&diag)?;
    Ok(EvolutionResult {
        times,
        states,
        final_state,
        diagnostics: diag,
    })
}

/// Integrates the master equation until the trace norm of `dρ/dt` falls to
/// `cfg.steady_tol` or `cfg.max_time` elapses. Non-convergence is reported in
/// the result, not raised.
pub fn find_steady_state(
    h: &Operator,
    kappa: f64,
    rho0: &DensityState,
    cfg: &IntegratorConfig,
) -> Result<SteadyStateResult> {
    cfg.validate()?;
    let gen = LindbladGenerator::new(h, kappa)?;
    steady_state_with(&gen, rho0, cfg)
}

pub fn steady_state_with(
    gen: &LindbladGenerator,
    rho0: &DensityState,
    cfg: &IntegratorConfig,
) -> Result<SteadyStateResult> {
    let sig = gen.signature().clone();
    check_density(rho0, &sig)?;
    let d = sig.total_dim();
    let mut stepper = Stepper::new(cfg, (d, d), gen.spectral_radius_estimate(), CHECK_INTERVAL)?;
    let mut y = rho0.matrix().clone();
    let tr0 = y.trace();
    let mut diag = Diagnostics {
        positivity_margin: f64::INFINITY,
        ..Diagnostics::default()
    };
    let mut t = 0.0;
    let mut residual;
    loop {
        let rhs = gen.apply(&y);
        // the Frobenius norm bounds the trace norm from below, so the eigen
        // solve is only needed once it is already small
        residual = rhs.norm();
        if residual <= cfg.steady_tol {
            residual = trace_norm(&rhs);
            if residual <= cfg.steady_tol {
                break;
            }
        }
        if t >= cfg.max_time {
            residual = trace_norm(&rhs);
            break;
        }
        let t_next = (t + CHECK_INTERVAL).min(cfg.max_time);
        stepper.advance(gen, t, t_next, &mut y, |_, y| {
            diag.steps += 1;
            diag.trace_drift = diag.trace_drift.max((y.trace() - tr0).norm());
        });
        t = t_next;
    }
    let state = finish_density(&y, &sig, &mut diag)?;
    check_master_diagnostics(&diag)?;
    Ok(SteadyStateResult {
        converged: residual <= cfg.steady_tol,
        state,
        residual,
        elapsed: t,
        diagnostics: diag,
    })
}

/// `e^{−iHt}ψ₀` at each requested time by diagonalizing the time-independent `h`.
pub fn propagate_exact(h: &Operator, psi0: &PureState, times: &[f64]) -> Result<Vec<PureState>> {
    if !h.is_hermitian(1e-10) {
        return Err(Error::InvalidArgument(
            "exact propagation needs a Hermitian operator".into(),
        ));
    }
    if psi0.signature() != h.signature() {
        return Err(Error::SignatureMismatch {
            expected: h.signature().clone(),
            found: psi0.signature().clone(),
        });
    }
    let eig = h.matrix().clone().symmetric_eigen();
    let v = &eig.eigenvectors;
    let coeffs = v.adjoint() * psi0.amplitudes();
    times
        .iter()
        .map(|&t| {
            let rotated = CVector::from_fn(coeffs.len(), |k, _| {
                coeffs[k] * Complex64::from_polar(1.0, -eig.eigenvalues[k] * t)
            });
            PureState::normalized(h.signature().clone(), v * rotated)
        })
        .collect()
}
