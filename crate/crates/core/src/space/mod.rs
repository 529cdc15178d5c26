//! Finite-dimensional state and operator algebra for two qubits tensored
//! with a truncated bosonic mode.
//!
//! Basis conventions are fixed crate-wide: qubit index 0 is `|g⟩`, index 1 is
//! `|e⟩`, and composite indices are row-major over `(atom 1, atom 2, field)`.

mod basis;
mod operator;
mod signature;
mod state;

pub use basis::{
    annihilation, coherent_state, creation, default_n_max, fock, number, phi_plus,
    plus_minus_basis, poisson_tail, psi_plus, qubit_excited, qubit_ground, sigma_minus, sigma_plus,
    sigma_x, sigma_x_product_basis, sigma_y, sigma_z, vacuum, CoherentState, TRUNCATION_TOL,
};
pub use operator::{hermitian_eigenvalues, CMatrix, CVector, Operator};
pub use signature::SpaceSignature;
pub use state::{DensityState, PureState, Tolerances, NORM_TOL};

use num_complex::Complex64;

use crate::error::{Error, Result};
use state::check_sig;

/// Kronecker composition of a list of same-kind factors.
pub trait Tensor: Sized {
    fn tensor_pair(&self, rhs: &Self) -> Self;
}

impl Tensor for Operator {
    fn tensor_pair(&self, rhs: &Self) -> Self {
        let sig = self.signature().concat(rhs.signature());
        Operator::new(sig, self.matrix().kronecker(rhs.matrix())).expect("kronecker dims match")
    }
}

impl Tensor for PureState {
    fn tensor_pair(&self, rhs: &Self) -> Self {
        let sig = self.signature().concat(rhs.signature());
        let v = self.amplitudes().kronecker(rhs.amplitudes());
        // product of unit vectors stays within the norm tolerance
        PureState::normalized(sig, v).expect("non-zero product")
    }
}

impl Tensor for DensityState {
    fn tensor_pair(&self, rhs: &Self) -> Self {
        let sig = self.signature().concat(rhs.signature());
        DensityState::from_raw(sig, self.matrix().kronecker(rhs.matrix()))
    }
}

/// Kronecker product of `items` in order; the signature is the concatenation.
///
/// Mixing kinds (operator with state) is ruled out by the type parameter.
pub fn tensor<T: Tensor + Clone>(items: &[T]) -> Result<T> {
    let (first, rest) = items
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("tensor of an empty list".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, x| acc.tensor_pair(x)))
}

/// Reduced state on the subsystems listed in `keep` (ascending order enforced).
pub fn partial_trace(state: &DensityState, keep: &[usize]) -> Result<DensityState> {
    let sig = state.signature();
    if keep.is_empty() {
        return Err(Error::InvalidArgument(
            "partial trace must keep at least one subsystem".into(),
        ));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if let Some(&bad) = kept.iter().find(|&&k| k >= sig.len()) {
        return Err(Error::InvalidSubsystem {
            index: bad,
            signature: sig.clone(),
        });
    }
    let traced: Vec<usize> = (0..sig.len()).filter(|k| !kept.contains(k)).collect();
    let kept_sig = sig.select(&kept)?;
    let traced_dims: Vec<usize> = traced.iter().map(|&k| sig.dims()[k]).collect();
    let traced_total: usize = traced_dims.iter().product();

    let d = sig.total_dim();
    // (kept index, traced index) for every composite index
    let split: Vec<(usize, usize)> = (0..d)
        .map(|i| {
            let digits = sig.digits(i);
            let k = kept
                .iter()
                .fold(0, |acc, &s| acc * sig.dims()[s] + digits[s]);
            let t = traced
                .iter()
                .fold(0, |acc, &s| acc * sig.dims()[s] + digits[s]);
            (k, t)
        })
        .collect();
    let mut by_traced: Vec<Vec<(usize, usize)>> = vec![Vec::new(); traced_total.max(1)];
    for (i, &(k, t)) in split.iter().enumerate() {
        by_traced[t].push((i, k));
    }
    let dk = kept_sig.total_dim();
    let mut out = CMatrix::zeros(dk, dk);
    let m = state.matrix();
    for group in &by_traced {
        for &(j, kj) in group {
            for &(i, ki) in group {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(DensityState::from_raw(kept_sig, out))
}

/// `⟨target|ρ|target⟩`.
pub fn fidelity_pure(target: &PureState, state: &DensityState) -> Result<f64> {
    check_sig(target.signature(), state.signature())?;
    let f = state.overlap(target)?;
    debug_assert!(
        f.im.abs() <= 1e-12 * f.norm().max(1.0),
        "fidelity imaginary residue {}",
        f.im
    );
    Ok(f.re)
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &DensityState, b: &DensityState) -> Result<f64> {
    check_sig(a.signature(), b.signature())?;
    Ok(0.5 * trace_norm(&(a.matrix() - b.matrix())))
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).iter().map(|e| e.abs()).sum()
}

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
