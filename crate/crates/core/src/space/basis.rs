use num_complex::Complex64;

use super::operator::{CMatrix, CVector, Operator};
use super::signature::SpaceSignature;
use super::state::PureState;
use super::{c, tensor};
use crate::error::{Error, Result};

/// Largest Poisson weight a truncated coherent state may discard.
pub const TRUNCATION_TOL: f64 = 1e-10;

/// Field cutoff keeping the Poisson tail of amplitude `max_amplitude` far below
/// `TRUNCATION_TOL`: `⌈|β|² + 8|β| + 10⌉`.
pub fn default_n_max(max_amplitude: f64) -> usize {
    let b = max_amplitude.abs();
    (b * b + 8.0 * b + 10.0).ceil() as usize
}

pub fn qubit_ground() -> PureState {
    PureState::basis(SpaceSignature::qubit(), 0).expect("index 0")
}

pub fn qubit_excited() -> PureState {
    PureState::basis(SpaceSignature::qubit(), 1).expect("index 1")
}

/// `(|+⟩, |−⟩)` with `|±⟩ = (|g⟩ ± |e⟩)/√2`.
pub fn plus_minus_basis() -> (PureState, PureState) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]);
    let minus = CVector::from_vec(vec![c(h, 0.0), c(-h, 0.0)]);
    (
        PureState::new(SpaceSignature::qubit(), plus).expect("unit"),
        PureState::new(SpaceSignature::qubit(), minus).expect("unit"),
    )
}

/// The four σx product states `|s₁ s₂⟩` with their eigenvalue pairs, ordered
/// `++, +−, −+, −−`.
pub fn sigma_x_product_basis() -> Vec<([i32; 2], PureState)> {
    let (p, m) = plus_minus_basis();
    let pick = |s: i32| if s > 0 { p.clone() } else { m.clone() };
    [[1, 1], [1, -1], [-1, 1], [-1, -1]]
        .into_iter()
        .map(|s| (s, tensor(&[pick(s[0]), pick(s[1])]).expect("two qubits")))
        .collect()
}

fn superpose(a: &PureState, b: &PureState) -> PureState {
    let v = (a.amplitudes() + b.amplitudes()) * c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    PureState::normalized(a.signature().clone(), v).expect("orthogonal sum")
}

/// `|Ψ⁺⟩ = (|−+⟩ + |+−⟩)/√2`, which is `(|gg⟩ − |ee⟩)/√2` in the g/e basis.
pub fn psi_plus() -> PureState {
    let (p, m) = plus_minus_basis();
    let mp = tensor(&[m.clone(), p.clone()]).expect("two qubits");
    let pm = tensor(&[p, m]).expect("two qubits");
    superpose(&mp, &pm)
}

/// `|Φ⁺⟩ = (|++⟩ + |−−⟩)/√2`, which is `(|gg⟩ + |ee⟩)/√2` in the g/e basis.
pub fn phi_plus() -> PureState {
    let (p, m) = plus_minus_basis();
    let pp = tensor(&[p.clone(), p]).expect("two qubits");
    let mm = tensor(&[m.clone(), m]).expect("two qubits");
    superpose(&pp, &mm)
}

fn qubit_op(entries: [[Complex64; 2]; 2]) -> Operator {
    let m = CMatrix::from_fn(2, 2, |i, j| entries[i][j]);
    Operator::local(m).expect("2x2")
}

/// `σ = |g⟩⟨e|`.
pub fn sigma_minus() -> Operator {
    let z = c(0.0, 0.0);
    qubit_op([[z, c(1.0, 0.0)], [z, z]])
}

/// `σ† = |e⟩⟨g|`.
pub fn sigma_plus() -> Operator {
    sigma_minus().adjoint()
}

/// `σx = |g⟩⟨e| + |e⟩⟨g|`.
pub fn sigma_x() -> Operator {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    qubit_op([[z, o], [o, z]])
}

pub fn sigma_y() -> Operator {
    let z = c(0.0, 0.0);
    qubit_op([[z, c(0.0, -1.0)], [c(0.0, 1.0), z]])
}

/// `σz = |g⟩⟨g| − |e⟩⟨e|` (index 0 carries eigenvalue +1).
pub fn sigma_z() -> Operator {
    let z = c(0.0, 0.0);
    qubit_op([[c(1.0, 0.0), z], [z, c(-1.0, 0.0)]])
}

/// Truncated lowering operator on Fock levels `0..=n_max`: `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(n_max: usize) -> Result<Operator> {
    if n_max < 1 {
        return Err(Error::InvalidArgument(format!(
            "n_max must be at least 1, got {n_max}"
        )));
    }
    let d = n_max + 1;
    let mut m = CMatrix::zeros(d, d);
    for n in 1..d {
        m[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    Operator::local(m)
}

pub fn creation(n_max: usize) -> Result<Operator> {
    Ok(annihilation(n_max)?.adjoint())
}

pub fn number(n_max: usize) -> Result<Operator> {
    let d = n_max + 1;
    let m = CMatrix::from_diagonal(&CVector::from_fn(d, |n, _| c(n as f64, 0.0)));
    Operator::local(m)
}

pub fn fock(n: usize, n_max: usize) -> Result<PureState> {
    PureState::basis(SpaceSignature::field(n_max), n)
}

pub fn vacuum(n_max: usize) -> PureState {
    fock(0, n_max).expect("vacuum always exists")
}

/// A coherent state truncated to `0..=n_max`, renormalized.
#[derive(Clone, Debug)]
pub struct CoherentState {
    pub state: PureState,
    /// Poisson weight beyond `n_max` that renormalization redistributed.
    pub discarded_weight: f64,
}

/// Poisson weight of `|α|²` beyond level `n_max`.
pub fn poisson_tail(mean: f64, n_max: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    let mut p = (-mean).exp();
    for n in 1..=n_max {
        p *= mean / n as f64;
    }
    let mut tail = 0.0;
    let mut n = n_max + 1;
    loop {
        p *= mean / n as f64;
        tail += p;
        if p < 1e-300 || (n as f64 > mean && p < tail * 1e-17) {
            break;
        }
        n += 1;
    }
    tail
}

/// `c_n = e^{−|α|²/2} αⁿ/√(n!)` on `0..=n_max`.
pub fn coherent_state(amplitude: Complex64, n_max: usize) -> Result<CoherentState> {
    coherent_state_with_tol(amplitude, n_max, TRUNCATION_TOL)
}

pub fn coherent_state_with_tol(
    amplitude: Complex64,
    n_max: usize,
    tol: f64,
) -> Result<CoherentState> {
    let mean = amplitude.norm_sqr();
    let tail = poisson_tail(mean, n_max);
    if tail > tol {
        return Err(Error::Truncation {
            tail,
            tolerance: tol,
            n_max,
        });
    }
    let d = n_max + 1;
    let mut v = CVector::zeros(d);
    let mut cn = c((-mean / 2.0).exp(), 0.0);
    v[0] = cn;
    for n in 1..d {
        cn = cn * amplitude / (n as f64).sqrt();
        v[n] = cn;
    }
    let state = PureState::normalized(SpaceSignature::field(n_max), v)?;
    Ok(CoherentState {
        state,
        discarded_weight: tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn annihilation_matrix_elements() {
        let a = annihilation(2).unwrap();
        let v = a.apply(&fock(1, 2).unwrap()).unwrap();
        assert_eq!(v, fock(0, 2).unwrap().amplitudes().clone());
        let v = a.apply(&vacuum(2)).unwrap();
        assert!(v.iter().all(|x| x.norm() == 0.0));
        let a5 = annihilation(5).unwrap();
        let v = a5.apply(&fock(3, 5).unwrap()).unwrap();
        assert_abs_diff_eq!(v[2].re, 3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.norm(), 3f64.sqrt(), epsilon = 1e-15);
        assert!(annihilation(0).is_err());
    }

    #[test]
    fn truncated_commutator() {
        // perfect-square cutoffs make the boundary entry exactly representable
        for n_max in [4usize, 9] {
            let a = annihilation(n_max).unwrap();
            let comm = a.commutator(&a.adjoint()).unwrap();
            for n in 0..=n_max {
                for m in 0..=n_max {
                    let z = comm.matrix()[(n, m)];
                    if n != m {
                        assert_eq!(z, c(0.0, 0.0));
                    } else if n < n_max {
                        assert_abs_diff_eq!(z.re, 1.0, epsilon = 4.0 * f64::EPSILON * n_max as f64);
                        assert_eq!(z.im, 0.0);
                    } else {
                        assert_eq!(z, c(-(n_max as f64), 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn coherent_state_examples() {
        let vac = coherent_state(c(0.0, 0.0), 7).unwrap();
        assert_eq!(vac.state, vacuum(7));
        assert_eq!(vac.discarded_weight, 0.0);

        let s = coherent_state(c(0.0, 2.0), 40).unwrap().state;
        assert_abs_diff_eq!(s.amplitudes()[0].norm_sqr(), (-4f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!((-4f64).exp(), 0.018316, epsilon = 1e-6);

        let s = coherent_state(c(1.5, 0.0), 40).unwrap().state;
        let n = s.expectation(&number(40).unwrap()).unwrap();
        assert_abs_diff_eq!(n.re, 2.25, epsilon = 1e-10);
        assert_abs_diff_eq!(s.amplitudes().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_state_rejects_short_truncation() {
        let err = coherent_state(c(3.0, 0.0), 10).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }));
    }

    #[test]
    fn default_cutoff_keeps_tail_small() {
        for amp in [0.5, 1.0, 2.0, 3.0, 4.0, 5.0] {
            let n = default_n_max(amp);
            assert!(poisson_tail(amp * amp, n) < 1e-10, "amp {amp}");
        }
        assert_eq!(default_n_max(2.0), 30);
        assert_eq!(default_n_max(3.0), 43);
    }

    #[test]
    fn plus_minus_examples() {
        let (p, m) = plus_minus_basis();
        assert_abs_diff_eq!(p.inner(&m).unwrap().norm(), 0.0, epsilon = 1e-15);
        let v = sigma_x().apply(&p).unwrap();
        assert_abs_diff_eq!((v - p.amplitudes()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn psi_plus_in_product_basis() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-h, 0.0)];
        for (a, b) in psi_plus().amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
        let expected = [c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)];
        for (a, b) in phi_plus().amplitudes().iter().zip(expected) {
            assert_abs_diff_eq!((a - b).norm(), 0.0, epsilon = 1e-15);
        }
    }
}
