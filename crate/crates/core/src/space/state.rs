use num_complex::Complex64;

use super::operator::{hermitian_eigenvalues, CMatrix, CVector, Operator};
use super::signature::SpaceSignature;
use crate::error::{Error, Result};

/// Norm tolerance for pure states.
pub const NORM_TOL: f64 = 1e-10;

/// Validity thresholds applied when a density matrix is constructed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub trace: f64,
    pub positivity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-10,
            trace: 1e-9,
            positivity: 1e-9,
        }
    }
}

impl Tolerances {
    /// Looser thresholds used on integrator output.
    pub fn integrator() -> Self {
        Self {
            hermitian: 1e-9,
            trace: 1e-8,
            positivity: 1e-8,
        }
    }
}

/// Unit-norm state vector over a tagged space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    signature: SpaceSignature,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(signature: SpaceSignature, amplitudes: CVector) -> Result<Self> {
        check_len(&signature, amplitudes.len())?;
        let deviation = (amplitudes.norm() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self {
            signature,
            amplitudes,
        })
    }

    /// Rescales `amplitudes` to unit norm; fails on the zero vector.
    pub fn normalized(signature: SpaceSignature, amplitudes: CVector) -> Result<Self> {
        check_len(&signature, amplitudes.len())?;
        let n = amplitudes.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidArgument(
                "cannot normalize a zero vector".into(),
            ));
        }
        Ok(Self {
            signature,
            amplitudes: amplitudes / Complex64::new(n, 0.0),
        })
    }

    /// Basis vector `|index⟩`.
    pub fn basis(signature: SpaceSignature, index: usize) -> Result<Self> {
        let d = signature.total_dim();
        if index >= d {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range {d}"
            )));
        }
        let mut v = CVector::zeros(d);
        v[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            signature,
            amplitudes: v,
        })
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        check_sig(&self.signature, &other.signature)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn projector(&self) -> DensityState {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityState {
            signature: self.signature.clone(),
            matrix: m,
        }
    }

    /// Expectation value `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        let v = op.apply(self)?;
        Ok(self.amplitudes.dotc(&v))
    }
}

/// Trace-one Hermitian positive semidefinite matrix over a tagged space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    signature: SpaceSignature,
    matrix: CMatrix,
}

impl DensityState {
    pub fn new(signature: SpaceSignature, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerances(signature, matrix, Tolerances::default())
    }

    pub fn with_tolerances(
        signature: SpaceSignature,
        matrix: CMatrix,
        tol: Tolerances,
    ) -> Result<Self> {
        let d = signature.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                signature,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let state = Self { signature, matrix };
        let herm = state.hermitian_residual();
        if herm > tol.hermitian {
            return Err(Error::InvalidDensity(format!(
                "Hermiticity residual {herm:e}"
            )));
        }
        let tr = state.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::InvalidDensity(format!("trace {tr}")));
        }
        let min_eig = state.min_eigenvalue();
        if min_eig < -tol.positivity {
            return Err(Error::InvalidDensity(format!(
                "minimum eigenvalue {min_eig:e}"
            )));
        }
        Ok(state)
    }

    /// Normalizes a positive operator by its trace, then validates.
    pub fn from_unnormalized(
        signature: SpaceSignature,
        matrix: CMatrix,
        tol: Tolerances,
    ) -> Result<Self> {
        let tr = matrix.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidDensity(format!("non-positive trace {tr:e}")));
        }
        Self::with_tolerances(signature, matrix / Complex64::new(tr, 0.0), tol)
    }

    pub(crate) fn from_raw(signature: SpaceSignature, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), signature.total_dim());
        Self { signature, matrix }
    }

    pub fn maximally_mixed(signature: &SpaceSignature) -> Self {
        let d = signature.total_dim();
        let m = CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0);
        Self {
            signature: signature.clone(),
            matrix: m,
        }
    }

    /// Convex mixture `Σ w_k ρ_k`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityState)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let sig = first.1.signature.clone();
        let d = sig.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, rho) in parts {
            check_sig(&sig, &rho.signature)?;
            if *w < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "negative mixture weight {w}"
                )));
            }
            m += &rho.matrix * Complex64::new(*w, 0.0);
        }
        Self::new(sig, m)
    }

    pub fn signature(&self) -> &SpaceSignature {
        &self.signature
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermitian_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..d {
            for i in 0..=j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `tr(ρ A)`.
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        check_sig(&self.signature, op.signature())?;
        let a = op.matrix();
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.matrix[(i, k)] * a[(k, i)];
            }
        }
        Ok(acc)
    }

    /// `⟨ψ|ρ|ψ⟩` without the fidelity range check.
    pub fn overlap(&self, psi: &PureState) -> Result<Complex64> {
        check_sig(&self.signature, psi.signature())?;
        let v = &self.matrix * psi.amplitudes();
        Ok(psi.amplitudes().dotc(&v))
    }
}

impl From<&PureState> for DensityState {
    fn from(psi: &PureState) -> Self {
        psi.projector()
    }
}

pub(crate) fn check_sig(a: &SpaceSignature, b: &SpaceSignature) -> Result<()> {
    if a != b {
        return Err(Error::SignatureMismatch {
            expected: a.clone(),
            found: b.clone(),
        });
    }
    Ok(())
}

fn check_len(signature: &SpaceSignature, len: usize) -> Result<()> {
    if signature.total_dim() != len {
        return Err(Error::DimensionMismatch {
            signature: signature.clone(),
            rows: len,
            cols: 1,
        });
    }
    Ok(())
}
