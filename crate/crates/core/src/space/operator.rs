use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::signature::SpaceSignature;
use super::state::PureState;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Dense complex matrix acting on a tagged tensor-product space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    signature: SpaceSignature,
    matrix: CMatrix,
}

impl Operator {
    pub fn new(signature: SpaceSignature, matrix: CMatrix) -> Result<Self> {
        let d = signature.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                signature,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(Self { signature, matrix })
    }

    pub fn zeros(signature: &SpaceSignature) -> Self {
        let d = signature.total_dim();
        Self {
            signature: signature.clone(),
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn identity(signature: &SpaceSignature) -> Self {
        let d = signature.total_dim();
        Self {
            signature: signature.clone(),
            matrix: CMatrix::identity(d, d),
        }
    }

    /// Operator on a single subsystem of dimension `dim`.
    pub fn local(matrix: CMatrix) -> Result<Self> {
        let sig = SpaceSignature::new(vec![matrix.nrows()])?;
        Self::new(sig, matrix)
    }

    /// Embeds a single-subsystem operator at `site` of `signature`, identity elsewhere.
    pub fn embed(local: &Operator, site: usize, signature: &SpaceSignature) -> Result<Self> {
        if site >= signature.len() {
            return Err(Error::InvalidSubsystem {
                index: site,
                signature: signature.clone(),
            });
        }
        if local.signature.len() != 1 || local.signature.dims()[0] != signature.dims()[site] {
            return Err(Error::SignatureMismatch {
                expected: signature.select(&[site])?,
                found: local.signature.clone(),
            });
        }
        let factors: Vec<Operator> = signature
            .dims()
            .iter()
            .enumerate()
            .map(|(k, &d)| {
                if k == site {
                    local.clone()
                } else {
                    Operator::identity(&SpaceSignature::new(vec![d]).expect("positive dim"))
                }
            })
            .collect();
        super::tensor(&factors)
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

    pub fn adjoint(&self) -> Self {
        Self {
            signature: self.signature.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            signature: self.signature.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    /// Largest entrywise modulus of `A - A†`.
    pub fn hermitian_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for j in 0..d {
            for i in 0..=j {
                let r = (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm();
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_residual() <= tol
    }

    pub fn apply(&self, psi: &PureState) -> Result<CVector> {
        self.check_same(psi.signature())?;
        Ok(&self.matrix * psi.amplitudes())
    }

    pub fn compose(&self, rhs: &Operator) -> Result<Operator> {
        self.check_same(&rhs.signature)?;
        Ok(Self {
            signature: self.signature.clone(),
            matrix: &self.matrix * &rhs.matrix,
        })
    }

    pub fn commutator(&self, rhs: &Operator) -> Result<Operator> {
        self.check_same(&rhs.signature)?;
        let m = &self.matrix * &rhs.matrix - &rhs.matrix * &self.matrix;
        Ok(Self {
            signature: self.signature.clone(),
            matrix: m,
        })
    }

    /// Eigenvalues of a Hermitian operator, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        if self.is_hermitian(1e-12) {
            return self
                .hermitian_eigenvalues()
                .iter()
                .fold(0.0_f64, |m, e| m.max(e.abs()));
        }
        let gram = self.matrix.adjoint() * &self.matrix;
        hermitian_eigenvalues(&gram)
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
            .sqrt()
    }

    pub(crate) fn check_same(&self, other: &SpaceSignature) -> Result<()> {
        if &self.signature != other {
            return Err(Error::SignatureMismatch {
                expected: self.signature.clone(),
                found: other.clone(),
            });
        }
        Ok(())
    }
}

/// Ascending eigenvalues of a Hermitian matrix; the anti-Hermitian part is ignored.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut evs: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    evs.sort_by(|a, b| a.total_cmp(b));
    evs
}

fn binary(lhs: &Operator, rhs: &Operator, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Operator {
    assert_eq!(
        lhs.signature, rhs.signature,
        "operator arithmetic on mismatched signatures"
    );
    Operator {
        signature: lhs.signature.clone(),
        matrix: f(&lhs.matrix, &rhs.matrix),
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        binary(self, rhs, |a, b| a + b)
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        binary(self, rhs, |a, b| a - b)
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        binary(self, rhs, |a, b| a * b)
    }
}

impl Neg for &Operator {
    type Output = Operator;
    fn neg(self) -> Operator {
        Operator {
            signature: self.signature.clone(),
            matrix: -&self.matrix,
        }
    }
}
