use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered list of subsystem dimensions describing a tensor-product space.
///
/// Composite basis indices are row-major over the subsystems, so the first
/// subsystem is the slowest-varying index. For the two-atom cavity problem the
/// order is always `(atom 1, atom 2, field)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSignature {
    dims: Vec<usize>,
}

impl SpaceSignature {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument(
                "signature needs at least one subsystem".into(),
            ));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "zero subsystem dimension in {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn qubit() -> Self {
        Self { dims: vec![2] }
    }

    pub fn two_qubits() -> Self {
        Self { dims: vec![2, 2] }
    }

    pub fn field(n_max: usize) -> Self {
        Self {
            dims: vec![n_max + 1],
        }
    }

    /// `atom ⊗ atom ⊗ field` with two-level atoms.
    pub fn atoms_field(n_max: usize) -> Self {
        Self {
            dims: vec![2, 2, n_max + 1],
        }
    }

    /// `atom ⊗ atom ⊗ field` with three-level (g, e, c) atoms.
    pub fn three_level_atoms_field(n_max: usize) -> Self {
        Self {
            dims: vec![3, 3, n_max + 1],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Field truncation, read off the last subsystem.
    pub fn n_max(&self) -> usize {
        self.dims[self.dims.len() - 1] - 1
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims }
    }

    /// Signature restricted to the given subsystems, in the order given.
    pub fn select(&self, keep: &[usize]) -> Result<Self> {
        let dims = keep
            .iter()
            .map(|&k| {
                self.dims
                    .get(k)
                    .copied()
                    .ok_or_else(|| Error::InvalidSubsystem {
                        index: k,
                        signature: self.clone(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dims)
    }

    /// Splits a composite index into per-subsystem digits.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&k, &d)| acc * d + k)
    }
}

impl fmt::Display for SpaceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_dimension() {
        assert!(SpaceSignature::new(vec![2, 0]).is_err());
        assert!(SpaceSignature::new(vec![]).is_err());
    }

    #[test]
    fn digits_round_trip() {
        let sig = SpaceSignature::atoms_field(4);
        assert_eq!(sig.total_dim(), 20);
        assert_eq!(sig.n_max(), 4);
        for i in 0..sig.total_dim() {
            assert_eq!(sig.index_of(&sig.digits(i)), i);
        }
        // atom 1 is the slowest index
        assert_eq!(sig.digits(10), vec![1, 0, 0]);
        assert_eq!(sig.digits(6), vec![0, 1, 1]);
    }
}
