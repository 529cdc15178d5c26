use num_complex::Complex64;

use crate::space::CMatrix;

/// Compressed-row complex matrix. Only used internally to speed up the
/// operator products inside the integrator right-hand sides.
#[derive(Clone, Debug)]
pub(crate) struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn from_dense(m: &CMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "square matrices only");
        let n = m.nrows();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    cols.push(j);
                    vals.push(z);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `out = self · x` for a dense `x` with `dim` rows.
    pub fn mul_dense_into(&self, x: &CMatrix, out: &mut CMatrix) {
        debug_assert_eq!(x.nrows(), self.n);
        debug_assert_eq!(out.shape(), x.shape());
        let n = self.n;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for (xc, oc) in xs.chunks_exact(n).zip(os.chunks_exact_mut(n)) {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[k] * xc[self.cols[k]];
                }
                oc[i] = acc;
            }
        }
    }

    /// `out += factor · self · x`.
    pub fn mul_dense_add(&self, factor: Complex64, x: &CMatrix, out: &mut CMatrix) {
        debug_assert_eq!(x.nrows(), self.n);
        let n = self.n;
        let xs = x.as_slice();
        let os = out.as_mut_slice();
        for (xc, oc) in xs.chunks_exact(n).zip(os.chunks_exact_mut(n)) {
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.vals[k] * xc[self.cols[k]];
                }
                oc[i] += factor * acc;
            }
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut dense = CMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                dense[(self.cols[k], i)] = self.vals[k].conj();
            }
        }
        Self::from_dense(&dense)
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }
}
