use num_complex::Complex64;

use super::hamiltonians::field_annihilation;
use crate::error::Result;
use crate::space::{CMatrix, DensityState, Operator};

/// `dρ/dt = −i[H, ρ] − (κ/2)(a†aρ − 2aρa† + ρa†a)` with `a` acting on the last
/// subsystem. Dense reference implementation.
pub fn lindblad_rhs(h: &Operator, kappa: f64, rho: &DensityState) -> Result<CMatrix> {
    h.check_same(rho.signature())?;
    let a = field_annihilation(rho.signature())?;
    let a = a.matrix();
    let ad = a.adjoint();
    let n = &ad * a;
    let r = rho.matrix();
    let hm = h.matrix();
    let i = Complex64::new(0.0, 1.0);
    let k = Complex64::new(kappa / 2.0, 0.0);
    let comm = hm * r - r * hm;
    let diss = (&n * r - (a * r * &ad) * Complex64::new(2.0, 0.0) + r * &n) * k;
    Ok(-(comm * i) - diss)
}
