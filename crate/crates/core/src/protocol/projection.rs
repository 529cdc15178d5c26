use crate::error::{Error, Result};
use crate::space::{CMatrix, DensityState, Tolerances};

/// Smallest no-photon probability that is still renormalized.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Projects the field (last subsystem) onto the vacuum, traces it out and
/// renormalizes. Returns the atomic state and the no-photon probability.
pub fn project_vacuum(rho: &DensityState) -> Result<(DensityState, f64)> {
    project_vacuum_with_floor(rho, PROBABILITY_FLOOR)
}

pub fn project_vacuum_with_floor(rho: &DensityState, floor: f64) -> Result<(DensityState, f64)> {
    let sig = rho.signature();
    if sig.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need atoms and a field, got {sig}"
        )));
    }
    let df = sig.n_max() + 1;
    let keep: Vec<usize> = (0..sig.len() - 1).collect();
    let atoms_sig = sig.select(&keep)?;
    let da = atoms_sig.total_dim();
    let m = rho.matrix();
    let block = CMatrix::from_fn(da, da, |i, j| m[(i * df, j * df)]);
    let probability = block.trace().re;
    if !(probability >= floor) {
        return Err(Error::ProbabilityBelowFloor { probability, floor });
    }
    let state = DensityState::from_unnormalized(atoms_sig, block, Tolerances::integrator())?;
    Ok((state, probability))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{
        coherent_state, plus_minus_basis, psi_plus, tensor, trace_distance, vacuum,
    };
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    #[test]
    fn dark_state_passes_untouched() {
        let rho = tensor(&[psi_plus(), vacuum(5)]).unwrap().projector();
        let (atoms, p) = project_vacuum(&rho).unwrap();
        assert_abs_diff_eq!(p, 1.0, epsilon = 1e-14);
        assert!(trace_distance(&atoms, &psi_plus().projector()).unwrap() < 1e-14);
    }

    #[test]
    fn bright_branch_keeps_vacuum_overlap() {
        let (plus, _) = plus_minus_basis();
        let pp = tensor(&[plus.clone(), plus]).unwrap();
        let field = coherent_state(Complex64::new(0.0, 2.0), 30).unwrap().state;
        let rho = tensor(&[pp.clone(), field]).unwrap().projector();
        let (atoms, p) = project_vacuum(&rho).unwrap();
        assert_abs_diff_eq!(p, (-4.0f64).exp(), epsilon = 1e-12);
        assert!(trace_distance(&atoms, &pp.projector()).unwrap() < 1e-12);
    }

    #[test]
    fn outcome_probabilities_sum_to_one() {
        let field = coherent_state(Complex64::new(0.7, 0.2), 20).unwrap().state;
        let rho = tensor(&[psi_plus(), field]).unwrap().projector();
        let (_, p) = project_vacuum(&rho).unwrap();
        let df = 21;
        let complement: f64 = (0..rho.dim())
            .filter(|i| i % df != 0)
            .map(|i| rho.matrix()[(i, i)].re)
            .sum();
        assert_abs_diff_eq!(p + complement, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn empty_vacuum_support_is_an_error() {
        let field = crate::space::fock(2, 4).unwrap();
        let rho = tensor(&[psi_plus(), field]).unwrap().projector();
        assert!(matches!(
            project_vacuum(&rho),
            Err(Error::ProbabilityBelowFloor { .. })
        ));
    }
}
