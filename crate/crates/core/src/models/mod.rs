//! Hamiltonians, dissipator and parameter regimes of the two-atom cavity model.

mod hamiltonians;
mod lindblad;
mod params;
mod regime;

pub use hamiltonians::{
    build_effective_hamiltonian, build_full_hamiltonian, build_interaction_hamiltonian,
    build_interaction_hamiltonian_with_couplings, effective_cavity_term, effective_drive_term,
    field_annihilation, full_hamiltonian_source, stark_counter_term, Drive, DrivenHamiltonian,
};
pub use lindblad::lindblad_rhs;
pub use params::{EffectiveParams, FullModelParams};
pub use regime::{check_regimes, RegimeEntry, RegimeGroup, RegimeReport, DEFAULT_STRICTNESS};
