//! Post-selected purification by repeated no-photon detection, its closed
//! forms, Bell analysis, detector model and robustness sweeps.

mod bell;
mod closed_form;
mod detector;
mod localization;
mod projection;
mod purify;
mod surface;

pub use bell::{
    brute_force_chsh, chsh_max, correlation_matrix, family_lambda, gisin_state, BellReport,
    FAMILY_TOL,
};
pub use closed_form::{
    closed_form_fidelity, closed_form_success, closed_form_threshold, oracle_fidelity,
    oracle_round_probability, oracle_success, oracle_threshold, pointer_exponent,
};
pub use detector::{cell_rng, classify_detection, Branch, Detection, DetectorModel, Verdict};
pub use localization::{
    fit_power_law, localization_sweep, LocalizationParams, LocalizationReport, LocalizationRow,
    PowerLawFit, FIT_RANGE,
};
pub use projection::{project_vacuum, project_vacuum_with_floor, PROBABILITY_FLOOR};
pub(crate) use purify::sector_statistics;
pub use purify::{
    default_protocol_integrator, pointer_amplitude, purify, Mode, ProtocolParams,
    PurificationReport, RoundRecord,
};
pub use surface::{bell_surface, family_threshold, BellSurface, ContourPoint, SurfaceCell};

#[cfg(test)]
mod tests;
