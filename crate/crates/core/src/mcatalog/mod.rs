//! Closed-form and semi-closed-form m-coefficients.

mod closed;
mod decaying;
mod evaluator;
mod infzone;
mod periodic;
mod zone;

pub use closed::{a1_potential, m1_helper, m_example_a1, m_example_q0, m_free, m_power, power_constants, q0_potential};
pub use decaying::{ab_constants, m_decaying_ab, tail_radius, AbSample, TAIL_TOL};
pub use evaluator::{MEvaluator, MKind};
pub use infzone::{
    hgk_residual, infzone_case_a_constant, infzone_case_b_constants, m_infzone_report, m_infzone_truncated,
    summability_report, zone_functions, Band, BandRule, InfZoneValue, SummabilityReport, ZoneFunctions,
    ZoneSequenceData,
};
pub use periodic::{
    band_edge, case1_constant, lowest_band_edge, m_periodic, monodromy, periodic_shift, BandEdge, MonodromySample,
    PeriodicData,
};
pub use zone::{
    finitezone_build, m_finitezone, sqrt_r, zone_case_a_constant, zone_case_b_constants, ZoneData, ZonePolynomials,
};
