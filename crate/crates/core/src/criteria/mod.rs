//! Ratio criteria at the critical points, class (S) tests, and nonreal eigenvalues.

mod classify;
mod decaying;
mod eigs;
mod ratio;
mod stieltjes;

pub use classify::{classify, herglotz_sample, ClassificationReport, ClassifyOptions};
pub use decaying::{classify_decaying, fit_near_zero, DecayCase, DecayingClassification, DecayingSide, FIT_TOL};
pub use eigs::{count_zeros, definitizing_poly, find_nonreal_eigs, NonrealEig, Rect};
pub use ratio::{
    grid_values, necessary_grid, necessary_ratio_scan, necessary_values, optimize_shift, optimize_shift_grid, ratio,
    ratio_values, scan_grid, scan_sup, verdict_for, CriticalPointVerdict, GridValues, RatioScanResult, RegionKind,
    ScanRegion, ScanSample, ShiftResult, DENOMINATOR_TOL,
};
pub use stieltjes::{j_nonneg_check, negative_grid, stieltjes_check, JNonnegVerdict, StieltjesVerdict, SIGN_TOL};
