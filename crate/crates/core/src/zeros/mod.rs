//! Zeros of the finite-volume partition function: brute-force location by
//! the argument principle, and the predicted zeros near coexistence curves
//! and multiple points.

mod contour;
mod eval;
mod matching;
mod predict;
mod region;

pub use contour::{winding_number, Contour};
pub use eval::eval_log_z_normalized;
pub use matching::{
    default_gamma, default_omega, default_rho, degeneracy_audit, delta_l, gamma_warnings, match_zeros,
    DegeneracyReport, DegeneracyViolation, MatchPair, MatchReport, DEFAULT_C_MATCH,
};
pub use predict::{asymptote_lines, predict_multipoint, predict_two_phase, predict_two_phase_in, rho_warnings, AsymptoteLine};
pub use region::{find_zeros_disc, find_zeros_region, Method, Zero, ZeroSet, DEFAULT_MAX_DEPTH};
