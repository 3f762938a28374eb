//! Vandermonde conditioning, the local Lee-Yang audit and the covering check.

mod covering;
mod lee_yang;
mod vandermonde;

pub use covering::{covering_check, CoveringReport};
pub use lee_yang::{lee_yang_audit, LeeYangReport, SYMMETRY_TOL};
pub use vandermonde::{
    hermitian_eigenvalues, lu_det, singular_values, vandermonde, vandermonde_report, VandermondeReport,
    NEAR_SINGULAR_GAP,
};
