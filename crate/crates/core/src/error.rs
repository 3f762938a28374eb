use num_complex::Complex64;

use crate::model::Rect;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("point {z} lies outside the admissible region: {reason}")]
    Domain { z: Complex64, reason: String },

    #[error("iteration did not converge after {iterations} steps (last iterate {last})")]
    NoConvergence { last: Complex64, iterations: usize },

    #[error("singular Jacobian at {z}: the coexistence conditions are not transversal")]
    SingularJacobian { z: Complex64 },

    #[error("spurious multiple point at {z}: phase {missing} is not stable there")]
    SpuriousRoot { z: Complex64, missing: usize },

    #[error("contour passes too close to a zero near {near}; jitter the contour")]
    ContourDegenerate { near: Complex64 },

    #[error("unresolved zero cluster in cell {cell} with winding number {winding}")]
    UnresolvedCluster { cell: Rect, winding: i64 },

    #[error("curve samples too sparse near t = {t}: phase jump {jump} >= pi")]
    Resolution { t: f64, jump: f64 },

    #[error("phase weights at {z} are not vertices of a strictly convex polygon (margin {margin})")]
    NotConvex { z: Complex64, margin: f64 },

    #[error("logarithmic derivatives of phases {first} and {second} nearly coincide at {z} (gap {gap})")]
    NearSingular {
        z: Complex64,
        first: usize,
        second: usize,
        gap: f64,
    },

    #[error("symmetry hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("disc of radius {radius} around {center} is not covered by the zero search region {region}")]
    Coverage {
        center: Complex64,
        radius: f64,
        region: Rect,
    },

    #[error("model file: {0}")]
    ModelFile(String),

    #[error("table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
