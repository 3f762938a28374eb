//! Complex phase diagrams: coexistence curves and multiple points.

mod assemble;
mod coexistence;
mod multiple;
mod trace;

pub use assemble::{build_phase_diagram, DiagramOptions, PhaseDiagram, TopologyDiagnostic};
pub use coexistence::{find_coexistence_point, TOL_COEXIST};
pub use multiple::{find_multiple_point, locate_multiple_points, ArcEnd, MultiplePoint, MultiplePointSearch, TOL_MP};
pub use trace::{trace_curve, CoexistenceCurve, CurveSample, Termination, EPS_MP};

pub(crate) use coexistence::{level_tol, project_normal, solve_on_segment};
pub(crate) use multiple::stable_set_mp;
