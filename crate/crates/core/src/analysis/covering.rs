use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::locate_multiple_points;
use crate::error::{Error, Result};
use crate::model::{Grid, ModelSpec};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringReport {
    pub omega: f64,
    pub gamma: f64,
    pub rho: f64,
    /// Grid points in `G_{omega/N}`.
    pub points_checked: usize,
    /// Points of `G_{omega/N}` in no two-phase `U_gamma(Q)`.
    pub needing_disc: usize,
    /// Points covered neither by a two-phase region nor by a multiple-point disc.
    pub uncovered: Vec<Complex64>,
    pub multiple_points: Vec<Complex64>,
    /// Smallest `chi` such that discs of radius `chi * gamma` around the
    /// multiple points cover every point needing a disc; infinite if some
    /// such point has no multiple point nearby at all.
    pub chi_required: f64,
    pub rho_over_gamma: f64,
}

impl CoveringReport {
    pub fn fully_covered(&self) -> bool {
        self.uncovered.is_empty()
    }
}

/// Checks that every grid point in `G_{omega/N}` lies in some two-phase
/// `U_gamma(Q)` or within `rho` of a multiple point, with `N = L^d`.
#[allow(clippy::too_many_arguments)]
pub fn covering_check(model: &ModelSpec, l: u32, d: u32, omega: f64, gamma: f64, rho: f64, grid: &Grid) -> Result<CoveringReport> {
    if l == 0 || d == 0 {
        return Err(Error::Argument(format!("L and d must be positive, got L={l}, d={d}")));
    }
    if !(omega > 0.0 && gamma > 0.0 && rho >= 0.0) {
        return Err(Error::Argument(format!(
            "need omega > 0, gamma > 0, rho >= 0; got {omega}, {gamma}, {rho}"
        )));
    }
    let n = (l as f64).powi(d as i32);
    if omega > gamma * n {
        return Err(Error::Argument(format!(
            "omega = {omega} exceeds gamma N = {}",
            gamma * n
        )));
    }
    let mps: Vec<Complex64> = locate_multiple_points(model, grid).points.iter().map(|p| p.z).collect();
    let r = model.num_phases();
    let pairs: Vec<[usize; 2]> = (0..r).flat_map(|a| (a + 1..r).map(move |b| [a, b])).collect();
    let points: Vec<Complex64> = grid.points().collect();
    // For each point of G: None if a pair covers it, else the distance to
    // the nearest multiple point.
    let status: Vec<Option<Option<f64>>> = points
        .par_iter()
        .map(|&z| {
            if !model.in_g(z, omega / n) {
                return None;
            }
            if pairs.iter().any(|q| model.in_u(z, q, gamma)) {
                return Some(None);
            }
            Some(Some(mps.iter().map(|m| (m - z).norm()).fold(f64::INFINITY, f64::min)))
        })
        .collect();
    let mut report = CoveringReport {
        omega,
        gamma,
        rho,
        points_checked: 0,
        needing_disc: 0,
        uncovered: Vec::new(),
        multiple_points: mps,
        chi_required: 0.0,
        rho_over_gamma: rho / gamma,
    };
    for (z, s) in points.iter().zip(status) {
        let Some(s) = s else { continue };
        report.points_checked += 1;
        let Some(dist) = s else { continue };
        report.needing_disc += 1;
        report.chi_required = report.chi_required.max(dist / gamma);
        if !(dist < rho) {
            report.uncovered.push(*z);
        }
    }
    Ok(report)
}
