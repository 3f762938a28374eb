use num_complex::Complex64;
use serde::Serialize;

use super::coexistence::level_tol;
use crate::error::{Error, Result};
use crate::model::{Grid, ModelSpec};

/// Relative tolerance for membership in the stable set of a multiple point.
pub const TOL_MP: f64 = 1e-9;

/// One end of a coexistence curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArcEnd {
    pub curve: usize,
    /// `false` for the first sample, `true` for the last.
    pub at_finish: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplePoint {
    pub z: Complex64,
    pub stable_set: Vec<usize>,
    pub v_values: Vec<(usize, Complex64)>,
    pub incident_arcs: Vec<ArcEnd>,
}

impl MultiplePoint {
    pub(crate) fn at(model: &ModelSpec, z: Complex64) -> Self {
        let stable_set = stable_set_mp(model, z);
        let v_values = stable_set.iter().map(|&m| (m, model.v_unchecked(m, z))).collect();
        MultiplePoint {
            z,
            stable_set,
            v_values,
            incident_arcs: Vec::new(),
        }
    }

    pub fn v(&self, m: usize) -> Option<Complex64> {
        self.v_values.iter().find(|(k, _)| *k == m).map(|(_, v)| *v)
    }
}

pub(crate) fn stable_set_mp(model: &ModelSpec, z: Complex64) -> Vec<usize> {
    let a = model.log_moduli(z);
    let lm = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tol = TOL_MP * lm.abs().max(1.0);
    (0..a.len()).filter(|&m| a[m] >= lm - tol).collect()
}

/// Solves `Re P_m = Re P_n = Re P_k` by two-dimensional Newton from `seed`.
pub fn find_multiple_point(model: &ModelSpec, triple: [usize; 3], seed: Complex64) -> Result<MultiplePoint> {
    let r = model.num_phases();
    let [m, n, k] = triple;
    if triple.iter().any(|&i| i >= r) || m == n || m == k || n == k {
        return Err(Error::Argument(format!("invalid phase triple {triple:?}")));
    }
    model.require_in_domain(seed)?;
    let mut z = seed;
    let mut converged = false;
    for _ in 0..50 {
        let (f1, a) = model.pair_level(m, n, z);
        let (f2, b) = model.pair_level(m, k, z);
        let tol = level_tol(model.log_zeta_unchecked(m, z).re);
        if f1.abs() <= tol && f2.abs() <= tol {
            converged = true;
            break;
        }
        // Rows are grad Re h = (Re h', -Im h').
        let (j11, j12, j21, j22) = (a.re, -a.im, b.re, -b.im);
        let det = j11 * j22 - j12 * j21;
        if det.abs() <= 1e-12 * a.norm() * b.norm() || !det.is_finite() {
            return Err(Error::SingularJacobian { z });
        }
        let dx = (-f1 * j22 + f2 * j12) / det;
        let dy = (-j11 * f2 + j21 * f1) / det;
        z += Complex64::new(dx, dy);
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NoConvergence { last: z, iterations: 0 });
        }
    }
    if !converged {
        return Err(Error::NoConvergence { last: z, iterations: 50 });
    }
    let mp = MultiplePoint::at(model, z);
    if let Some(&missing) = triple.iter().find(|i| !mp.stable_set.contains(i)) {
        return Err(Error::SpuriousRoot { z, missing });
    }
    model.require_in_domain(z)?;
    Ok(mp)
}

/// Outcome of a grid-driven multiple-point search.
#[derive(Clone, Debug, Default)]
pub struct MultiplePointSearch {
    pub points: Vec<MultiplePoint>,
    /// Locations where the transversality Jacobian was singular.
    pub singular: Vec<(Complex64, [usize; 3])>,
}

fn push_unique(points: &mut Vec<MultiplePoint>, mp: MultiplePoint) {
    if !points.iter().any(|p| (p.z - mp.z).norm() < 1e-8) {
        points.push(mp);
    }
}

/// Seeds `find_multiple_point` from every 2x2 block of grid cells whose
/// corners are dominated by at least three distinct phases.
pub fn locate_multiple_points(model: &ModelSpec, grid: &Grid) -> MultiplePointSearch {
    let mut out = MultiplePointSearch::default();
    if grid.nx < 3 || grid.ny < 3 {
        return out;
    }
    let dominant: Vec<Vec<usize>> = grid.points().map(|z| stable_set_mp(model, z)).collect();
    let at = |i: usize, j: usize| &dominant[j * grid.nx + i];
    for j in 0..grid.ny - 2 {
        for i in 0..grid.nx - 2 {
            let mut union: Vec<usize> = Vec::new();
            for dj in 0..3 {
                for di in 0..3 {
                    for &m in at(i + di, j + dj) {
                        if !union.contains(&m) {
                            union.push(m);
                        }
                    }
                }
            }
            if union.len() < 3 {
                continue;
            }
            union.sort_unstable();
            let center = grid.point(i + 1, j + 1);
            let reach = 2.0 * grid.spacing();
            for a in 0..union.len() {
                for b in a + 1..union.len() {
                    for c in b + 1..union.len() {
                        let triple = [union[a], union[b], union[c]];
                        match find_multiple_point(model, triple, center) {
                            Ok(mp) if (mp.z - center).norm() <= reach => push_unique(&mut out.points, mp),
                            Err(Error::SingularJacobian { .. }) => out.singular.push((center, triple)),
                            _ => {}
                        }
                    }
                }
            }
        }
    }
    out.points.sort_by(|p, q| p.z.re.total_cmp(&q.z.re).then(p.z.im.total_cmp(&q.z.im)));
    out
}
