//! Numerical checks of positivity, non-degeneracy and convexity of a model.

use num_complex::Complex64;
use serde::Serialize;

use super::{Grid, ModelSpec};
use crate::diagram::{find_coexistence_point, level_tol, locate_multiple_points, solve_on_segment, stable_set_mp};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// `zeta` is not uniformly positive.
    Positivity,
    /// `|v_m - v_n|` falls below the reference `alpha`.
    NonDegeneracy,
    /// The `v_m` at a multiple point are not vertices of a strictly convex polygon.
    Convexity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub z: Complex64,
    pub kind: ViolationKind,
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexityResult {
    pub z: Complex64,
    pub stable_set: Vec<usize>,
    pub convex: bool,
    /// Minimal cross product of consecutive edges in counterclockwise order.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AssumptionReport {
    /// Minimum of `|v_m - v_n|` over sampled coexistence points; `None` if
    /// no coexistence point was found.
    pub alpha_estimate: Option<f64>,
    pub positivity_ok: bool,
    /// Minimum of `zeta` over the grid, and its logarithm.
    pub positivity_min: f64,
    pub log_positivity_min: f64,
    /// `(m, n, z, |v_m - v_n|)` for every sampled coexistence point.
    pub coexistence_samples: Vec<(usize, usize, Complex64, f64)>,
    pub convexity_results: Vec<ConvexityResult>,
    pub violations: Vec<Violation>,
}

/// Indices of `points` sorted counterclockwise by angle about their centroid.
pub(crate) fn ccw_order(points: &[Complex64]) -> Vec<usize> {
    let n = points.len() as f64;
    let centroid: Complex64 = points.iter().sum::<Complex64>() / n;
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| (points[a] - centroid).arg().total_cmp(&(points[b] - centroid).arg()));
    idx
}

/// Minimal cross product of consecutive edges after counterclockwise
/// ordering. Positive exactly when the points are the vertices of a
/// strictly convex polygon.
pub(crate) fn convexity_margin(points: &[Complex64]) -> f64 {
    if points.len() < 3 {
        return 0.0;
    }
    let order = ccw_order(points);
    let k = order.len();
    (0..k)
        .map(|i| {
            let a = points[order[i]];
            let b = points[order[(i + 1) % k]];
            let c = points[order[(i + 2) % k]];
            let (e1, e2) = (b - a, c - b);
            e1.re * e2.im - e1.im * e2.re
        })
        .fold(f64::INFINITY, f64::min)
}

pub(crate) fn is_strictly_convex(points: &[Complex64]) -> (bool, f64) {
    let margin = convexity_margin(points);
    let scale = points.iter().map(|p| p.norm_sqr()).fold(0.0, f64::max).max(1e-300);
    (margin > 1e-12 * scale, margin)
}

fn convexity_at(model: &ModelSpec, z: Complex64, q: Vec<usize>) -> ConvexityResult {
    let v: Vec<Complex64> = q.iter().map(|&m| model.v_unchecked(m, z)).collect();
    let (convex, margin) = is_strictly_convex(&v);
    ConvexityResult {
        z,
        stable_set: q,
        convex,
        margin,
    }
}

/// Samples the model on `grid` and checks positivity, the lower bound
/// `alpha` on `|v_m - v_n|` at coexistence points, and strict convexity at
/// multiple points.
pub fn check_assumption_a(model: &ModelSpec, grid: &Grid) -> Result<AssumptionReport> {
    if grid.nx < 4 || grid.ny < 4 {
        return Err(Error::Argument(format!(
            "sample grid needs at least 4 points per axis, got {}x{}",
            grid.nx, grid.ny
        )));
    }
    let log_pos_min = grid.points().map(|z| model.log_max(z)).fold(f64::INFINITY, f64::min);
    let positivity_min = log_pos_min.exp();
    let positivity_ok = log_pos_min.is_finite();
    let mut violations = Vec::new();
    if !positivity_ok {
        violations.push(Violation {
            z: grid.rect.center(),
            kind: ViolationKind::Positivity,
            margin: log_pos_min,
        });
    }

    let r = model.num_phases();
    let mut samples = Vec::new();
    let mut candidates: Vec<(Complex64, Vec<usize>)> = Vec::new();
    let add_candidate = |z: Complex64, q: Vec<usize>, c: &mut Vec<(Complex64, Vec<usize>)>| {
        if !c.iter().any(|(p, _)| (p - z).norm() < 1e-8) {
            c.push((z, q));
        }
    };
    for m in 0..r {
        for n in m + 1..r {
            let level = |z: Complex64| model.pair_level(m, n, z);
            let values: Vec<f64> = grid.points().map(|z| level(z).0).collect();
            let at = |i: usize, j: usize| values[j * grid.nx + i];
            for j in 0..grid.ny {
                for i in 0..grid.nx {
                    let mut edges = Vec::with_capacity(2);
                    if i + 1 < grid.nx {
                        edges.push((i + 1, j));
                    }
                    if j + 1 < grid.ny {
                        edges.push((i, j + 1));
                    }
                    for (i2, j2) in edges {
                        let (fa, fb) = (at(i, j), at(i2, j2));
                        if !(fa == 0.0 || fa.signum() != fb.signum()) {
                            continue;
                        }
                        let (za, zb) = (grid.point(i, j), grid.point(i2, j2));
                        let tol = level_tol(model.log_zeta_unchecked(m, za).re);
                        let Ok(z) = solve_on_segment(&level, za, zb, 0.0, tol) else {
                            continue;
                        };
                        let q = stable_set_mp(model, z);
                        if !(q.contains(&m) && q.contains(&n)) {
                            continue;
                        }
                        let gap = (model.v_unchecked(m, z) - model.v_unchecked(n, z)).norm();
                        samples.push((m, n, z, gap));
                        if q.len() >= 3 {
                            add_candidate(z, q, &mut candidates);
                        }
                    }
                }
            }
        }
    }

    let search = locate_multiple_points(model, grid);
    for mp in &search.points {
        add_candidate(mp.z, mp.stable_set.clone(), &mut candidates);
    }
    for &(seed, [m, n, _]) in &search.singular {
        if let Ok(z) = find_coexistence_point(model, m, n, seed) {
            let q = stable_set_mp(model, z);
            if q.len() >= 3 {
                add_candidate(z, q, &mut candidates);
            }
        }
    }

    let alpha_estimate = samples.iter().map(|s| s.3).reduce(f64::min);
    for &(_, _, z, gap) in &samples {
        if gap < model.alpha_ref() {
            violations.push(Violation {
                z,
                kind: ViolationKind::NonDegeneracy,
                margin: gap - model.alpha_ref(),
            });
        }
    }
    let convexity_results: Vec<ConvexityResult> = candidates
        .into_iter()
        .map(|(z, q)| convexity_at(model, z, q))
        .collect();
    for c in &convexity_results {
        if !c.convex {
            violations.push(Violation {
                z: c.z,
                kind: ViolationKind::Convexity,
                margin: c.margin,
            });
        }
    }
    Ok(AssumptionReport {
        alpha_estimate,
        positivity_ok,
        positivity_min,
        log_positivity_min: log_pos_min,
        coexistence_samples: samples,
        convexity_results,
        violations,
    })
}
