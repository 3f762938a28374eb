use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::coexistence::{level_tol, pair_level, solve_on_segment};
use super::multiple::{find_multiple_point, stable_set_mp, ArcEnd, MultiplePoint};
use super::trace::{intruder, sample, trace_curve, CoexistenceCurve, Termination};
use crate::model::{Grid, ModelSpec};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiagramOptions {
    pub step: f64,
    pub max_steps: usize,
}

impl DiagramOptions {
    /// Step `10^-2 * min(domain side)` and enough steps to cross the domain
    /// several times.
    pub fn for_model(model: &ModelSpec) -> Self {
        let d = model.domain();
        let step = 1e-2 * d.width().min(d.height());
        let perimeter = 2.0 * (d.width() + d.height());
        DiagramOptions {
            step,
            max_steps: (4.0 * perimeter / step).ceil() as usize,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum TopologyDiagnostic {
    ArcCountMismatch {
        multiple_point: usize,
        expected: usize,
        found: usize,
    },
    UnresolvedMultiplePoint {
        seed: Complex64,
        phases: [usize; 3],
        reason: String,
    },
    DetachedEnd {
        curve: usize,
        multiple_point: usize,
        gap: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseDiagram {
    pub curves: Vec<CoexistenceCurve>,
    pub multiple_points: Vec<MultiplePoint>,
    /// Minimal pairwise angle between incident arcs, per multiple point.
    pub min_angles: Vec<f64>,
    pub diagnostics: Vec<TopologyDiagnostic>,
}

impl PhaseDiagram {
    pub fn min_angle(&self) -> Option<f64> {
        self.min_angles.iter().copied().reduce(f64::min)
    }

    /// Unit tangent of every incident arc at a multiple point, pointing into
    /// the arc.
    pub fn incident_directions(&self, model: &ModelSpec, mp: usize) -> Vec<Complex64> {
        let point = &self.multiple_points[mp];
        point
            .incident_arcs
            .iter()
            .map(|end| {
                let curve = &self.curves[end.curve];
                let (m, n) = curve.pair;
                let g = model.v_unchecked(m, point.z) - model.v_unchecked(n, point.z);
                let d = Complex64::i() * g.conj() / g.norm();
                let k = curve.samples.len();
                let inner = if end.at_finish {
                    curve.samples[k.saturating_sub(2)].z
                } else {
                    curve.samples[1.min(k - 1)].z
                };
                if ((inner - point.z) * d.conj()).re >= 0.0 {
                    d
                } else {
                    -d
                }
            })
            .collect()
    }
}

fn seeds_for_pair(model: &ModelSpec, grid: &Grid, m: usize, n: usize) -> Vec<Complex64> {
    let level = pair_level(model, m, n);
    let values: Vec<f64> = grid.points().map(|z| level(z).0).collect();
    let at = |i: usize, j: usize| values[j * grid.nx + i];
    let mut seeds = Vec::new();
    let mut try_edge = |a: (usize, usize), b: (usize, usize)| {
        let (fa, fb) = (at(a.0, a.1), at(b.0, b.1));
        if fa == 0.0 || fa.signum() != fb.signum() {
            let (za, zb) = (grid.point(a.0, a.1), grid.point(b.0, b.1));
            let tol = level_tol(model.log_zeta_unchecked(m, za).re);
            if let Ok(z) = solve_on_segment(&level, za, zb, 0.0, tol) {
                let q = stable_set_mp(model, z);
                if q.contains(&m) && q.contains(&n) && intruder(model, m, n, z).is_none() {
                    seeds.push(z);
                }
            }
        }
    };
    for j in 0..grid.ny {
        for i in 0..grid.nx {
            if i + 1 < grid.nx {
                try_edge((i, j), (i + 1, j));
            }
            if j + 1 < grid.ny {
                try_edge((i, j), (i, j + 1));
            }
        }
    }
    seeds
}

fn trace_pair(model: &ModelSpec, grid: &Grid, m: usize, n: usize, opts: &DiagramOptions) -> Vec<CoexistenceCurve> {
    let mut curves: Vec<CoexistenceCurve> = Vec::new();
    for seed in seeds_for_pair(model, grid, m, n) {
        if curves.iter().any(|c| c.distance_to(seed) < opts.step) {
            continue;
        }
        let Ok(curve) = trace_curve(model, m, n, seed, opts.step, opts.max_steps) else {
            continue;
        };
        if curve.samples.len() < 2 {
            continue;
        }
        if curves.iter().any(|c| c.hausdorff(&curve) < opts.step) {
            continue;
        }
        curves.push(curve);
    }
    curves
}

fn pairwise_min_angle(dirs: &[Complex64]) -> f64 {
    let mut best = std::f64::consts::PI;
    for a in 0..dirs.len() {
        for b in a + 1..dirs.len() {
            let cos = (dirs[a] * dirs[b].conj()).re.clamp(-1.0, 1.0);
            best = best.min(cos.acos());
        }
    }
    best
}

/// Seeds curves from sign changes of `Re(P_m - P_n)` along grid edges,
/// traces and deduplicates them, then resolves and attaches multiple points.
pub fn build_phase_diagram(model: &ModelSpec, grid: &Grid, opts: &DiagramOptions) -> PhaseDiagram {
    let r = model.num_phases();
    let pairs: Vec<(usize, usize)> = (0..r).flat_map(|m| (m + 1..r).map(move |n| (m, n))).collect();
    let mut curves: Vec<CoexistenceCurve> = pairs
        .par_iter()
        .map(|&(m, n)| trace_pair(model, grid, m, n, opts))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();

    let mut multiple_points: Vec<MultiplePoint> = Vec::new();
    let mut diagnostics = Vec::new();
    for ci in 0..curves.len() {
        for side in 0..2 {
            let Termination::MultiplePointSeed { phase, seed } = curves[ci].ends[side] else {
                continue;
            };
            let (m, n) = curves[ci].pair;
            let triple = [m, n, phase];
            let mp = match find_multiple_point(model, triple, seed) {
                Ok(mp) => mp,
                Err(e) => {
                    diagnostics.push(TopologyDiagnostic::UnresolvedMultiplePoint {
                        seed,
                        phases: triple,
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            let idx = match multiple_points.iter().position(|p| (p.z - mp.z).norm() < 1e-8) {
                Some(i) => i,
                None => {
                    multiple_points.push(mp);
                    multiple_points.len() - 1
                }
            };
            let z_m = multiple_points[idx].z;
            let curve = &mut curves[ci];
            let end_z = if side == 0 {
                curve.samples[0].z
            } else {
                curve.samples[curve.samples.len() - 1].z
            };
            let gap = (end_z - z_m).norm();
            if gap > 2.0 * curve.step {
                diagnostics.push(TopologyDiagnostic::DetachedEnd {
                    curve: ci,
                    multiple_point: idx,
                    gap,
                });
                continue;
            }
            let s = sample(model, m, n, z_m);
            if side == 0 {
                curve.samples.insert(0, s);
            } else {
                curve.samples.push(s);
            }
            curve.ends[side] = Termination::MultiplePoint(idx);
            curve.retime();
            multiple_points[idx].incident_arcs.push(ArcEnd {
                curve: ci,
                at_finish: side == 1,
            });
        }
    }

    let mut diagram = PhaseDiagram {
        curves,
        multiple_points,
        min_angles: Vec::new(),
        diagnostics,
    };
    for i in 0..diagram.multiple_points.len() {
        let expected = diagram.multiple_points[i].stable_set.len();
        let found = diagram.multiple_points[i].incident_arcs.len();
        if expected != found {
            diagram.diagnostics.push(TopologyDiagnostic::ArcCountMismatch {
                multiple_point: i,
                expected,
                found,
            });
        }
        let dirs = diagram.incident_directions(model, i);
        diagram.min_angles.push(pairwise_min_angle(&dirs));
    }
    diagram
}
