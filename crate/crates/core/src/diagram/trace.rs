//! Continuation of two-phase coexistence curves.
//!
//! A coexistence curve of phases `m` and `n` is a level curve of
//! `phi = Re(P_m - P_n)`. With `h = P_m - P_n` the unit tangent is
//! `i conj(h') / |h'|`, which is perpendicular to `grad phi = conj(h')`.
//! The tracer integrates `dz/dt` along that field with classical fourth-order
//! Runge-Kutta steps and projects each new point back onto the level curve
//! along the normal.

use num_complex::Complex64;
use serde::Serialize;

use super::coexistence::{level_tol, pair_level, project_normal};
use crate::error::{Error, Result};
use crate::model::ModelSpec;

/// A third phase within this distance of the maximum stops a trace and
/// seeds a multiple-point search.
pub const EPS_MP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    /// Arc length from the first sample.
    pub t: f64,
    pub z: Complex64,
    pub v_m: Complex64,
    pub v_n: Complex64,
}

impl CurveSample {
    /// Unit tangent `i conj(v_m - v_n) / |v_m - v_n|`.
    pub fn tangent(&self) -> Complex64 {
        let g = self.v_m - self.v_n;
        Complex64::i() * g.conj() / g.norm()
    }
}

/// Why one end of a curve stopped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Termination {
    DomainBoundary,
    /// Attached to `PhaseDiagram::multiple_points[index]`.
    MultiplePoint(usize),
    /// A third phase became almost stable; `seed` is the last two-phase
    /// sample and `phase` the intruding phase.
    MultiplePointSeed { phase: usize, seed: Complex64 },
    ClosedLoop,
    StepLimit,
    ProjectionFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoexistenceCurve {
    pub pair: (usize, usize),
    pub samples: Vec<CurveSample>,
    /// Termination at the first and at the last sample.
    pub ends: [Termination; 2],
    pub step: f64,
}

impl CoexistenceCurve {
    pub fn length(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.samples.iter().map(|s| s.z)
    }

    pub fn is_closed(&self) -> bool {
        self.ends[0] == Termination::ClosedLoop
    }

    /// Distance from `p` to the polyline through the samples.
    pub fn distance_to(&self, p: Complex64) -> f64 {
        match self.samples.len() {
            0 => f64::INFINITY,
            1 => (self.samples[0].z - p).norm(),
            _ => self
                .samples
                .windows(2)
                .map(|w| segment_distance(p, w[0].z, w[1].z))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Symmetric Hausdorff distance between the two sample sets.
    pub fn hausdorff(&self, other: &CoexistenceCurve) -> f64 {
        let directed = |a: &CoexistenceCurve, b: &CoexistenceCurve| {
            a.points()
                .map(|p| b.points().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        directed(self, other).max(directed(other, self))
    }

    pub(crate) fn retime(&mut self) {
        let mut t = 0.0;
        for i in 0..self.samples.len() {
            if i > 0 {
                t += (self.samples[i].z - self.samples[i - 1].z).norm();
            }
            self.samples[i].t = t;
        }
    }
}

pub(crate) fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = ((p - a) * ab.conj()).re / len2;
    let s = s.clamp(0.0, 1.0);
    (p - (a + ab * s)).norm()
}

pub(crate) fn sample(model: &ModelSpec, m: usize, n: usize, z: Complex64) -> CurveSample {
    CurveSample {
        t: 0.0,
        z,
        v_m: model.v_unchecked(m, z),
        v_n: model.v_unchecked(n, z),
    }
}

/// Third phase `k` with `Re P_k > min(Re P_m, Re P_n) - EPS_MP`, if any.
pub(crate) fn intruder(model: &ModelSpec, m: usize, n: usize, z: Complex64) -> Option<usize> {
    let a = model.log_moduli(z);
    let floor = a[m].min(a[n]) - EPS_MP;
    (0..a.len()).filter(|&k| k != m && k != n).find(|&k| a[k] > floor)
}

fn unit_tangent(model: &ModelSpec, m: usize, n: usize, z: Complex64) -> Option<Complex64> {
    let g = model.v_unchecked(m, z) - model.v_unchecked(n, z);
    let r = g.norm();
    (r > 0.0 && r.is_finite()).then(|| Complex64::i() * g.conj() / r)
}

fn rk4(model: &ModelSpec, m: usize, n: usize, z: Complex64, h: f64) -> Option<Complex64> {
    let f = |p: Complex64| unit_tangent(model, m, n, p);
    let k1 = f(z)?;
    let k2 = f(z + k1 * (0.5 * h))?;
    let k3 = f(z + k2 * (0.5 * h))?;
    let k4 = f(z + k3 * h)?;
    Some(z + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0))
}

fn march(
    model: &ModelSpec,
    m: usize,
    n: usize,
    z0: Complex64,
    h: f64,
    max_steps: usize,
    detect_loop: bool,
) -> (Vec<Complex64>, Termination) {
    let level = pair_level(model, m, n);
    let domain = model.domain();
    let step = h.abs();
    let mut pts = Vec::new();
    let mut z = z0;
    for k in 0..max_steps {
        let Some(pred) = rk4(model, m, n, z, h) else {
            return (pts, Termination::ProjectionFailure);
        };
        let tol = level_tol(model.log_zeta_unchecked(m, pred).re);
        let Ok(next) = project_normal(&level, pred, 0.0, step, tol) else {
            return (pts, Termination::ProjectionFailure);
        };
        if !domain.contains(next) {
            return (pts, Termination::DomainBoundary);
        }
        if let Some(phase) = intruder(model, m, n, next) {
            return (pts, Termination::MultiplePointSeed { phase, seed: z });
        }
        if detect_loop && k >= 3 && segment_distance(z0, z, next) < 0.1 * step {
            pts.push(z0);
            return (pts, Termination::ClosedLoop);
        }
        pts.push(next);
        z = next;
    }
    (pts, Termination::StepLimit)
}

/// Traces the `(m, n)` coexistence curve through `z0` in both directions,
/// taking at most `max_steps` steps of arc length `step` each way.
pub fn trace_curve(
    model: &ModelSpec,
    m: usize,
    n: usize,
    z0: Complex64,
    step: f64,
    max_steps: usize,
) -> Result<CoexistenceCurve> {
    let r = model.num_phases();
    if m >= r || n >= r || m == n {
        return Err(Error::Argument(format!("invalid phase pair ({m}, {n})")));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::Argument(format!("step must be positive, got {step}")));
    }
    model.require_in_domain(z0)?;
    let level = pair_level(model, m, n);
    let tol = level_tol(model.log_zeta_unchecked(m, z0).re);
    let start = project_normal(&level, z0, 0.0, step, tol)?;
    model.require_in_domain(start)?;

    if let Some(phase) = intruder(model, m, n, start) {
        let end = Termination::MultiplePointSeed { phase, seed: start };
        let mut curve = CoexistenceCurve {
            pair: (m, n),
            samples: vec![sample(model, m, n, start)],
            ends: [end, end],
            step,
        };
        curve.retime();
        return Ok(curve);
    }

    let (fwd, fwd_end) = march(model, m, n, start, step, max_steps, true);
    let (bwd, bwd_end) = if fwd_end == Termination::ClosedLoop {
        (Vec::new(), Termination::ClosedLoop)
    } else {
        march(model, m, n, start, -step, max_steps, false)
    };

    let samples = bwd
        .iter()
        .rev()
        .chain(std::iter::once(&start))
        .chain(fwd.iter())
        .map(|&z| sample(model, m, n, z))
        .collect();
    let mut curve = CoexistenceCurve {
        pair: (m, n),
        samples,
        ends: [bwd_end, fwd_end],
        step,
    };
    curve.retime();
    Ok(curve)
}
