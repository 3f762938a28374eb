use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use super::eval::{ExpSum, PartitionFn, Scaled};
use super::region::{search, Method, SearchParams, Zero, ZeroSet};
use crate::diagram::{project_normal, trace_curve, CoexistenceCurve, MultiplePoint};
use crate::error::{Error, Result};
use crate::model::{ccw_order, is_strictly_convex, FiniteVolumeModel, ModelSpec, Rect};

const THETA_TOL: f64 = 1e-10;
const BISECTION_STEPS: usize = 200;

/// One asymptotic half-line of the zeros near a multiple point, in the
/// rescaled variable `w = N (z - z_M)`: `w(t) = origin_offset + t direction`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoteLine {
    /// Consecutive phases on the convex hull of the `conj(v_m)`.
    pub side: (usize, usize),
    pub origin_offset: Complex64,
    pub direction: Complex64,
    /// Signed `log(q_{n+1}/q_n) / |v_n - v_{n+1}|`.
    pub shift_magnitude: f64,
}

struct TwoPhaseLevel<'a> {
    fvm: &'a FiniteVolumeModel,
    m: usize,
    n: usize,
}

impl TwoPhaseLevel<'_> {
    fn f(&self, z: Complex64) -> Complex64 {
        self.fvm.log_zeta(self.m, z) - self.fvm.log_zeta(self.n, z)
    }

    fn level(&self) -> impl Fn(Complex64) -> (f64, Complex64) + '_ {
        move |z| (self.f(z).re, self.fvm.v(self.m, z) - self.fvm.v(self.n, z))
    }

    fn theta(&self, z: Complex64) -> f64 {
        self.fvm.n() * self.f(z).im
    }
}

/// Solutions of the two-phase equations `q_m |zeta_m|^N = q_n |zeta_n|^N`
/// and `N arg(zeta_m / zeta_n) = pi (mod 2 pi)` along a coexistence curve
/// of `(m, n)`.
///
/// Samples are shifted onto the modulus level set, the phase
/// `N Im(log zeta_m - log zeta_n)` is followed continuously along them, and
/// each crossing of an odd multiple of `pi` is located by bisection.
pub fn predict_two_phase(fvm: &FiniteVolumeModel, m: usize, n: usize, curve: &CoexistenceCurve) -> Result<ZeroSet> {
    let r = fvm.base().num_phases();
    if m >= r || n >= r || m == n {
        return Err(Error::Argument(format!("invalid phase pair ({m}, {n})")));
    }
    if curve.pair != (m, n) && curve.pair != (n, m) {
        return Err(Error::Argument(format!(
            "curve belongs to pair {:?}, not ({m}, {n})",
            curve.pair
        )));
    }
    let big_n = fvm.n();
    let tp = TwoPhaseLevel { fvm, m, n };
    let level = tp.level();
    let q = |k: usize| fvm.base().degeneracy(k) as f64;
    let target = (q(n) / q(m)).ln() / big_n;
    let tol = 1e-14 * target.abs().max(1.0);
    let project = |z: Complex64| -> Result<Complex64> {
        let slope = level(z).1.norm();
        let reach = 10.0 * curve.step.max(target.abs() / slope.max(1e-300)) + 1e-6;
        project_normal(&level, z, target, reach, tol)
    };

    let shifted: Vec<Complex64> = curve.samples.iter().map(|s| project(s.z)).collect::<Result<_>>()?;
    let theta: Vec<f64> = shifted.iter().map(|&z| tp.theta(z)).collect();
    for i in 1..theta.len() {
        let jump = theta[i] - theta[i - 1];
        if jump.abs() >= PI {
            return Err(Error::Resolution {
                t: curve.samples[i - 1].t,
                jump,
            });
        }
    }

    let mut zeros = Vec::new();
    for i in 1..shifted.len() {
        let (a, b) = (theta[i - 1], theta[i]);
        let (lo, hi) = (a.min(b), a.max(b));
        // Odd multiples of pi in [lo, hi).
        let k = ((lo - PI) / TAU).ceil();
        let t = PI + TAU * k;
        if t >= hi && !(lo == hi && t == lo) {
            continue;
        }
        let (za, zb) = (shifted[i - 1], shifted[i]);
        let at = |s: f64| -> Result<(Complex64, f64)> {
            let z = if s <= 0.0 {
                za
            } else if s >= 1.0 {
                zb
            } else {
                project(za + (zb - za) * s)?
            };
            Ok((z, tp.theta(z) - t))
        };
        let (mut s0, mut s1) = (0.0, 1.0);
        let (mut z, mut g0) = at(0.0)?;
        let mut g = g0;
        if g0.abs() > THETA_TOL {
            for _ in 0..BISECTION_STEPS {
                let sm = 0.5 * (s0 + s1);
                let (zm, gm) = at(sm)?;
                z = zm;
                g = gm;
                if gm.abs() <= THETA_TOL || s1 - s0 <= f64::EPSILON {
                    break;
                }
                if gm.signum() == g0.signum() {
                    s0 = sm;
                    g0 = gm;
                } else {
                    s1 = sm;
                }
            }
        }
        if g.abs() > THETA_TOL {
            log::warn!("two-phase solution near {z} resolved only to phase error {g:.3e}");
        }
        zeros.push(Zero {
            z,
            multiplicity: 1,
            residual: PartitionFn { fvm }.value(z).norm(),
            method: Method::TwoPhaseEq,
        });
    }
    let region = bounding_rect(&shifted);
    Ok(ZeroSet::new(zeros, region, fvm.l(), fvm.volume(), None))
}

/// Two-phase solutions of a curve inside `rect`. The curve is re-traced
/// through every stretch of it that passes near `rect`, with a step fine
/// enough that the phase advances by at most `pi / 8` per step at volume `N`.
pub fn predict_two_phase_in(fvm: &FiniteVolumeModel, curve: &CoexistenceCurve, rect: Rect) -> Result<ZeroSet> {
    let (m, n) = curve.pair;
    let model = fvm.base();
    let c = rect.center();
    let reach = 0.5 * rect.diameter();
    let near = reach + 2.0 * curve.step;
    let big_n = fvm.n();
    let mut zeros = Vec::new();
    let mut i = 0;
    while i < curve.samples.len() {
        if (curve.samples[i].z - c).norm() > near {
            i += 1;
            continue;
        }
        let mut j = i;
        while j < curve.samples.len() && (curve.samples[j].z - c).norm() <= near {
            j += 1;
        }
        let run = &curve.samples[i..j];
        let start = run
            .iter()
            .min_by(|a, b| (a.z - c).norm().total_cmp(&(b.z - c).norm()))
            .expect("non-empty run");
        let gap = run.iter().map(|s| (s.v_m - s.v_n).norm()).fold(0.0, f64::max);
        let step = (PI / (8.0 * big_n * gap.max(1e-300))).min(curve.step);
        let max_steps = (2.0 * near / step).ceil() as usize + 16;
        let mut fine = trace_curve(model, m, n, start.z, step, max_steps)?;
        // Keep the stretch through the start point that stays near the box.
        let k0 = fine
            .samples
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.z - start.z).norm().total_cmp(&(b.1.z - start.z).norm()))
            .map_or(0, |(k, _)| k);
        let inside = |k: usize| (fine.samples[k].z - c).norm() <= reach + 4.0 * step;
        let mut lo = k0;
        while lo > 0 && inside(lo - 1) {
            lo -= 1;
        }
        let mut hi = k0 + 1;
        while hi < fine.samples.len() && inside(hi) {
            hi += 1;
        }
        fine.samples = fine.samples[lo..hi].to_vec();
        fine.retime();
        zeros.extend(predict_two_phase(fvm, m, n, &fine)?.restricted(rect).zeros);
        i = j;
    }
    Ok(ZeroSet::new(zeros, rect, fvm.l(), fvm.volume(), None))
}

fn bounding_rect(points: &[Complex64]) -> Rect {
    let mut r = Rect::new(f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        r.re = (r.re.0.min(p.re), r.re.1.max(p.re));
        r.im = (r.im.0.min(p.im), r.im.1.max(p.im));
    }
    r
}

/// Warnings for a radius `rho` that is too small or too large to carry the
/// local multiple-point description at volume `N = L^d`.
pub fn rho_warnings(l: u32, d: u32, rho: f64, phases: usize) -> Vec<String> {
    let n = (l as f64).powi(d as i32);
    let mut out = Vec::new();
    if n * rho < 10.0 {
        out.push(format!("N rho = {:.3} is below 10; the disc holds few zeros", n * rho));
    }
    let q = phases.max(1) as f64;
    let upper = (l as f64).powf(d as f64 - d as f64 / (2.0 * q)) * rho;
    if upper >= 1.0 {
        out.push(format!("L^(d - d/(2|Q|)) rho = {upper:.3} is not small"));
    }
    out
}

/// Solutions within `rho` of a multiple point of the equation
/// `sum_{m in Q} q_m exp(i phi_m + N (z - z_M) v_m) = 0`, where
/// `phi_m = N arg zeta_m(z_M) mod 2 pi`.
pub fn predict_multipoint(model: &ModelSpec, mp: &MultiplePoint, l: u32, d: u32, rho: f64) -> Result<ZeroSet> {
    if mp.stable_set.len() < 3 {
        return Err(Error::Argument(format!(
            "a multiple point needs at least 3 stable phases, got {:?}",
            mp.stable_set
        )));
    }
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::Argument(format!("rho must be positive, got {rho}")));
    }
    if l == 0 || d == 0 {
        return Err(Error::Argument(format!("L and d must be positive, got L={l}, d={d}")));
    }
    let volume = (l as u64)
        .checked_pow(d)
        .ok_or_else(|| Error::Argument(format!("volume L^d overflows for L={l}, d={d}")))?;
    let n = volume as f64;
    for w in rho_warnings(l, d, rho, mp.stable_set.len()) {
        log::warn!("{w}");
    }
    let q: Vec<f64> = mp.stable_set.iter().map(|&m| model.degeneracy(m) as f64).collect();
    let phi: Vec<f64> = mp
        .stable_set
        .iter()
        .map(|&m| (n * model.log_zeta_unchecked(m, mp.z).im).rem_euclid(TAU))
        .collect();
    let v: Vec<Complex64> = mp.stable_set.iter().map(|&m| model.v_unchecked(m, mp.z)).collect();
    let g = ExpSum::new(&q, &phi, &v);
    let radius = n * rho;
    let scaled = exp_sum_zeros(&g, radius)?;
    let zeros = scaled
        .into_iter()
        .map(|(w, mult)| Zero {
            z: mp.z + w / n,
            multiplicity: mult,
            residual: g.value(w).norm(),
            method: Method::MultipointEq,
        })
        .collect();
    Ok(ZeroSet::new(zeros, Rect::around(mp.z, rho), l, volume, None))
}

/// Zeros of `g` in the closed disc `|w| <= radius`, with multiplicities.
pub(crate) fn exp_sum_zeros(g: &ExpSum, radius: f64) -> Result<Vec<(Complex64, u32)>> {
    // The square is slightly enlarged and off-centre so that its edges avoid
    // the symmetry lines on which zeros tend to sit.
    let h = radius * 1.0137 + 1e-3;
    let c = Complex64::new(radius * 0.00731, -radius * 0.00419);
    let rect = Rect::new(c.re - h, c.re + h, c.im - h, c.im + h);
    let params = SearchParams {
        leaf_diameter: 1e-3,
        multiplicity_radius: 1e-2,
        max_depth: 60,
        residual_tol: 1e-10,
    };
    let (zeros, _) = search(g, rect, &params, Method::MultipointEq)?;
    Ok(zeros
        .into_iter()
        .filter(|z| z.z.norm() <= radius)
        .map(|z| (z.z, z.multiplicity))
        .collect())
}

/// Half-lines along which the rescaled multiple-point zeros accumulate, one
/// per side of the convex polygon with vertices `conj(v_m)`, `m in Q`.
pub fn asymptote_lines(model: &ModelSpec, mp: &MultiplePoint) -> Result<Vec<AsymptoteLine>> {
    if mp.stable_set.len() < 3 {
        return Err(Error::Argument(format!(
            "a multiple point needs at least 3 stable phases, got {:?}",
            mp.stable_set
        )));
    }
    let vstar: Vec<Complex64> = mp.stable_set.iter().map(|&m| model.v_unchecked(m, mp.z).conj()).collect();
    let (convex, margin) = is_strictly_convex(&vstar);
    if !convex {
        return Err(Error::NotConvex { z: mp.z, margin });
    }
    let order = ccw_order(&vstar);
    let k = order.len();
    Ok((0..k)
        .map(|i| {
            let (a, b) = (order[i], order[(i + 1) % k]);
            let (pa, pb) = (mp.stable_set[a], mp.stable_set[b]);
            let delta = vstar[a] - vstar[b];
            let log_ratio = (model.degeneracy(pb) as f64 / model.degeneracy(pa) as f64).ln();
            AsymptoteLine {
                side: (pa, pb),
                origin_offset: delta / delta.norm_sqr() * log_ratio,
                direction: Complex64::i() * delta / delta.norm(),
                shift_magnitude: log_ratio / delta.norm(),
            }
        })
        .collect())
}
