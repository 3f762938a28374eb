//! One-dimensional solvers for level sets of `Re h` with `h` analytic.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelSpec;

/// Absolute tolerance on `Re(P_m - P_n)` at a coexistence point.
pub const TOL_COEXIST: f64 = 1e-12;

const MAX_NEWTON: usize = 50;

/// Level function returning `Re h(z)` and `h'(z)`.
pub(crate) trait Level: Fn(Complex64) -> (f64, Complex64) {}
impl<F: Fn(Complex64) -> (f64, Complex64)> Level for F {}

pub(crate) fn level_tol(value_scale: f64) -> f64 {
    TOL_COEXIST * value_scale.abs().max(1.0)
}

/// Safeguarded Newton for `Re h = target` on the segment `a -> b`, which must
/// bracket a sign change. Returns the root and the number of iterations.
pub(crate) fn solve_on_segment(
    level: &impl Level,
    a: Complex64,
    b: Complex64,
    target: f64,
    tol: f64,
) -> Result<Complex64> {
    let dir = b - a;
    let g = |s: f64| {
        let (v, d) = level(a + dir * s);
        (v - target, (d * dir).re)
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let (glo, _) = g(lo);
    let (ghi, _) = g(hi);
    if glo.abs() <= tol {
        return Ok(a);
    }
    if ghi.abs() <= tol {
        return Ok(b);
    }
    if glo.signum() == ghi.signum() {
        return Err(Error::NoConvergence { last: a, iterations: 0 });
    }
    let lo_negative = glo < 0.0;
    let mut s = 0.5;
    for it in 0..MAX_NEWTON {
        let (gs, ds) = g(s);
        if gs.abs() <= tol {
            return Ok(a + dir * s);
        }
        if (gs < 0.0) == lo_negative {
            lo = s;
        } else {
            hi = s;
        }
        let newton = s - gs / ds;
        s = if ds != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * 4.0 {
            let z = a + dir * s;
            let (v, _) = level(z);
            if (v - target).abs() <= tol * 16.0 {
                return Ok(z);
            }
            return Err(Error::NoConvergence { last: z, iterations: it + 1 });
        }
    }
    Err(Error::NoConvergence {
        last: a + dir * s,
        iterations: MAX_NEWTON,
    })
}

/// Newton along the fixed unit direction `dir` for `Re h = target`, starting
/// at `z`; fails if the iterate moves farther than `max_shift`.
pub(crate) fn project_along(
    level: &impl Level,
    z: Complex64,
    dir: Complex64,
    target: f64,
    max_shift: f64,
    tol: f64,
) -> Result<Complex64> {
    let mut t = 0.0f64;
    for it in 0..MAX_NEWTON {
        let p = z + dir * t;
        let (v, d) = level(p);
        let g = v - target;
        if g.abs() <= tol {
            return Ok(p);
        }
        let dg = (d * dir).re;
        if dg == 0.0 || !dg.is_finite() {
            return Err(Error::NoConvergence { last: p, iterations: it });
        }
        t -= g / dg;
        if t.abs() > max_shift || !t.is_finite() {
            return Err(Error::NoConvergence { last: p, iterations: it + 1 });
        }
    }
    Err(Error::NoConvergence {
        last: z + dir * t,
        iterations: MAX_NEWTON,
    })
}

/// Newton transverse to the level curve, i.e. along `conj(h') / |h'|`.
pub(crate) fn project_normal(
    level: &impl Level,
    z: Complex64,
    target: f64,
    max_shift: f64,
    tol: f64,
) -> Result<Complex64> {
    let (_, d) = level(z);
    let nrm = d.norm();
    if nrm == 0.0 || !nrm.is_finite() {
        return Err(Error::NoConvergence { last: z, iterations: 0 });
    }
    project_along(level, z, d.conj() / nrm, target, max_shift, tol)
}

pub(crate) fn pair_level(model: &ModelSpec, m: usize, n: usize) -> impl Level + '_ {
    move |z| model.pair_level(m, n, z)
}

/// Locates a point with `Re P_m = Re P_n` near `seed`.
///
/// The search moves only along the coordinate axis on which `Re(P_m - P_n)`
/// varies faster at the seed, inside the unit box centred at the seed.
pub fn find_coexistence_point(model: &ModelSpec, m: usize, n: usize, seed: Complex64) -> Result<Complex64> {
    let r = model.num_phases();
    if m >= r || n >= r || m == n {
        return Err(Error::Argument(format!("invalid phase pair ({m}, {n})")));
    }
    model.require_in_domain(seed)?;
    let level = pair_level(model, m, n);
    let (v0, d0) = level(seed);
    // d/dx Re h = Re h', d/dy Re h = -Im h'.
    let axis = if d0.re.abs() >= d0.im.abs() {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let tol = level_tol(model.log_zeta_unchecked(m, seed).re);
    if v0.abs() <= tol {
        return Ok(seed);
    }
    solve_on_segment(&level, seed - axis * 0.5, seed + axis * 0.5, 0.0, tol).map_err(|e| match e {
        Error::NoConvergence { last, iterations } => Error::NoConvergence {
            last: if iterations == 0 { seed } else { last },
            iterations,
        },
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_phase_coexistence_on_imaginary_axis() {
        let m2 = presets::two_phase(1, 1);
        let z = find_coexistence_point(&m2, 0, 1, c(0.3, 0.7)).unwrap();
        assert!((z - c(0.0, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn three_phase_pair_lands_on_its_ray() {
        let m3 = presets::three_phase(&[1, 1, 1]);
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        // The (1,2) tie ray points along exp(-i pi/3).
        let seed = Complex64::from_polar(0.5, -PI / 3.0) + c(0.02, 0.03);
        let z = find_coexistence_point(&m3, 0, 1, seed).unwrap();
        assert!(((c(1.0, 0.0) - omega) * z).re.abs() < 1e-12);
    }

    #[test]
    fn no_root_in_unit_box_is_an_error() {
        let m2 = presets::two_phase(1, 1).with_domain(crate::model::Rect::new(-6.0, 6.0, -1.0, 1.0)).unwrap();
        let e = find_coexistence_point(&m2, 0, 1, c(5.0, 0.0)).unwrap_err();
        assert!(matches!(e, Error::NoConvergence { last, .. } if last == c(5.0, 0.0)));
    }

    #[test]
    fn projection_respects_target_level() {
        let m2 = presets::two_phase(1, 2);
        let level = pair_level(&m2, 0, 1);
        let target = 2.0f64.ln() / 100.0;
        let z = project_normal(&level, c(0.2, 0.4), target, 1.0, 1e-14).unwrap();
        assert!((z.re - 2.0f64.ln() / 200.0).abs() < 1e-15);
        assert!((z.im - 0.4).abs() < 1e-15);
    }
}
