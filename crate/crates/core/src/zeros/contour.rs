use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eval::{PartitionFn, Scaled};
use crate::error::{Error, Result};
use crate::model::{FiniteVolumeModel, Rect};

const MAX_REFINE_DEPTH: u32 = 48;
const MAX_INITIAL_SAMPLES: usize = 1 << 22;

/// A closed, positively oriented contour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Contour {
    Rect(Rect),
    Circle { center: Complex64, radius: f64 },
    /// Vertices of a closed polygon; the last vertex joins the first.
    Polyline(Vec<Complex64>),
}

#[derive(Clone, Copy, Debug)]
enum Piece {
    Line(Complex64, Complex64),
    Arc { center: Complex64, radius: f64 },
}

impl Piece {
    fn at(&self, s: f64) -> Complex64 {
        match *self {
            Piece::Line(a, b) => a + (b - a) * s,
            Piece::Arc { center, radius } => center + Complex64::from_polar(radius, TAU * s),
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Piece::Line(a, b) => (b - a).norm(),
            Piece::Arc { radius, .. } => TAU * radius,
        }
    }
}

impl Contour {
    fn pieces(&self) -> Vec<Piece> {
        match self {
            Contour::Rect(r) => {
                let [a, b, c, d] = r.corners();
                vec![Piece::Line(a, b), Piece::Line(b, c), Piece::Line(c, d), Piece::Line(d, a)]
            }
            Contour::Circle { center, radius } => vec![Piece::Arc {
                center: *center,
                radius: *radius,
            }],
            Contour::Polyline(v) => (0..v.len()).map(|i| Piece::Line(v[i], v[(i + 1) % v.len()])).collect(),
        }
    }

    /// Smallest rectangle containing the contour.
    pub fn bounding_box(&self) -> Rect {
        match self {
            Contour::Rect(r) => *r,
            Contour::Circle { center, radius } => Rect::around(*center, *radius),
            Contour::Polyline(v) => {
                let fold = |f: fn(f64, f64) -> f64, init: f64, g: fn(&Complex64) -> f64| v.iter().map(g).fold(init, f);
                Rect::new(
                    fold(f64::min, f64::INFINITY, |z| z.re),
                    fold(f64::max, f64::NEG_INFINITY, |z| z.re),
                    fold(f64::min, f64::INFINITY, |z| z.im),
                    fold(f64::max, f64::NEG_INFINITY, |z| z.im),
                )
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Contour::Rect(r) => r.validate(),
            Contour::Circle { center, radius } => {
                if radius.is_finite() && *radius > 0.0 && center.re.is_finite() && center.im.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Argument(format!("invalid circle radius {radius} at {center}")))
                }
            }
            Contour::Polyline(v) => {
                if v.len() < 3 || v.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    Err(Error::Argument("a closed polyline needs at least 3 finite vertices".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Change of `arg f` along one piece. A step between samples is accepted
/// once the phase moves by less than `pi/2` and the local rate
/// `|f'/f|` times the step length is below `pi/2`; otherwise it is halved.
fn piece_phase(f: &impl Scaled, piece: Piece, rate: f64, floor: f64) -> Result<f64> {
    let len = piece.length();
    let guess = len * rate / FRAC_PI_4;
    let k = if guess.is_finite() {
        (guess.ceil() as usize).clamp(8, MAX_INITIAL_SAMPLES)
    } else {
        MAX_INITIAL_SAMPLES
    };
    let sample = |s: f64| -> Result<Sample> {
        let z = piece.at(s);
        let (w, dw) = f.eval(z);
        if !(w.norm() > floor) || !w.re.is_finite() || !w.im.is_finite() {
            return Err(Error::ContourDegenerate { near: z });
        }
        Ok(Sample {
            s,
            w,
            rate: (dw / w).norm(),
        })
    };
    let mut total = 0.0;
    let mut a = sample(0.0)?;
    for i in 1..=k {
        let b = sample(i as f64 / k as f64)?;
        total += refine(&sample, len, a, b, 0)?;
        a = b;
    }
    Ok(total)
}

#[derive(Clone, Copy)]
struct Sample {
    s: f64,
    w: Complex64,
    rate: f64,
}

fn refine(sample: &impl Fn(f64) -> Result<Sample>, len: f64, a: Sample, b: Sample, depth: u32) -> Result<f64> {
    let step = (b.w / a.w).arg();
    let h = (b.s - a.s) * len;
    if step.abs() < FRAC_PI_2 && h * a.rate.max(b.rate) < FRAC_PI_2 {
        return Ok(step);
    }
    let sm = 0.5 * (a.s + b.s);
    if depth >= MAX_REFINE_DEPTH || sm <= a.s || sm >= b.s {
        return Err(Error::ContourDegenerate {
            near: Complex64::new(f64::NAN, f64::NAN),
        });
    }
    let m = sample(sm)?;
    Ok(refine(sample, len, a, m, depth + 1)? + refine(sample, len, m, b, depth + 1)?)
}

/// Winding number of `f` around `contour` by the argument principle.
pub(crate) fn winding_of(f: &impl Scaled, contour: &Contour) -> Result<i64> {
    let bbox = contour.bounding_box();
    let rate = f.phase_rate(&bbox);
    let floor = 1e-14 * f.scale();
    let mut total = 0.0;
    for piece in contour.pieces() {
        total += piece_phase(f, piece, rate, floor).map_err(|e| match e {
            Error::ContourDegenerate { near } if near.re.is_nan() => Error::ContourDegenerate { near: bbox.center() },
            other => other,
        })?;
    }
    let turns = total / TAU;
    let k = turns.round();
    if (turns - k).abs() > 0.25 {
        return Err(Error::ContourDegenerate { near: bbox.center() });
    }
    Ok(k as i64)
}

/// Number of zeros of the normalized partition function enclosed by
/// `contour`, counted with multiplicity.
pub fn winding_number(fvm: &FiniteVolumeModel, contour: &Contour) -> Result<i64> {
    contour.validate()?;
    let bbox = contour.bounding_box();
    if !fvm.base().domain().contains_rect(&bbox) {
        return Err(Error::Domain {
            z: bbox.center(),
            reason: format!("contour with bounding box {bbox} leaves the domain"),
        });
    }
    winding_of(&PartitionFn { fvm }, contour)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{finite_volume, presets, Perturbation};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn m2(n: u32) -> FiniteVolumeModel {
        finite_volume(&presets::two_phase(1, 1), n, 1, 1.0, 1.0, &Perturbation::None, 0.0).unwrap()
    }

    #[test]
    fn circle_around_one_zero() {
        let fvm = m2(100);
        let w = winding_number(&fvm, &Contour::Circle { center: c(0.0, PI / 200.0), radius: 0.005 }).unwrap();
        assert_eq!(w, 1);
        let w = winding_number(&fvm, &Contour::Circle { center: c(0.05, 0.0), radius: 0.01 }).unwrap();
        assert_eq!(w, 0);
    }

    #[test]
    fn rectangle_counts_six() {
        let fvm = m2(100);
        let w = winding_number(&fvm, &Contour::Rect(Rect::new(-0.1, 0.1, 0.0, 0.2))).unwrap();
        assert_eq!(w, 6);
    }

    #[test]
    fn polyline_matches_rectangle() {
        let fvm = m2(100);
        let poly = Contour::Polyline(vec![c(-0.1, 0.0), c(0.1, 0.0), c(0.1, 0.2), c(-0.1, 0.2)]);
        assert_eq!(winding_number(&fvm, &poly).unwrap(), 6);
    }

    #[test]
    fn zero_on_contour_is_degenerate() {
        let fvm = m2(100);
        let e = winding_number(&fvm, &Contour::Rect(Rect::new(-0.1, 0.1, PI / 200.0, 0.2))).unwrap_err();
        assert!(matches!(e, Error::ContourDegenerate { .. }), "{e:?}");
    }

    #[test]
    fn contour_outside_domain_is_rejected() {
        let fvm = m2(100);
        let e = winding_number(&fvm, &Contour::Circle { center: c(0.0, 0.0), radius: 5.0 }).unwrap_err();
        assert!(matches!(e, Error::Domain { .. }));
    }
}
