//! Small reference models with closed-form phase diagrams.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{CoordinateMap, ModelSpec, PhaseSpec, Rect};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn linear(name: &str, q: u32, v: Complex64) -> PhaseSpec {
    PhaseSpec::new(name, q, vec![c(0.0, 0.0), v])
}

/// `P_1(z) = z`, `P_2(z) = -z`: coexistence along the imaginary axis.
pub fn two_phase(q1: u32, q2: u32) -> ModelSpec {
    ModelSpec::new(
        vec![linear("plus", q1, c(1.0, 0.0)), linear("minus", q2, c(-1.0, 0.0))],
        Rect::new(-1.0, 1.0, -2.5, 2.5),
    )
    .expect("valid preset")
}

/// `P_{1,2}(z) = +-lambda z`.
pub fn two_phase_scaled(lambda: f64) -> ModelSpec {
    ModelSpec::new(
        vec![linear("plus", 1, c(lambda, 0.0)), linear("minus", 1, c(-lambda, 0.0))],
        Rect::new(-1.0, 1.0, -2.5, 2.5),
    )
    .expect("valid preset")
}

/// `P_m(z) = omega^(m-1) (z - center)` with `omega = exp(2 pi i / 3)`; a triple
/// point at `center` with three straight coexistence rays.
pub fn three_phase_at(q: &[u32; 3], center: Complex64) -> ModelSpec {
    let phases = (0..3)
        .map(|m| {
            let w = Complex64::from_polar(1.0, 2.0 * PI * m as f64 / 3.0);
            PhaseSpec::new(format!("phase{}", m + 1), q[m], vec![-w * center, w])
        })
        .collect();
    ModelSpec::new(phases, Rect::around(center, 1.0)).expect("valid preset")
}

pub fn three_phase(q: &[u32; 3]) -> ModelSpec {
    three_phase_at(q, c(0.0, 0.0))
}

/// `P_m(z) = i^(m-1) z`: a quadruple point at the origin.
pub fn four_phase() -> ModelSpec {
    let phases = (0..4)
        .map(|m| linear(&format!("phase{}", m + 1), 1, c(0.0, 1.0).powi(m)))
        .collect();
    ModelSpec::new(phases, Rect::new(-1.0, 1.0, -1.0, 1.0)).expect("valid preset")
}

/// `P = (-z, 0, z)`: all three phases coexist on the whole imaginary axis,
/// so the logarithmic derivatives are collinear there.
pub fn collinear() -> ModelSpec {
    ModelSpec::new(
        vec![
            linear("left", 1, c(-1.0, 0.0)),
            PhaseSpec::new("middle", 1, vec![c(0.0, 0.0)]),
            linear("right", 1, c(1.0, 0.0)),
        ],
        Rect::new(-1.0, 1.0, -1.0, 1.0),
    )
    .expect("valid preset")
}

/// `P_1 = z^2`, `P_2 = 0`: coexistence on the two diagonals.
pub fn quadratic() -> ModelSpec {
    ModelSpec::new(
        vec![
            PhaseSpec::new("square", 1, vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            PhaseSpec::new("flat", 1, vec![c(0.0, 0.0)]),
        ],
        Rect::new(-1.0, 1.0, -1.0, 1.0),
    )
    .expect("valid preset")
}

/// Lee-Yang type model in the field coordinate `w` (`z = e^w`):
/// `P_+(w) = w`, `P_-(w) = -w`, so `zeta_+(w) = conj(zeta_-(-conj w))`.
pub fn lee_yang() -> ModelSpec {
    ModelSpec::new(
        vec![linear("+", 1, c(1.0, 0.0)), linear("-", 1, c(-1.0, 0.0))],
        Rect::new(-1.0, 1.0, -3.0, 3.0),
    )
    .expect("valid preset")
    .with_coordinate_map(CoordinateMap::Exponential)
}
