//! Phase weights and the models built from them.
//!
//! Every phase `m` carries a weight `zeta_m(z) = exp(P_m(z))` where `P_m` is a
//! complex polynomial, together with a positive integer degeneracy `q_m`.
//! Such weights are entire and never vanish, so the logarithm is stored
//! rather than recovered from `zeta_m`, and all comparisons of moduli reduce
//! to comparisons of `Re P_m`.

mod assumptions;
mod finite;
pub mod presets;
mod stability;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assumptions::{check_assumption_a, AssumptionReport, ConvexityResult, Violation, ViolationKind};
pub(crate) use assumptions::{ccw_order, is_strictly_convex};
pub use finite::{finite_volume, FiniteVolumeModel, Perturbation, NORMALIZATION_GRID};
pub use stability::{stability, EpsMembership, StabilityReport, TOL_STAB};

/// Axis-aligned rectangle `[re.0, re.1] x [im.0, im.1]` in the complex plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re_lo: f64, re_hi: f64, im_lo: f64, im_hi: f64) -> Self {
        Rect {
            re: (re_lo, re_hi),
            im: (im_lo, im_hi),
        }
    }

    /// Square of half-width `r` centred at `c`.
    pub fn around(c: Complex64, r: f64) -> Self {
        Rect::new(c.re - r, c.re + r, c.im - r, c.im + r)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.re.0, self.re.1, self.im.0, self.im.1];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("rectangle {self} has non-finite bounds")));
        }
        if !(self.re.0 < self.re.1 && self.im.0 < self.im.1) {
            return Err(Error::Argument(format!(
                "rectangle {self} has inverted or empty bounds"
            )));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.re.1 - self.re.0
    }

    pub fn height(&self) -> f64 {
        self.im.1 - self.im.0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.re.0 + self.re.1), 0.5 * (self.im.0 + self.im.1))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.re.0 >= self.re.0
            && other.re.1 <= self.re.1
            && other.im.0 >= self.im.0
            && other.im.1 <= self.im.1
    }

    /// True if the closed disc `|z - c| <= r` lies inside the rectangle.
    pub fn contains_disc(&self, c: Complex64, r: f64) -> bool {
        c.re - r >= self.re.0 && c.re + r <= self.re.1 && c.im - r >= self.im.0 && c.im + r <= self.im.1
    }

    /// Corners in counterclockwise order starting from the lower left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re.0, self.im.0),
            Complex64::new(self.re.1, self.im.0),
            Complex64::new(self.re.1, self.im.1),
            Complex64::new(self.re.0, self.im.1),
        ]
    }
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}] x [{}, {}]", self.re.0, self.re.1, self.im.0, self.im.1)
    }
}

/// Regular grid of `nx * ny` points spanning a rectangle, corners included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub rect: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(rect: Rect, nx: usize, ny: usize) -> Self {
        Grid { rect, nx, ny }
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let fx = i as f64 / (self.nx - 1) as f64;
        let fy = j as f64 / (self.ny - 1) as f64;
        Complex64::new(
            self.rect.re.0 + fx * self.rect.width(),
            self.rect.im.0 + fy * self.rect.height(),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.ny).flat_map(move |j| (0..self.nx).map(move |i| self.point(i, j)))
    }

    pub fn spacing(&self) -> f64 {
        let dx = self.rect.width() / (self.nx - 1) as f64;
        let dy = self.rect.height() / (self.ny - 1) as f64;
        dx.max(dy)
    }
}

/// How the field coordinate `w` used internally is presented to the user.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CoordinateMap {
    #[default]
    Identity,
    /// `z = exp(w)`; the unit circle `|z| = 1` is the line `Re w = 0`.
    Exponential,
}

impl CoordinateMap {
    pub fn present(self, w: Complex64) -> Complex64 {
        match self {
            CoordinateMap::Identity => w,
            CoordinateMap::Exponential => w.exp(),
        }
    }
}

/// Complex polynomial `c_0 + c_1 z + ... + c_k z^k`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by simultaneous Horner recursion.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.eval_with_derivative(z).1
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn scaled(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }
}

/// One phase: a name, a degeneracy `q_m >= 1` and the exponent polynomial `P_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpec {
    pub name: String,
    pub degeneracy: u32,
    pub exponent: Poly,
}

impl PhaseSpec {
    pub fn new(name: impl Into<String>, degeneracy: u32, coeffs: Vec<Complex64>) -> Self {
        PhaseSpec {
            name: name.into(),
            degeneracy,
            exponent: Poly(coeffs),
        }
    }
}

/// A finite family of phase weights over a rectangular domain.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    phases: Vec<PhaseSpec>,
    domain: Rect,
    alpha_ref: f64,
    coordinate_map: CoordinateMap,
}

impl ModelSpec {
    pub fn new(phases: Vec<PhaseSpec>, domain: Rect) -> Result<Self> {
        if phases.len() < 2 {
            return Err(Error::Argument(format!(
                "a model needs at least two phases, got {}",
                phases.len()
            )));
        }
        domain.validate()?;
        for (i, p) in phases.iter().enumerate() {
            if p.degeneracy == 0 {
                return Err(Error::Argument(format!("phase '{}' has degeneracy 0", p.name)));
            }
            if p.exponent.0.is_empty() {
                return Err(Error::Argument(format!("phase '{}' has no coefficients", p.name)));
            }
            if p.exponent.0.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::Argument(format!(
                    "phase '{}' has non-finite coefficients",
                    p.name
                )));
            }
            if phases[..i].iter().any(|o| o.name == p.name) {
                return Err(Error::Argument(format!("duplicate phase name '{}'", p.name)));
            }
        }
        Ok(ModelSpec {
            phases,
            domain,
            alpha_ref: 0.1,
            coordinate_map: CoordinateMap::Identity,
        })
    }

    pub fn with_alpha_ref(mut self, alpha_ref: f64) -> Result<Self> {
        if !(alpha_ref > 0.0 && alpha_ref.is_finite()) {
            return Err(Error::Argument(format!("alpha_ref must be positive, got {alpha_ref}")));
        }
        self.alpha_ref = alpha_ref;
        Ok(self)
    }

    pub fn with_coordinate_map(mut self, map: CoordinateMap) -> Self {
        self.coordinate_map = map;
        self
    }

    /// Replaces every degeneracy; `q.len()` must equal the number of phases.
    pub fn with_degeneracies(mut self, q: &[u32]) -> Result<Self> {
        if q.len() != self.phases.len() {
            return Err(Error::Argument(format!(
                "expected {} degeneracies, got {}",
                self.phases.len(),
                q.len()
            )));
        }
        if q.contains(&0) {
            return Err(Error::Argument("degeneracies must be positive".into()));
        }
        for (p, &qm) in self.phases.iter_mut().zip(q) {
            p.degeneracy = qm;
        }
        Ok(self)
    }

    /// Same model on a different domain.
    pub fn with_domain(mut self, domain: Rect) -> Result<Self> {
        domain.validate()?;
        self.domain = domain;
        Ok(self)
    }

    pub fn phases(&self) -> &[PhaseSpec] {
        &self.phases
    }

    pub fn num_phases(&self) -> usize {
        self.phases.len()
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    pub fn alpha_ref(&self) -> f64 {
        self.alpha_ref
    }

    pub fn coordinate_map(&self) -> CoordinateMap {
        self.coordinate_map
    }

    pub fn degeneracy(&self, m: usize) -> u32 {
        self.phases[m].degeneracy
    }

    pub fn total_degeneracy(&self) -> f64 {
        self.phases.iter().map(|p| p.degeneracy as f64).sum()
    }

    fn check_phase(&self, m: usize) -> Result<()> {
        if m >= self.phases.len() {
            return Err(Error::Argument(format!(
                "phase index {m} out of range (model has {} phases)",
                self.phases.len()
            )));
        }
        Ok(())
    }

    /// `log zeta_m(z) = P_m(z)`.
    pub fn log_zeta(&self, m: usize, z: Complex64) -> Result<Complex64> {
        self.check_phase(m)?;
        Ok(self.phases[m].exponent.eval(z))
    }

    /// `v_m(z) = zeta_m'(z) / zeta_m(z) = P_m'(z)`.
    pub fn v(&self, m: usize, z: Complex64) -> Result<Complex64> {
        self.check_phase(m)?;
        Ok(self.phases[m].exponent.derivative(z))
    }

    /// `Re P_m(z)` for every phase, i.e. `log |zeta_m(z)|`.
    pub fn log_moduli(&self, z: Complex64) -> Vec<f64> {
        self.phases.iter().map(|p| p.exponent.eval(z).re).collect()
    }

    /// `log zeta(z) = max_m Re P_m(z)`.
    pub fn log_max(&self, z: Complex64) -> f64 {
        self.phases
            .iter()
            .map(|p| p.exponent.eval(z).re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn log_zeta_unchecked(&self, m: usize, z: Complex64) -> Complex64 {
        self.phases[m].exponent.eval(z)
    }

    pub(crate) fn v_unchecked(&self, m: usize, z: Complex64) -> Complex64 {
        self.phases[m].exponent.derivative(z)
    }

    /// `Re(P_m - P_n)(z)` and `(P_m - P_n)'(z)`.
    pub(crate) fn pair_level(&self, m: usize, n: usize, z: Complex64) -> (f64, Complex64) {
        let (pm, dm) = self.phases[m].exponent.eval_with_derivative(z);
        let (pn, dn) = self.phases[n].exponent.eval_with_derivative(z);
        ((pm - pn).re, dm - dn)
    }

    pub(crate) fn require_in_domain(&self, z: Complex64) -> Result<()> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain {
                z,
                reason: "non-finite point".into(),
            });
        }
        if !self.domain.contains(z) {
            return Err(Error::Domain {
                z,
                reason: format!("outside model domain {}", self.domain),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_zeta_reads_the_polynomial() {
        let m2 = presets::two_phase(1, 1);
        assert_eq!(m2.log_zeta(0, c(1.0, 0.0)).unwrap(), c(1.0, 0.0));
        let w = m2.log_zeta(0, c(0.0, PI)).unwrap();
        assert!((w.exp() - c(-1.0, 0.0)).norm() < 1e-15);

        let m3 = presets::three_phase(&[1, 1, 1]);
        let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!((m3.log_zeta(1, c(1.0, 0.0)).unwrap() - omega).norm() < 1e-15);
    }

    #[test]
    fn v_is_the_exponent_derivative() {
        let m2 = presets::two_phase(1, 1);
        for z in [c(0.0, 0.0), c(0.3, -1.2), c(-0.9, 2.0)] {
            assert_eq!(m2.v(0, z).unwrap(), c(1.0, 0.0));
            assert_eq!(m2.v(1, z).unwrap(), c(-1.0, 0.0));
        }
        let m3 = presets::three_phase(&[1, 1, 1]);
        let expect = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
        assert!((m3.v(2, c(0.0, 0.0)).unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn bad_phase_index_is_an_argument_error() {
        let m2 = presets::two_phase(1, 1);
        assert!(matches!(m2.log_zeta(2, c(0.0, 0.0)), Err(Error::Argument(_))));
        assert!(matches!(m2.v(7, c(0.0, 0.0)), Err(Error::Argument(_))));
    }

    #[test]
    fn construction_rejects_bad_models() {
        let d = Rect::new(-1.0, 1.0, -1.0, 1.0);
        let one = PhaseSpec::new("a", 1, vec![c(0.0, 0.0)]);
        assert!(ModelSpec::new(vec![one.clone()], d).is_err());
        assert!(ModelSpec::new(vec![one.clone(), one.clone()], d).is_err());
        let zero_q = PhaseSpec::new("b", 0, vec![c(1.0, 0.0)]);
        assert!(ModelSpec::new(vec![one.clone(), zero_q], d).is_err());
        let empty = PhaseSpec::new("b", 1, vec![]);
        assert!(ModelSpec::new(vec![one.clone(), empty], d).is_err());
        let b = PhaseSpec::new("b", 1, vec![c(1.0, 0.0)]);
        assert!(ModelSpec::new(vec![one, b], Rect::new(1.0, -1.0, 0.0, 1.0)).is_err());
    }

    #[test]
    fn horner_derivative_matches_power_rule() {
        let p = Poly(vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0), c(2.0, -1.0)]);
        let z = c(0.7, -0.4);
        let (val, der) = p.eval_with_derivative(z);
        let direct: Complex64 = p.0.iter().enumerate().map(|(k, &ck)| ck * z.powi(k as i32)).sum();
        let ddirect: Complex64 = p
            .0
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &ck)| ck * (k as f64) * z.powi(k as i32 - 1))
            .sum();
        assert!((val - direct).norm() < 1e-14);
        assert!((der - ddirect).norm() < 1e-14);
    }
}
