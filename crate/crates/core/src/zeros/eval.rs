use num_complex::Complex64;

use crate::error::Result;
use crate::model::{FiniteVolumeModel, Rect};

/// A holomorphic function known up to a positive real factor that may vary
/// with `z`. Zeros and arguments are unaffected by such a factor, and so is
/// the Newton step when value and derivative share it.
pub(crate) trait Scaled: Sync {
    /// Value and derivative, both divided by the same positive factor.
    fn eval(&self, z: Complex64) -> (Complex64, Complex64);

    fn value(&self, z: Complex64) -> Complex64 {
        self.eval(z).0
    }

    /// Rough bound on `|d arg f / dz|` over `rect` away from zeros.
    fn phase_rate(&self, rect: &Rect) -> f64;

    /// Typical modulus away from zeros, used to recognise a vanishing value.
    fn scale(&self) -> f64;
}

/// Partition function of a finite-volume model, normalized by `zeta(z)^N`.
pub(crate) struct PartitionFn<'a> {
    pub fvm: &'a FiniteVolumeModel,
}

impl PartitionFn<'_> {
    fn xi_factor(&self) -> f64 {
        1.0 + self.fvm.xi_strength() * self.fvm.decay() * self.fvm.n()
    }
}

impl Scaled for PartitionFn<'_> {
    fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let fvm = self.fvm;
        let base = fvm.base();
        let n = fvm.n();
        let lm = base.log_max(z);
        let mut w = Complex64::new(0.0, 0.0);
        let mut dw = Complex64::new(0.0, 0.0);
        for m in 0..base.num_phases() {
            let t = base.degeneracy(m) as f64 * (n * (fvm.log_zeta(m, z) - lm)).exp();
            w += t;
            dw += t * n * fvm.v(m, z);
        }
        let k = self.xi_factor();
        (w * k, dw * k)
    }

    fn phase_rate(&self, rect: &Rect) -> f64 {
        let base = self.fvm.base();
        let mut pts = rect.corners().to_vec();
        pts.push(rect.center());
        let vmax = pts
            .iter()
            .flat_map(|&z| (0..base.num_phases()).map(move |m| self.fvm.v(m, z).norm()))
            .fold(0.0, f64::max);
        self.fvm.n() * vmax
    }

    fn scale(&self) -> f64 {
        self.fvm.base().total_degeneracy()
    }
}

/// `W(z) = Z_L(z) zeta(z)^{-N}`, the partition function with the dominant
/// growth divided out, including the `Xi` term.
pub fn eval_log_z_normalized(fvm: &FiniteVolumeModel, z: Complex64) -> Result<Complex64> {
    fvm.base().require_in_domain(z)?;
    Ok(PartitionFn { fvm }.value(z))
}

/// `G(w) = sum_m q_m exp(i phi_m + v_m w)`, divided by the largest term modulus.
pub(crate) struct ExpSum {
    pub terms: Vec<(f64, Complex64, Complex64)>,
}

impl ExpSum {
    pub fn new(q: &[f64], phi: &[f64], v: &[Complex64]) -> Self {
        ExpSum {
            terms: q
                .iter()
                .zip(phi)
                .zip(v)
                .map(|((&q, &phi), &v)| (q, Complex64::new(0.0, phi), v))
                .collect(),
        }
    }
}

impl Scaled for ExpSum {
    fn eval(&self, w: Complex64) -> (Complex64, Complex64) {
        let shift = self
            .terms
            .iter()
            .map(|(_, _, v)| (v * w).re)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut g = Complex64::new(0.0, 0.0);
        let mut dg = Complex64::new(0.0, 0.0);
        for &(q, iphi, v) in &self.terms {
            let t = q * (iphi + v * w - shift).exp();
            g += t;
            dg += t * v;
        }
        (g, dg)
    }

    fn phase_rate(&self, _rect: &Rect) -> f64 {
        self.terms.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max)
    }

    fn scale(&self) -> f64 {
        self.terms.iter().map(|t| t.0).sum()
    }
}
