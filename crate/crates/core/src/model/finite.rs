use num_complex::Complex64;
use rand::Rng;

use super::{Grid, ModelSpec, Poly, Rect};
use crate::error::{Error, Result};

/// Points per axis of the grid on which perturbation sup-norms are measured.
pub const NORMALIZATION_GRID: usize = 101;

/// Analytic corrections `u_m` applied as `log zeta_m^(L) = P_m + e^{-tau L} u_m`.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum Perturbation {
    #[default]
    None,
    /// One polynomial per phase.
    Polys(Vec<Poly>),
}

/// Sup of `|p|` over the normalization grid of `domain`.
pub fn grid_sup(p: &Poly, domain: Rect) -> f64 {
    Grid::new(domain, NORMALIZATION_GRID, NORMALIZATION_GRID)
        .points()
        .map(|z| p.eval(z).norm())
        .fold(0.0, f64::max)
}

fn random_poly<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Poly {
    Poly(
        (0..=degree)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

fn unit_sup(p: Poly, domain: Rect) -> Poly {
    let s = grid_sup(&p, domain);
    if s > 0.0 {
        p.scaled(1.0 / s)
    } else {
        p
    }
}

impl Perturbation {
    /// Independent random polynomials of the given degree, each with grid
    /// sup-norm one on the model domain.
    pub fn random<R: Rng + ?Sized>(model: &ModelSpec, degree: usize, rng: &mut R) -> Self {
        let domain = model.domain();
        Perturbation::Polys(
            (0..model.num_phases())
                .map(|_| unit_sup(random_poly(degree, rng), domain))
                .collect(),
        )
    }

    /// Random perturbation with `u_plus(w) = conj(u_minus(-conj w))`; all
    /// other phases are left unperturbed.
    pub fn lee_yang_symmetric<R: Rng + ?Sized>(
        model: &ModelSpec,
        plus: usize,
        minus: usize,
        degree: usize,
        rng: &mut R,
    ) -> Self {
        let domain = model.domain();
        let u_minus = unit_sup(random_poly(degree, rng), domain);
        let u_plus = Poly(
            u_minus
                .0
                .iter()
                .enumerate()
                .map(|(j, a)| if j % 2 == 0 { a.conj() } else { -a.conj() })
                .collect(),
        );
        let mut polys = vec![Poly::default(); model.num_phases()];
        polys[plus] = u_plus;
        polys[minus] = u_minus;
        Perturbation::Polys(polys)
    }
}

/// A model at linear size `L` in dimension `d`: volume `N = L^d`, perturbed
/// weights `zeta_m^(L)` and the synthetic error term `Xi`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteVolumeModel {
    base: ModelSpec,
    volume: u64,
    l: u32,
    d: u32,
    tau: f64,
    kappa: f64,
    perturbations: Vec<Poly>,
    xi_strength: f64,
}

/// Builds the finite-volume model. Perturbations whose grid sup-norm exceeds
/// one are rescaled to sup-norm one.
pub fn finite_volume(
    model: &ModelSpec,
    l: u32,
    d: u32,
    tau: f64,
    kappa: f64,
    perturbation: &Perturbation,
    xi_strength: f64,
) -> Result<FiniteVolumeModel> {
    if l == 0 || d == 0 {
        return Err(Error::Argument(format!("L and d must be positive, got L={l}, d={d}")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Argument(format!("tau must be positive, got {tau}")));
    }
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Argument(format!("kappa must be positive, got {kappa}")));
    }
    if !(xi_strength >= 0.0 && xi_strength.is_finite()) {
        return Err(Error::Argument(format!("xi strength must be non-negative, got {xi_strength}")));
    }
    let volume = (l as u64)
        .checked_pow(d)
        .ok_or_else(|| Error::Argument(format!("volume L^d overflows for L={l}, d={d}")))?;
    let r = model.num_phases();
    let perturbations = match perturbation {
        Perturbation::None => vec![Poly::default(); r],
        Perturbation::Polys(p) => {
            if p.len() != r {
                return Err(Error::Argument(format!(
                    "expected {r} perturbation polynomials, got {}",
                    p.len()
                )));
            }
            p.iter()
                .map(|u| {
                    let s = grid_sup(u, model.domain());
                    if !s.is_finite() {
                        Err(Error::Argument("perturbation is not finite on the domain".into()))
                    } else if s > 1.0 + 1e-12 {
                        Ok(u.scaled(1.0 / s))
                    } else {
                        Ok(u.clone())
                    }
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(FiniteVolumeModel {
        base: model.clone(),
        volume,
        l,
        d,
        tau,
        kappa,
        perturbations,
        xi_strength,
    })
}

impl FiniteVolumeModel {
    pub fn base(&self) -> &ModelSpec {
        &self.base
    }

    /// `N = L^d`.
    pub fn volume(&self) -> u64 {
        self.volume
    }

    pub fn n(&self) -> f64 {
        self.volume as f64
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn xi_strength(&self) -> f64 {
        self.xi_strength
    }

    pub fn perturbations(&self) -> &[Poly] {
        &self.perturbations
    }

    pub fn is_unperturbed(&self) -> bool {
        self.perturbations.iter().all(Poly::is_zero)
    }

    /// `e^{-tau L}`.
    pub fn decay(&self) -> f64 {
        (-self.tau * self.l as f64).exp()
    }

    /// `log zeta_m^(L)(z)`.
    pub fn log_zeta(&self, m: usize, z: Complex64) -> Complex64 {
        let p = self.base.log_zeta_unchecked(m, z);
        let u = &self.perturbations[m];
        if u.is_zero() {
            p
        } else {
            p + self.decay() * u.eval(z)
        }
    }

    /// `b_m(z) = d/dz log zeta_m^(L)(z)`.
    pub fn v(&self, m: usize, z: Complex64) -> Complex64 {
        let v = self.base.v_unchecked(m, z);
        let u = &self.perturbations[m];
        if u.is_zero() {
            v
        } else {
            v + self.decay() * u.derivative(z)
        }
    }

    /// Degeneracy-weighted sum `sum_m q_m exp(N (log zeta_m^(L) - log zeta))`.
    pub(crate) fn normalized_sum(&self, z: Complex64) -> Complex64 {
        let n = self.n();
        let lm = self.base.log_max(z);
        (0..self.base.num_phases())
            .map(|m| {
                let q = self.base.degeneracy(m) as f64;
                q * (n * (self.log_zeta(m, z) - lm)).exp()
            })
            .sum()
    }

    /// `Xi(z) zeta(z)^{-N}` where
    /// `Xi = theta e^{-tau L} N sum_m q_m (zeta_m^(L))^N`.
    pub fn xi_normalized(&self, z: Complex64) -> Complex64 {
        self.xi_strength * self.decay() * self.n() * self.normalized_sum(z)
    }
}
