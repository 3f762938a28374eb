use num_complex::Complex64;
use serde::Serialize;

use super::ModelSpec;
use crate::error::{Error, Result};

/// Relative tolerance for declaring two phases exactly tied.
pub const TOL_STAB: f64 = 1e-12;

/// Membership data for one `eps`.
///
/// `almost_stable` is `{m : Re P_m > log_max - eps}` (the sets `S_eps(m)` that
/// contain `z`), and `half_closure` is `{m : Re P_m >= log_max - eps/2}`.
/// The point lies in `U_eps(Q)` exactly when `half_closure ⊆ Q ⊆ almost_stable`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpsMembership {
    pub eps: f64,
    pub almost_stable: Vec<usize>,
    pub half_closure: Vec<usize>,
}

impl EpsMembership {
    pub fn in_u(&self, q: &[usize]) -> bool {
        !q.is_empty()
            && self.half_closure.iter().all(|m| q.contains(m))
            && q.iter().all(|m| self.almost_stable.contains(m))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub z: Complex64,
    pub log_max: f64,
    pub stable_set: Vec<usize>,
    pub eps_sets: Vec<EpsMembership>,
}

pub(crate) fn stable_tolerance(log_max: f64) -> f64 {
    TOL_STAB * log_max.abs().max(1.0)
}

/// Phases within `tol` of the maximal `Re P`.
pub(crate) fn near_max(log_moduli: &[f64], tol: f64) -> Vec<usize> {
    let lm = log_moduli.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    log_moduli
        .iter()
        .enumerate()
        .filter(|(_, &a)| a >= lm - tol)
        .map(|(m, _)| m)
        .collect()
}

pub(crate) fn membership(log_moduli: &[f64], log_max: f64, eps: f64) -> EpsMembership {
    let idx = |pred: &dyn Fn(f64) -> bool| {
        log_moduli
            .iter()
            .enumerate()
            .filter(|(_, &a)| pred(a))
            .map(|(m, _)| m)
            .collect::<Vec<_>>()
    };
    EpsMembership {
        eps,
        almost_stable: idx(&|a| a > log_max - eps),
        half_closure: idx(&|a| a >= log_max - 0.5 * eps),
    }
}

/// Stable set of `z` and its `eps`-relaxations.
pub fn stability(model: &ModelSpec, z: Complex64, eps_list: &[f64]) -> Result<StabilityReport> {
    model.require_in_domain(z)?;
    if let Some(e) = eps_list.iter().find(|e| !(**e >= 0.0)) {
        return Err(Error::Argument(format!("eps values must be non-negative, got {e}")));
    }
    Ok(stability_unchecked(model, z, eps_list))
}

pub(crate) fn stability_unchecked(model: &ModelSpec, z: Complex64, eps_list: &[f64]) -> StabilityReport {
    let a = model.log_moduli(z);
    let log_max = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    StabilityReport {
        z,
        log_max,
        stable_set: near_max(&a, stable_tolerance(log_max)),
        eps_sets: eps_list.iter().map(|&e| membership(&a, log_max, e)).collect(),
    }
}

impl ModelSpec {
    /// True if `z` lies in `U_eps(Q)`.
    pub fn in_u(&self, z: Complex64, q: &[usize], eps: f64) -> bool {
        let a = self.log_moduli(z);
        let lm = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        membership(&a, lm, eps).in_u(q)
    }

    /// True if every phase of `q` lies in `S_eps` at `z`.
    pub fn in_s(&self, z: Complex64, q: &[usize], eps: f64) -> bool {
        let a = self.log_moduli(z);
        let lm = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        q.iter().all(|&m| a[m] > lm - eps)
    }

    /// True if `z` lies in `G_eps`, i.e. outside every single-phase `U_eps({m})`.
    pub fn in_g(&self, z: Complex64, eps: f64) -> bool {
        let a = self.log_moduli(z);
        let lm = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        membership(&a, lm, eps).half_closure.len() >= 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_phase_examples() {
        let m2 = presets::two_phase(1, 1);
        let r = stability(&m2, c(0.5, 0.0), &[0.1]).unwrap();
        assert_eq!(r.stable_set, vec![0]);
        let r = stability(&m2, c(0.0, 1.0), &[0.1, 1.0]).unwrap();
        assert_eq!(r.stable_set, vec![0, 1]);
        let m3 = presets::three_phase(&[1, 1, 1]);
        let r = stability(&m3, c(0.0, 0.0), &[]).unwrap();
        assert_eq!(r.stable_set, vec![0, 1, 2]);
    }

    #[test]
    fn outside_domain_and_negative_eps_are_rejected() {
        let m2 = presets::two_phase(1, 1);
        assert!(matches!(stability(&m2, c(5.0, 0.0), &[]), Err(Error::Domain { .. })));
        assert!(matches!(stability(&m2, c(0.0, 0.0), &[-1.0]), Err(Error::Argument(_))));
    }

    #[test]
    fn u_membership_uses_half_eps_exclusion() {
        let m2 = presets::two_phase(1, 1);
        // Re P_1 - Re P_2 = 2x.
        let z = c(0.015, 0.3);
        assert!(m2.in_u(z, &[0, 1], 0.05));
        assert!(!m2.in_u(z, &[0, 1], 0.02));
        assert!(m2.in_u(z, &[0], 0.05));
        // gap 0.02 < eps/2 puts both phases in the closure.
        assert!(!m2.in_u(c(0.01, 0.3), &[0], 0.05));
        // gap 0.03 >= eps/2 = 0.01 excludes phase 2 from the closure.
        assert!(m2.in_u(z, &[0], 0.02));
        assert!(m2.in_g(c(0.0, 0.2), 0.01));
        assert!(!m2.in_g(c(0.2, 0.2), 0.01));
    }

    proptest! {
        #[test]
        fn stable_set_matches_sign_of_real_part(x in -0.9f64..0.9, y in -2.0f64..2.0) {
            let m2 = presets::two_phase(1, 1);
            let r = stability(&m2, c(x, y), &[]).unwrap();
            if x > 1e-11 {
                prop_assert_eq!(r.stable_set, vec![0]);
            } else if x < -1e-11 {
                prop_assert_eq!(r.stable_set, vec![1]);
            }
            let r0 = stability(&m2, c(0.0, y), &[]).unwrap();
            prop_assert_eq!(r0.stable_set, vec![0, 1]);
        }

        #[test]
        fn common_shift_leaves_memberships_unchanged(
            x in -0.9f64..0.9, y in -0.9f64..0.9,
            sre in -3.0f64..3.0, sim in -3.0f64..3.0,
            eps in 0.0f64..0.5,
        ) {
            // Rounding can flip memberships exactly at a threshold, so sample
            // away from them.
            let base = presets::three_phase(&[1, 1, 1]);
            let shift = c(sre, sim);
            let shifted = ModelSpec::new(
                base.phases().iter().map(|p| {
                    let mut q = p.clone();
                    q.exponent.0[0] += shift;
                    q
                }).collect(),
                base.domain(),
            ).unwrap();
            let z = c(x, y);
            let a = base.log_moduli(z);
            let lm = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let margin = a.iter().flat_map(|&ai| {
                [(ai - lm).abs(), (ai - lm + eps).abs(), (ai - lm + 0.5 * eps).abs()]
            }).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
            prop_assume!(margin > 1e-9 || a.iter().all(|&ai| ai == lm));
            let r1 = stability(&base, z, &[eps]).unwrap();
            let r2 = stability(&shifted, z, &[eps]).unwrap();
            prop_assert_eq!(&r1.eps_sets, &r2.eps_sets);
            prop_assert!((r2.log_max - r1.log_max - sre).abs() < 1e-12);
        }
    }
}
