use num_complex::Complex64;
use serde::Serialize;

use super::region::ZeroSet;
use crate::error::{Error, Result};
use crate::model::{FiniteVolumeModel, ModelSpec};

/// Default multiplier on `delta_L` for accepting a matched pair.
pub const DEFAULT_C_MATCH: f64 = 10.0;

/// `gamma_L = scale * log N / N`.
pub fn default_gamma(n: f64, scale: f64) -> f64 {
    scale * n.ln() / n
}

/// `omega_L = log N`.
pub fn default_omega(n: f64) -> f64 {
    n.ln()
}

/// `rho_L = scale * log N / N`.
pub fn default_rho(n: f64, scale: f64) -> f64 {
    scale * n.ln() / n
}

/// Finite-`L` versions of the two growth conditions on `gamma_L`:
/// `N gamma / log L > 4d` and `L^(d-1) gamma < 2 tau`.
pub fn gamma_warnings(l: u32, d: u32, gamma: f64, tau: f64) -> Vec<String> {
    let lf = l as f64;
    let n = lf.powi(d as i32);
    let mut out = Vec::new();
    let lower = n * gamma / lf.ln();
    if !(lower > 4.0 * d as f64) {
        out.push(format!("N gamma / log L = {lower:.3} does not exceed 4d = {}", 4 * d));
    }
    let upper = lf.powi(d as i32 - 1) * gamma;
    if !(upper < 2.0 * tau) {
        out.push(format!("L^(d-1) gamma = {upper:.3} is not below 2 tau = {:.3}", 2.0 * tau));
    }
    out
}

/// Matching tolerance for a zero near `z` governed by the pair `q`:
/// `e^{-tau L}` deep inside the two-phase region, `N e^{-gamma N / 2}` in
/// the rest of `U_gamma(q)`.
#[allow(clippy::too_many_arguments)]
pub fn delta_l(
    model: &ModelSpec,
    z: Complex64,
    l: u32,
    d: u32,
    gamma: f64,
    tau: f64,
    kappa: f64,
    q: [usize; 2],
) -> Result<f64> {
    model.require_in_domain(z)?;
    if !(gamma > 0.0 && tau > 0.0 && kappa > 0.0) || l == 0 || d == 0 {
        return Err(Error::Argument(format!(
            "delta_L needs positive parameters, got L={l}, d={d}, gamma={gamma}, tau={tau}, kappa={kappa}"
        )));
    }
    for w in gamma_warnings(l, d, gamma, tau) {
        log::warn!("{w}");
    }
    if !model.in_u(z, &q, gamma) {
        return Err(Error::Domain {
            z,
            reason: format!("point is not in U_gamma({q:?}) with gamma = {gamma}"),
        });
    }
    let lf = l as f64;
    let n = lf.powi(d as i32);
    if model.in_u(z, &q, 2.0 * kappa / lf) {
        Ok((-tau * lf).exp())
    } else {
        Ok(n * (-0.5 * gamma * n).exp())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchPair {
    pub predicted: usize,
    pub located: usize,
    pub distance: f64,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub pairs: Vec<MatchPair>,
    pub unmatched_predicted: Vec<usize>,
    pub unmatched_located: Vec<usize>,
    /// Minimal distance between two located zeros; infinite with fewer than two.
    pub min_located_spacing: f64,
    /// Indices into `pairs` whose partners are not mutually nearest.
    pub non_mutual: Vec<usize>,
    /// Indices into `pairs` with `distance > c_match * tolerance`.
    pub violations: Vec<usize>,
    pub c_match: f64,
}

impl MatchReport {
    pub fn max_distance(&self) -> f64 {
        self.pairs.iter().map(|p| p.distance).fold(0.0, f64::max)
    }

    pub fn is_clean(&self) -> bool {
        self.unmatched_predicted.is_empty()
            && self.unmatched_located.is_empty()
            && self.non_mutual.is_empty()
            && self.violations.is_empty()
    }
}

fn nearest(points: &[Complex64], z: Complex64) -> Option<usize> {
    (0..points.len()).min_by(|&a, &b| (points[a] - z).norm().total_cmp(&(points[b] - z).norm()))
}

/// Greedy one-to-one matching of predicted to located zeros in order of
/// increasing distance. `tolerances[i]` is the tolerance of predicted zero
/// `i`; pairs farther apart than `max_distance` are left unmatched.
pub fn match_zeros(
    predicted: &ZeroSet,
    located: &ZeroSet,
    tolerances: &[f64],
    c_match: f64,
    max_distance: Option<f64>,
) -> Result<MatchReport> {
    if tolerances.len() != predicted.len() {
        return Err(Error::Argument(format!(
            "{} tolerances for {} predicted zeros",
            tolerances.len(),
            predicted.len()
        )));
    }
    let p: Vec<Complex64> = predicted.points().collect();
    let q: Vec<Complex64> = located.points().collect();
    let limit = max_distance.unwrap_or(f64::INFINITY);
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            let dist = (a - b).norm();
            if dist <= limit {
                candidates.push((dist, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut used_p = vec![false; p.len()];
    let mut used_q = vec![false; q.len()];
    let mut pairs = Vec::new();
    for (dist, i, j) in candidates {
        if used_p[i] || used_q[j] {
            continue;
        }
        used_p[i] = true;
        used_q[j] = true;
        pairs.push(MatchPair {
            predicted: i,
            located: j,
            distance: dist,
            tolerance: tolerances[i],
        });
    }
    pairs.sort_by_key(|pair| pair.predicted);
    let non_mutual = pairs
        .iter()
        .enumerate()
        .filter(|(_, pair)| {
            nearest(&q, p[pair.predicted]) != Some(pair.located) || nearest(&p, q[pair.located]) != Some(pair.predicted)
        })
        .map(|(k, _)| k)
        .collect();
    let violations = pairs
        .iter()
        .enumerate()
        .filter(|(_, pair)| !(pair.distance <= c_match * pair.tolerance))
        .map(|(k, _)| k)
        .collect();
    let mut min_spacing = f64::INFINITY;
    for a in 0..q.len() {
        for b in a + 1..q.len() {
            min_spacing = min_spacing.min((q[a] - q[b]).norm());
        }
    }
    Ok(MatchReport {
        pairs,
        unmatched_predicted: (0..p.len()).filter(|&i| !used_p[i]).collect(),
        unmatched_located: (0..q.len()).filter(|&j| !used_q[j]).collect(),
        min_located_spacing: min_spacing,
        non_mutual,
        violations,
        c_match,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyViolation {
    pub z: Complex64,
    pub multiplicity: u32,
    pub stable_set: Vec<usize>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegeneracyReport {
    /// `(zero index, multiplicity, size of the kappa/L-stable set)`.
    pub checked: Vec<(usize, u32, usize)>,
    pub violations: Vec<DegeneracyViolation>,
}

/// Checks that every located zero has multiplicity at most `|Q| - 1` for its
/// `kappa/L`-stable set `Q`, and that none lies in a single-phase region
/// `U_{log N / N}({m})`.
pub fn degeneracy_audit(fvm: &FiniteVolumeModel, located: &ZeroSet) -> DegeneracyReport {
    let model = fvm.base();
    let eps = fvm.kappa() / fvm.l() as f64;
    let n = fvm.n();
    let single_eps = n.ln() / n;
    let mut report = DegeneracyReport {
        checked: Vec::new(),
        violations: Vec::new(),
    };
    for (k, zero) in located.zeros.iter().enumerate() {
        let a = model.log_moduli(zero.z);
        let lm = a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let q: Vec<usize> = (0..a.len()).filter(|&m| a[m] > lm - eps).collect();
        report.checked.push((k, zero.multiplicity, q.len()));
        if zero.multiplicity as usize + 1 > q.len() {
            report.violations.push(DegeneracyViolation {
                z: zero.z,
                multiplicity: zero.multiplicity,
                stable_set: q.clone(),
                reason: format!("multiplicity {} exceeds |Q| - 1 = {}", zero.multiplicity, q.len().saturating_sub(1)),
            });
        }
        if let Some(m) = (0..a.len()).find(|&m| model.in_u(zero.z, &[m], single_eps)) {
            report.violations.push(DegeneracyViolation {
                z: zero.z,
                multiplicity: zero.multiplicity,
                stable_set: vec![m],
                reason: format!("zero lies in the single-phase region of phase {m}"),
            });
        }
    }
    report
}
