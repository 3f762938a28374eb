//! Line density of zeros along coexistence curves.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{stable_set_mp, trace_curve};
use crate::error::{Error, Result};
use crate::model::{finite_volume, ModelSpec, Perturbation, Rect};
use crate::zeros::{find_zeros_region, predict_two_phase, ZeroSet, DEFAULT_MAX_DEPTH};

/// `|v_m(z) - v_n(z)| / (2 pi)`.
pub fn theoretical_density(model: &ModelSpec, m: usize, n: usize, z: Complex64) -> Result<f64> {
    let r = model.num_phases();
    if m >= r || n >= r || m == n {
        return Err(Error::Argument(format!("invalid phase pair ({m}, {n})")));
    }
    Ok((model.v_unchecked(m, z) - model.v_unchecked(n, z)).norm() / (2.0 * PI))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensitySample {
    pub z: Complex64,
    pub epsilon: f64,
    pub l: u32,
    pub volume: u64,
    /// Zeros in the open disc of radius `epsilon`, with multiplicity.
    pub count: u64,
    /// `count / (2 epsilon N)`.
    pub empirical: f64,
    pub theoretical: Option<f64>,
    pub warning: Option<String>,
}

impl DensitySample {
    pub fn with_theoretical(mut self, value: f64) -> Self {
        self.theoretical = Some(value);
        self
    }

    pub fn abs_error(&self) -> Option<f64> {
        self.theoretical.map(|t| (self.empirical - t).abs())
    }
}

/// Counts zeros in the open disc `|w - z| < epsilon`, which must lie inside
/// the region searched for `zeros`.
pub fn empirical_density(zeros: &ZeroSet, z: Complex64, epsilon: f64) -> Result<DensitySample> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::Argument(format!("epsilon must be positive, got {epsilon}")));
    }
    if !zeros.region.contains_disc(z, epsilon) {
        return Err(Error::Coverage {
            center: z,
            radius: epsilon,
            region: zeros.region,
        });
    }
    let count: u64 = zeros
        .zeros
        .iter()
        .filter(|w| (w.z - z).norm() < epsilon)
        .map(|w| w.multiplicity as u64)
        .sum();
    let n = zeros.volume as f64;
    let warning = (count <= 1).then(|| format!("only {count} zero(s) within epsilon = {epsilon}; the disc is below the zero spacing"));
    if let Some(w) = &warning {
        log::warn!("{w}");
    }
    Ok(DensitySample {
        z,
        epsilon,
        l: zeros.l,
        volume: zeros.volume,
        count,
        empirical: count as f64 / (2.0 * epsilon * n),
        theoretical: None,
        warning,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub epsilon: f64,
    pub l: u32,
    pub volume: u64,
    pub count: u64,
    /// Solutions of the two-phase equations in the same disc.
    pub predicted_count: u64,
    pub empirical: f64,
    pub theoretical: f64,
    pub abs_error: f64,
    /// `1/(epsilon N) + epsilon |d rho / dz|`.
    pub envelope: f64,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityTable {
    pub z: Complex64,
    pub pair: (usize, usize),
    /// Rows ordered by epsilon, then by L.
    pub rows: Vec<DensityRow>,
}

/// Search box around the disc, slightly enlarged and shifted so that its
/// edges avoid the symmetry lines of the zero set.
fn density_box(z: Complex64, epsilon: f64) -> Rect {
    let c = z + Complex64::new(0.0113, 0.0067) * epsilon;
    Rect::around(c, epsilon * 1.0371)
}

fn density_row(model: &ModelSpec, m: usize, n: usize, z: Complex64, epsilon: f64, l: u32, d: u32) -> Result<DensityRow> {
    let fvm = finite_volume(model, l, d, 1.0, 1.0, &Perturbation::None, 0.0)?;
    let big_n = fvm.n();
    let bx = density_box(z, epsilon);
    if !model.domain().contains_rect(&bx) {
        return Err(Error::Coverage {
            center: z,
            radius: epsilon,
            region: model.domain(),
        });
    }
    let located = find_zeros_region(&fvm, bx, DEFAULT_MAX_DEPTH)?;
    let theoretical = theoretical_density(model, m, n, z)?;
    let sample = empirical_density(&located, z, epsilon)?.with_theoretical(theoretical);

    let gap = (model.v_unchecked(m, z) - model.v_unchecked(n, z)).norm();
    let step = (PI / (8.0 * big_n * gap)).min(epsilon / 8.0);
    let max_steps = (2.0 * epsilon / step).ceil() as usize + 16;
    let mut curve = trace_curve(model, m, n, z, step, max_steps)?;
    curve.samples.retain(|s| (s.z - z).norm() <= 1.5 * epsilon);
    curve.retime();
    let predicted = predict_two_phase(&fvm, m, n, &curve)?;
    let predicted_count = predicted.points().filter(|w| (w - z).norm() < epsilon).count() as u64;

    let h = 1e-6 * epsilon.max(1e-3);
    let drho = |w: Complex64| theoretical_density(model, m, n, w);
    let slope = ((drho(z + h)? - drho(z - h)?) / (2.0 * h))
        .hypot((drho(z + Complex64::i() * h)? - drho(z - Complex64::i() * h)?) / (2.0 * h));
    let mut warning = sample.warning.clone();
    if epsilon * big_n < PI {
        warning.get_or_insert_with(|| format!("epsilon N = {:.3} is below pi", epsilon * big_n));
    }
    Ok(DensityRow {
        epsilon,
        l,
        volume: fvm.volume(),
        count: sample.count,
        predicted_count,
        empirical: sample.empirical,
        theoretical,
        abs_error: sample.abs_error().unwrap_or(f64::NAN),
        envelope: 1.0 / (epsilon * big_n) + epsilon * slope,
        warning,
    })
}

/// Empirical against theoretical density at a two-phase coexistence point
/// for every `(epsilon, L)`.
pub fn density_convergence(
    model: &ModelSpec,
    m: usize,
    n: usize,
    z: Complex64,
    eps_list: &[f64],
    l_list: &[u32],
    d: u32,
) -> Result<DensityTable> {
    if eps_list.is_empty() || l_list.is_empty() {
        return Err(Error::Argument("epsilon and L lists must be non-empty".into()));
    }
    theoretical_density(model, m, n, z)?;
    model.require_in_domain(z)?;
    let q = stable_set_mp(model, z);
    if q.len() != 2 || !q.contains(&m) || !q.contains(&n) {
        return Err(Error::Argument(format!(
            "{z} is not a coexistence point of exactly ({m}, {n}); stable set {q:?}"
        )));
    }
    let jobs: Vec<(f64, u32)> = eps_list.iter().flat_map(|&e| l_list.iter().map(move |&l| (e, l))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(e, l)| density_row(model, m, n, z, e, l, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityTable { z, pair: (m, n), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{presets, PhaseSpec};
    use crate::zeros::{Method, Zero};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theoretical_values() {
        assert!((theoretical_density(&presets::two_phase(1, 1), 0, 1, c(0.0, 0.3)).unwrap() - 1.0 / PI).abs() < 1e-15);
        let m3 = presets::three_phase(&[1, 1, 1]);
        let rho = theoretical_density(&m3, 0, 1, c(0.0, 0.0)).unwrap();
        assert!((rho - 3f64.sqrt() / (2.0 * PI)).abs() < 1e-15);
        let model = ModelSpec::new(
            vec![
                PhaseSpec::new("a", 1, vec![c(0.0, 0.0), c(2.0, 0.0)]),
                PhaseSpec::new("b", 1, vec![c(0.0, 0.0), c(-1.0, 0.0)]),
            ],
            Rect::new(-1.0, 1.0, -1.0, 1.0),
        )
        .unwrap();
        assert!((theoretical_density(&model, 0, 1, c(0.0, 0.0)).unwrap() - 3.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn scaled_model_density() {
        for lambda in [0.5, 2.0, 3.0] {
            let model = presets::two_phase_scaled(lambda);
            let rho = theoretical_density(&model, 0, 1, c(0.0, 0.1)).unwrap();
            assert!((rho - lambda / PI).abs() < 1e-15);
        }
    }

    fn axis_zeros(n: u64, half: f64) -> ZeroSet {
        let k_max = (half * n as f64 / PI).ceil() as i64 + 1;
        let zeros = (-k_max..k_max)
            .map(|k| Zero {
                z: c(0.0, PI * (2 * k + 1) as f64 / (2.0 * n as f64)),
                multiplicity: 1,
                residual: 0.0,
                method: Method::TwoPhaseEq,
            })
            .collect();
        ZeroSet::new(zeros, Rect::around(c(0.0, 0.0), half), n as u32, n, None)
    }

    #[test]
    fn counting_on_the_axis() {
        let s = empirical_density(&axis_zeros(1000, 0.2), c(0.0, 0.0), 0.1).unwrap();
        assert_eq!(s.count, 64);
        assert!((s.empirical - 0.32).abs() < 1e-15);
        let s = empirical_density(&axis_zeros(1000, 0.2), c(0.0, 0.0), 1e-3).unwrap();
        assert_eq!(s.count, 0);
        assert!(s.warning.is_some());
    }

    #[test]
    fn overhanging_disc_is_a_coverage_error() {
        let e = empirical_density(&axis_zeros(1000, 0.2), c(0.15, 0.0), 0.1).unwrap_err();
        assert!(matches!(e, Error::Coverage { .. }));
    }

    #[test]
    fn convergence_row_for_two_phase() {
        let m2 = presets::two_phase(1, 1);
        let t = density_convergence(&m2, 0, 1, c(0.0, 0.0), &[0.1], &[1000], 1).unwrap();
        let row = &t.rows[0];
        assert_eq!(row.count, 64);
        assert_eq!(row.predicted_count, 64);
        assert!((row.abs_error - (0.32 - 1.0 / PI)).abs() < 1e-12);
        assert!(row.abs_error <= row.envelope);
    }

    #[test]
    fn small_epsilon_row_carries_a_warning() {
        let m2 = presets::two_phase(1, 1);
        let t = density_convergence(&m2, 0, 1, c(0.0, 0.0), &[0.02], &[100], 1).unwrap();
        assert!(t.rows[0].warning.is_some());
    }
}
