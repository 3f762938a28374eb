use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{FiniteVolumeModel, Grid, Rect};
use crate::zeros::ZeroSet;

/// Tolerance on `|zeta_+(w) / conj(zeta_-(-conj w)) - 1|` over the grid.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LeeYangReport {
    pub plus: usize,
    pub minus: usize,
    /// Largest symmetry defect of the unperturbed and perturbed weights.
    pub base_symmetry_error: f64,
    pub perturbed_symmetry_error: f64,
    pub grid_points: usize,
    pub zero_count: usize,
    /// `max |Re w|` over the audited zeros.
    pub max_abs_re: f64,
    /// Zeros per unit length of the imaginary axis inside the region.
    pub zeros_per_length: f64,
    /// `zeros_per_length / N`.
    pub zeros_per_length_over_n: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

fn reflect(w: Complex64) -> Complex64 {
    Complex64::new(-w.re, w.im)
}

fn defect(a: Complex64, b: Complex64) -> f64 {
    // zeta_+ = exp(a), conj(zeta_-) = exp(conj b); compare the quotient with 1.
    let d = a - b.conj();
    (d.exp() - 1.0).norm()
}

/// Checks the reflection symmetry `zeta_+(w) = conj(zeta_-(-conj w))` with
/// `q_+ = q_-`, for the weights and for the perturbations, on a grid over
/// the part of the domain mapped into itself by `w -> -conj w`. If it holds,
/// reports how far the zeros stray from `Re w = 0`; the allowed distance is
/// `tol_factor * e^{-tau L}`.
pub fn lee_yang_audit(
    fvm: &FiniteVolumeModel,
    zeros: &ZeroSet,
    plus: usize,
    minus: usize,
    grid_size: usize,
    tol_factor: f64,
) -> Result<LeeYangReport> {
    let model = fvm.base();
    let r = model.num_phases();
    if plus >= r || minus >= r || plus == minus {
        return Err(Error::Argument(format!("invalid phase pair ({plus}, {minus})")));
    }
    if grid_size < 2 {
        return Err(Error::Argument(format!("grid size must be at least 2, got {grid_size}")));
    }
    if model.degeneracy(plus) != model.degeneracy(minus) {
        return Err(Error::Hypothesis(format!(
            "degeneracies differ: q_+ = {}, q_- = {}",
            model.degeneracy(plus),
            model.degeneracy(minus)
        )));
    }
    let d = model.domain();
    let half = d.re.0.abs().min(d.re.1.abs());
    if !(d.re.0 <= 0.0 && d.re.1 >= 0.0) {
        return Err(Error::Hypothesis("the domain does not meet the line Re w = 0".into()));
    }
    let rect = Rect::new(-half, half, d.im.0, d.im.1);
    let grid = Grid::new(rect, grid_size, grid_size);
    let points: Vec<Complex64> = grid.points().collect();
    let (base_err, pert_err) = points
        .par_iter()
        .map(|&w| {
            let base = defect(model.log_zeta_unchecked(plus, w), model.log_zeta_unchecked(minus, reflect(w)));
            let pert = defect(fvm.log_zeta(plus, w), fvm.log_zeta(minus, reflect(w)));
            (base, pert)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    if !(base_err <= SYMMETRY_TOL) {
        return Err(Error::Hypothesis(format!(
            "weights are not reflection symmetric: defect {base_err:.3e}"
        )));
    }
    if !(pert_err <= SYMMETRY_TOL) {
        return Err(Error::Hypothesis(format!(
            "perturbations are not reflection symmetric: defect {pert_err:.3e}"
        )));
    }
    let max_abs_re = zeros.points().map(|z| z.re.abs()).fold(0.0, f64::max);
    let count = zeros.zeros.iter().map(|z| z.multiplicity as usize).sum();
    let length = zeros.region.height();
    let per_length = count as f64 / length;
    let tolerance = (tol_factor * fvm.decay()).max(1e-12);
    Ok(LeeYangReport {
        plus,
        minus,
        base_symmetry_error: base_err,
        perturbed_symmetry_error: pert_err,
        grid_points: points.len(),
        zero_count: count,
        max_abs_re,
        zeros_per_length: per_length,
        zeros_per_length_over_n: per_length / fvm.n(),
        tolerance,
        within_tolerance: max_abs_re <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{finite_volume, presets, Perturbation};
    use crate::zeros::find_zeros_region;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unperturbed_zeros_sit_on_the_axis() {
        let model = presets::lee_yang();
        let fvm = finite_volume(&model, 100, 1, 0.2, 1.0, &Perturbation::None, 0.0).unwrap();
        let zs = find_zeros_region(&fvm, Rect::new(-0.1, 0.1, 0.0, 0.2), 40).unwrap();
        let rep = lee_yang_audit(&fvm, &zs, 0, 1, 21, 10.0).unwrap();
        assert_eq!(rep.zero_count, 6);
        assert!(rep.max_abs_re <= 1e-12);
        assert!(rep.within_tolerance);
    }

    #[test]
    fn symmetric_perturbation_keeps_zeros_close() {
        let model = presets::lee_yang();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pert = Perturbation::lee_yang_symmetric(&model, 0, 1, 3, &mut rng);
        let fvm = finite_volume(&model, 100, 1, 0.2, 1.0, &pert, 0.0).unwrap();
        let zs = find_zeros_region(&fvm, Rect::new(-0.1, 0.1, 0.0, 0.2), 40).unwrap();
        let rep = lee_yang_audit(&fvm, &zs, 0, 1, 21, 10.0).unwrap();
        assert!(rep.within_tolerance, "{}", rep.max_abs_re);
    }

    #[test]
    fn unequal_degeneracies_refuse_the_audit() {
        let model = presets::lee_yang().with_degeneracies(&[1, 2]).unwrap();
        let fvm = finite_volume(&model, 10, 1, 0.2, 1.0, &Perturbation::None, 0.0).unwrap();
        let zs = ZeroSet::new(Vec::new(), Rect::new(-0.1, 0.1, 0.0, 0.2), 10, 10, None);
        assert!(matches!(lee_yang_audit(&fvm, &zs, 0, 1, 11, 10.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn asymmetric_perturbation_refuses_the_audit() {
        let model = presets::lee_yang();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pert = Perturbation::random(&model, 2, &mut rng);
        let fvm = finite_volume(&model, 10, 1, 0.2, 1.0, &pert, 0.0).unwrap();
        let zs = ZeroSet::new(Vec::new(), Rect::new(-0.1, 0.1, 0.0, 0.2), 10, 10, None);
        assert!(matches!(lee_yang_audit(&fvm, &zs, 0, 1, 11, 10.0), Err(Error::Hypothesis(_))));
    }
}
