//! Acceptance criteria, one check per criterion. Runs as a plain binary so
//! every PASS/FAIL line is printed; exits nonzero if any criterion fails.

use std::f64::consts::{LN_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};

use phasezeros::analysis::{covering_check, lee_yang_audit, vandermonde_report};
use phasezeros::density::density_convergence;
use phasezeros::diagram::{build_phase_diagram, locate_multiple_points, trace_curve, DiagramOptions};
use phasezeros::io::{write_density_csv, write_points_csv, write_zeros_csv};
use phasezeros::model::{finite_volume, presets, FiniteVolumeModel, Grid, ModelSpec, Perturbation, Rect};
use phasezeros::zeros::{
    asymptote_lines, default_gamma, default_omega, default_rho, degeneracy_audit, find_zeros_disc,
    find_zeros_region, match_zeros, predict_multipoint, predict_two_phase_in, ZeroSet, DEFAULT_MAX_DEPTH,
};
use phasezeros::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Tolerances as stated by the criteria.
const EXACT_TOL: f64 = 1e-10;
const PERTURBATION_FACTOR: f64 = 10.0;
const SPACING_FACTOR: f64 = 0.5;
const DENSITY_TOL_1000: f64 = 0.002;
const DENSITY_REL_TOL_10000: f64 = 0.01;
const MULTIPOINT_FACTOR: f64 = 5.0;
const ASYMPTOTE_TOL: f64 = 0.1;
const ASYMPTOTE_RADIUS: f64 = 5.0;
const OFFSET_TOL: f64 = 1e-10;
const TRACE_RE_TOL: f64 = 1e-9;
const TRACE_LENGTH_TOL: f64 = 1e-6;
const ANGLE_TOL: f64 = 1e-6;
const DET_REL_TOL: f64 = 1e-8;
const LEE_YANG_FACTOR: f64 = 10.0;
const LEE_YANG_SAMPLES: u64 = 20;
const PERTURBATION_SEEDS: u64 = 5;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn unperturbed(model: &ModelSpec, l: u32, d: u32) -> FiniteVolumeModel {
    finite_volume(model, l, d, 1.0, 1.0, &Perturbation::None, 0.0).unwrap()
}

/// Oracle: zeros of `q1 e^{Nz} + q2 e^{-Nz}` are `ln(q2/q1)/(2N) + i pi (2k+1)/(2N)`.
fn two_phase_oracle(q: (u32, u32), n: f64, rect: Rect) -> Vec<Complex64> {
    let re = (q.1 as f64 / q.0 as f64).ln() / (2.0 * n);
    let k_lo = ((rect.im.0 * 2.0 * n / PI - 1.0) / 2.0).floor() as i64 - 1;
    let k_hi = ((rect.im.1 * 2.0 * n / PI - 1.0) / 2.0).ceil() as i64 + 1;
    (k_lo..=k_hi)
        .map(|k| c(re, PI * (2 * k + 1) as f64 / (2.0 * n)))
        .filter(|z| rect.contains(*z))
        .collect()
}

fn by_im(set: &ZeroSet) -> Vec<Complex64> {
    let mut p: Vec<Complex64> = set.points().collect();
    p.sort_by(|a, b| a.im.total_cmp(&b.im));
    p
}

fn max_deviation(found: &[Complex64], exact: &[Complex64]) -> f64 {
    if found.len() != exact.len() {
        return f64::INFINITY;
    }
    found.iter().zip(exact).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

fn predicted_in(fvm: &FiniteVolumeModel, rect: Rect) -> ZeroSet {
    let model = fvm.base();
    let diagram = build_phase_diagram(model, &Grid::new(model.domain(), 41, 41), &DiagramOptions::for_model(model));
    let zeros = diagram
        .curves
        .iter()
        .flat_map(|cv| predict_two_phase_in(fvm, cv, rect).unwrap().zeros)
        .collect();
    ZeroSet::new(zeros, rect, fvm.l(), fvm.volume(), None)
}

fn two_phase_box(n: f64) -> Rect {
    // 6 zeros for N = 10 and 100, 64 for N = 1000.
    if n <= 10.0 {
        Rect::new(-0.1, 0.1, 0.0, 2.0)
    } else {
        Rect::new(-0.1, 0.1, 0.0, 0.2)
    }
}

fn report(n: u32, ok: bool, detail: String) -> bool {
    println!("criterion {n:>2}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn criterion_1() -> bool {
    let m2 = presets::two_phase(1, 1);
    let mut ok = true;
    let mut detail = Vec::new();
    for (l, expected) in [(10u32, 6usize), (100, 6), (1000, 64)] {
        let fvm = unperturbed(&m2, l, 1);
        let rect = two_phase_box(fvm.n());
        let exact = two_phase_oracle((1, 1), fvm.n(), rect);
        let located = find_zeros_region(&fvm, rect, DEFAULT_MAX_DEPTH).unwrap();
        let predicted = predicted_in(&fvm, rect);
        let dl = max_deviation(&by_im(&located), &exact);
        let dp = max_deviation(&by_im(&predicted), &exact);
        let tol = vec![EXACT_TOL; predicted.len()];
        let m = match_zeros(&predicted, &located, &tol, 1.0, None).unwrap();
        let good = exact.len() == expected
            && dl <= EXACT_TOL
            && dp <= EXACT_TOL
            && m.pairs.len() == expected
            && m.max_distance() <= EXACT_TOL;
        detail.push(format!("N={l}: {} zeros, dev {dl:.1e}/{dp:.1e}, match {:.1e}", located.len(), m.max_distance()));
        ok &= good;
    }
    report(1, ok, detail.join("; "))
}

fn criterion_2() -> bool {
    let fvm = unperturbed(&presets::two_phase(1, 2), 100, 1);
    let rect = two_phase_box(100.0);
    let located = by_im(&find_zeros_region(&fvm, rect, DEFAULT_MAX_DEPTH).unwrap());
    let shift = LN_2 / 200.0;
    let re_dev = located.iter().map(|z| (z.re - shift).abs()).fold(0.0, f64::max);
    let im_exact: Vec<f64> = two_phase_oracle((1, 1), 100.0, rect).iter().map(|z| z.im).collect();
    let im_dev = if located.len() == im_exact.len() {
        located.iter().zip(&im_exact).map(|(z, t)| (z.im - t).abs()).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let ok = located.len() == 6 && re_dev <= EXACT_TOL && im_dev <= EXACT_TOL;
    report(2, ok, format!("{} zeros, Re dev {re_dev:.1e}, Im dev {im_dev:.1e}", located.len()))
}

/// `tau L = 20` with `L = 10`, `d = 2`, so `N = 100`.
fn perturbed_m2(seed: u64) -> FiniteVolumeModel {
    let m2 = presets::two_phase(1, 1);
    let pert = Perturbation::random(&m2, 3, &mut ChaCha8Rng::seed_from_u64(seed));
    finite_volume(&m2, 10, 2, 2.0, 1.0, &pert, 0.5).unwrap()
}

fn criterion_3() -> bool {
    let rect = two_phase_box(100.0);
    let tol = PERTURBATION_FACTOR * (-20f64).exp();
    let mut ok = true;
    let mut worst = 0f64;
    let mut spacing = f64::INFINITY;
    for seed in 0..PERTURBATION_SEEDS {
        let fvm = perturbed_m2(seed);
        let located = find_zeros_region(&fvm, rect, DEFAULT_MAX_DEPTH).unwrap();
        let predicted = predicted_in(&fvm, rect);
        let m = match_zeros(&predicted, &located, &vec![tol; predicted.len()], 1.0, None).unwrap();
        ok &= located.len() == 6 && m.is_clean() && m.pairs.len() == located.len();
        worst = worst.max(m.max_distance());
        spacing = spacing.min(m.min_located_spacing);
    }
    ok &= worst <= tol && spacing >= SPACING_FACTOR * PI / 100.0;
    report(3, ok, format!("max distance {worst:.1e} (tol {tol:.1e}), min spacing {spacing:.4}"))
}

fn criterion_4() -> bool {
    let m2 = presets::two_phase(1, 1);
    let a = density_convergence(&m2, 0, 1, c(0.0, 0.0), &[0.1], &[1000], 1).unwrap();
    let b = density_convergence(&m2, 0, 1, c(0.0, 0.0), &[0.05], &[10000], 1).unwrap();
    let (ra, rb) = (&a.rows[0], &b.rows[0]);
    let oracle = 1.0 / PI;
    let ok = (ra.theoretical - oracle).abs() < 1e-15
        && (ra.empirical - 0.32).abs() < 1e-12
        && (ra.empirical - oracle).abs() <= DENSITY_TOL_1000
        && (rb.empirical - oracle).abs() <= DENSITY_REL_TOL_10000 * oracle;
    report(
        4,
        ok,
        format!(
            "N=1000: {:.6} (err {:.2e}); N=10000: {:.6} (err {:.2e})",
            ra.empirical,
            (ra.empirical - oracle).abs(),
            rb.empirical,
            (rb.empirical - oracle).abs()
        ),
    )
}

fn m3_disc(q: &[u32; 3], l: u32) -> (FiniteVolumeModel, ZeroSet, ZeroSet) {
    let m3 = presets::three_phase(q);
    let fvm = unperturbed(&m3, l, 1);
    let n = fvm.n();
    let rho = default_rho(n, 1.0);
    let mp = locate_multiple_points(&m3, &Grid::new(m3.domain(), 41, 41)).points.remove(0);
    let predicted = predict_multipoint(&m3, &mp, l, 1, rho).unwrap();
    let located = find_zeros_disc(&fvm, mp.z, rho, 60).unwrap();
    (fvm, predicted, located)
}

fn criterion_5() -> bool {
    let (fvm, predicted, located) = m3_disc(&[1, 1, 1], 1000);
    let n = fvm.n();
    let tol = MULTIPOINT_FACTOR * n.powf(-4.0 / 3.0);
    let m = match_zeros(&predicted, &located, &vec![tol; predicted.len()], 1.0, None).unwrap();
    let winding = located.box_winding.unwrap();
    let ok = m.is_clean()
        && !predicted.is_empty()
        && m.max_distance() <= tol
        && predicted.total_multiplicity() == winding
        && located.total_multiplicity() == winding;
    report(
        5,
        ok,
        format!(
            "{} predicted, {} located, winding {winding}, max distance {:.1e} (tol {tol:.1e})",
            predicted.len(),
            located.len(),
            m.max_distance()
        ),
    )
}

fn half_line_distance(p: Complex64, origin: Complex64, dir: Complex64) -> f64 {
    let t = ((p - origin) * dir.conj()).re.max(0.0);
    (p - (origin + dir * t)).norm()
}

fn criterion_6() -> bool {
    let m3 = presets::three_phase(&[1, 1, 2]);
    let n = 1000.0;
    let mp = locate_multiple_points(&m3, &Grid::new(m3.domain(), 41, 41)).points.remove(0);
    let lines = asymptote_lines(&m3, &mp).unwrap();
    let (_, predicted, located) = m3_disc(&[1, 1, 2], 1000);
    let radius = n * default_rho(n, 1.0);
    let mut worst = 0f64;
    let mut checked = 0;
    for z in located.points().chain(predicted.points()) {
        let w = (z - mp.z) * n;
        if w.norm() < ASYMPTOTE_RADIUS || w.norm() > radius {
            continue;
        }
        checked += 1;
        let d = lines
            .iter()
            .map(|l| half_line_distance(w, l.origin_offset, l.direction))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    let formula = LN_2 / 3f64.sqrt();
    let shifted: Vec<f64> = lines
        .iter()
        .filter(|l| l.shift_magnitude.abs() > 1e-12)
        .map(|l| l.origin_offset.norm())
        .collect();
    let offsets_ok = shifted.len() == 2 && shifted.iter().all(|o| (o - formula).abs() <= OFFSET_TOL);
    let ok = checked > 0 && worst <= ASYMPTOTE_TOL && offsets_ok;
    report(
        6,
        ok,
        format!("{checked} zeros checked, max distance {worst:.2e}; shifted offsets {shifted:?} vs {formula:.10}"),
    )
}

fn criterion_7() -> bool {
    let mut sets: Vec<(FiniteVolumeModel, ZeroSet)> = Vec::new();
    for l in [10u32, 100, 1000] {
        let fvm = unperturbed(&presets::two_phase(1, 1), l, 1);
        let z = find_zeros_region(&fvm, two_phase_box(fvm.n()), DEFAULT_MAX_DEPTH).unwrap();
        sets.push((fvm, z));
    }
    let fvm = unperturbed(&presets::two_phase(1, 2), 100, 1);
    let z = find_zeros_region(&fvm, two_phase_box(100.0), DEFAULT_MAX_DEPTH).unwrap();
    sets.push((fvm, z));
    for seed in 0..PERTURBATION_SEEDS {
        let fvm = perturbed_m2(seed);
        let z = find_zeros_region(&fvm, two_phase_box(100.0), DEFAULT_MAX_DEPTH).unwrap();
        sets.push((fvm, z));
    }
    let two_phase_sets = sets.len();
    let (fvm, _, z) = m3_disc(&[1, 1, 1], 1000);
    sets.push((fvm, z));
    let mut ok = true;
    let mut total = 0;
    let mut violations = 0;
    for (k, (fvm, z)) in sets.iter().enumerate() {
        let audit = degeneracy_audit(fvm, z);
        violations += audit.violations.len();
        let cap = if k < two_phase_sets { 1 } else { 2 };
        ok &= z.zeros.iter().all(|w| w.multiplicity >= 1 && w.multiplicity <= cap);
        total += z.len();
    }
    ok &= violations == 0;
    report(7, ok, format!("{total} zeros audited, {violations} violations"))
}

fn criterion_8() -> bool {
    let m2 = presets::two_phase(1, 1);
    // 100 steps each way from the origin: 200 steps in total.
    let curve = trace_curve(&m2, 0, 1, c(0.0, 0.0), 0.01, 100).unwrap();
    let max_re = curve.points().map(|z| z.re.abs()).fold(0.0, f64::max);
    let length = curve.length();
    let m3 = presets::three_phase(&[1, 1, 1]);
    let d = build_phase_diagram(&m3, &Grid::new(m3.domain(), 41, 41), &DiagramOptions::for_model(&m3));
    let mut angle_dev = f64::INFINITY;
    let mut arcs = 0;
    if d.multiple_points.len() == 1 && d.multiple_points[0].z.norm() < 1e-12 {
        let mut angles: Vec<f64> = d.incident_directions(&m3, 0).iter().map(|v| v.arg()).collect();
        arcs = angles.len();
        angles.sort_by(f64::total_cmp);
        if arcs == 3 {
            angle_dev = (0..3)
                .map(|i| {
                    let gap = (angles[(i + 1) % 3] - angles[i]).rem_euclid(2.0 * PI);
                    (gap - 2.0 * PI / 3.0).abs()
                })
                .fold(0.0, f64::max);
        }
    }
    let ok = max_re <= TRACE_RE_TOL
        && (length - 2.0).abs() <= TRACE_LENGTH_TOL
        && d.curves.len() == 3
        && arcs == 3
        && angle_dev <= ANGLE_TOL;
    report(
        8,
        ok,
        format!("max |Re z| {max_re:.1e}, length {length:.9}, {arcs} arcs, angle dev {angle_dev:.1e}"),
    )
}

fn criterion_9() -> bool {
    let two = unperturbed(&presets::two_phase(1, 1), 10, 1);
    let r2 = vandermonde_report(&two, &[0, 1], c(0.0, 0.4)).unwrap();
    let half = 0.5f64.sqrt();
    let ok2 = (r2.inverse_norm - half).abs() <= EXACT_TOL && (r2.inverse_bound - half).abs() <= EXACT_TOL;
    let three = unperturbed(&presets::three_phase(&[1, 1, 1]), 10, 1);
    let r3 = vandermonde_report(&three, &[0, 1, 2], c(0.0, 0.0)).unwrap();
    let strict = r3.inverse_norm < r3.inverse_bound;
    let det_ok = (r3.det_abs - r3.det_pairwise).abs() <= DET_REL_TOL * r3.det_pairwise
        && (r2.det_abs - r2.det_pairwise).abs() <= DET_REL_TOL * r2.det_pairwise;
    report(
        9,
        ok2 && strict && det_ok,
        format!(
            "2x2 {:.12}/{:.12}; 3x3 inverse norm {:.17} vs bound {:.17} (strict: {strict}); det identity {det_ok}",
            r2.inverse_norm, r2.inverse_bound, r3.inverse_norm, r3.inverse_bound
        ),
    )
}

fn criterion_10() -> bool {
    let model = presets::lee_yang();
    let rect = Rect::new(-0.1, 0.1, 0.0, 1.0);
    let tol = LEE_YANG_FACTOR * (-20f64).exp();
    let expected = (100.0 / (2.0 * PI) * 2.0).floor() as i64;
    let mut ok = true;
    let mut worst = 0f64;
    let mut counts = Vec::new();
    for seed in 0..LEE_YANG_SAMPLES {
        let pert = Perturbation::lee_yang_symmetric(&model, 0, 1, 3, &mut ChaCha8Rng::seed_from_u64(seed));
        let fvm = finite_volume(&model, 10, 2, 2.0, 1.0, &pert, 0.0).unwrap();
        let zs = find_zeros_region(&fvm, rect, DEFAULT_MAX_DEPTH).unwrap();
        let rep = lee_yang_audit(&fvm, &zs, 0, 1, 41, LEE_YANG_FACTOR).unwrap();
        worst = worst.max(rep.max_abs_re);
        let count: i64 = zs.zeros.iter().filter(|z| z.z.im > 0.0 && z.z.im <= 1.0).map(|z| z.multiplicity as i64).sum();
        ok &= (count - expected).abs() <= 1;
        counts.push(count);
    }
    ok &= worst <= tol;
    counts.dedup();
    report(10, ok, format!("max |Re w| {worst:.1e} (tol {tol:.1e}), counts {counts:?} vs {expected} +- 1"))
}

fn criterion_11() -> bool {
    let m3 = presets::three_phase(&[1, 1, 1]);
    let n = 1000.0;
    let (omega, gamma, rho) = (default_omega(n), default_gamma(n, 5.0), default_rho(n, 1.0));
    // The grid resolves the scale rho around the triple point.
    let grid = Grid::new(Rect::around(c(0.0, 0.0), 0.05), 101, 101);
    let defaults = covering_check(&m3, 1000, 1, omega, gamma, rho, &grid).unwrap();
    let bare = covering_check(&m3, 1000, 1, omega, gamma, 0.0, &grid).unwrap();
    let near = bare.uncovered.iter().all(|z| z.norm() < gamma);
    let has_centre = bare.uncovered.iter().any(|z| z.norm() < 1e-12);
    let ok = defaults.fully_covered() && !bare.uncovered.is_empty() && near && has_centre;
    report(
        11,
        ok,
        format!(
            "defaults: {} uncovered of {} needing a disc (chi required {:.3}, rho/gamma {:.3}); rho = 0: {} uncovered, all within gamma: {near}",
            defaults.uncovered.len(),
            defaults.needing_disc,
            defaults.chi_required,
            defaults.rho_over_gamma,
            bare.uncovered.len()
        ),
    )
}

/// Every CSV artifact of the criteria above.
fn artifacts() -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut push = |name: String, f: &dyn Fn(&mut Vec<u8>)| {
        let mut buf = Vec::new();
        f(&mut buf);
        out.push((name, buf));
    };
    for l in [10u32, 100, 1000] {
        let fvm = unperturbed(&presets::two_phase(1, 1), l, 1);
        let rect = two_phase_box(fvm.n());
        let located = find_zeros_region(&fvm, rect, DEFAULT_MAX_DEPTH).unwrap();
        let predicted = predicted_in(&fvm, rect);
        push(format!("located_{l}.csv"), &|b| write_zeros_csv(b, &located.zeros).unwrap());
        push(format!("predicted_{l}.csv"), &|b| write_zeros_csv(b, &predicted.zeros).unwrap());
    }
    for seed in 0..PERTURBATION_SEEDS {
        let z = find_zeros_region(&perturbed_m2(seed), two_phase_box(100.0), DEFAULT_MAX_DEPTH).unwrap();
        push(format!("perturbed_{seed}.csv"), &|b| write_zeros_csv(b, &z.zeros).unwrap());
    }
    let m2 = presets::two_phase(1, 1);
    let t = density_convergence(&m2, 0, 1, c(0.0, 0.0), &[0.1, 0.05], &[1000, 10000], 1).unwrap();
    push("density.csv".into(), &|b| write_density_csv(b, &t).unwrap());
    let (_, predicted, located) = m3_disc(&[1, 1, 1], 1000);
    push("multipoint_predicted.csv".into(), &|b| write_zeros_csv(b, &predicted.zeros).unwrap());
    push("multipoint_located.csv".into(), &|b| write_zeros_csv(b, &located.zeros).unwrap());
    let m3 = presets::three_phase(&[1, 1, 1]);
    let grid = Grid::new(Rect::around(c(0.0, 0.0), 0.05), 101, 101);
    let cov = covering_check(&m3, 1000, 1, default_omega(1000.0), default_gamma(1000.0, 5.0), 0.0, &grid).unwrap();
    push("uncovered.csv".into(), &|b| write_points_csv(b, &cov.uncovered).unwrap());
    out
}

fn criterion_12() -> bool {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(artifacts)
    };
    let serial = run(1);
    let parallel = run(8);
    let differing: Vec<&str> = serial
        .iter()
        .zip(&parallel)
        .filter(|(a, b)| a != b)
        .map(|(a, _)| a.0.as_str())
        .collect();
    let ok = serial.len() == parallel.len() && differing.is_empty();
    let bytes: usize = serial.iter().map(|a| a.1.len()).sum();
    report(12, ok, format!("{} CSVs, {bytes} bytes; differing: {differing:?}", serial.len()))
}

fn main() {
    let criteria: [fn() -> bool; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    let mut failed = Vec::new();
    for (i, f) in criteria.iter().enumerate() {
        let ok = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| report(i as u32 + 1, false, "panicked".into()));
        if !ok {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 12 criteria pass");
    } else {
        println!("acceptance: failing criteria {failed:?}");
        std::process::exit(1);
    }
}
