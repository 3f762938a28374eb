use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use log::{info, warn};
use phasezeros::analysis::{covering_check, lee_yang_audit, LeeYangReport};
use phasezeros::density::density_convergence;
use phasezeros::diagram::{build_phase_diagram, locate_multiple_points, DiagramOptions, PhaseDiagram, Termination};
use phasezeros::io::{self, AsymptoteOverlay, SvgPlot};
use phasezeros::model::{check_assumption_a, finite_volume, presets, FiniteVolumeModel, Grid, ModelSpec, Perturbation, Rect};
use phasezeros::zeros::{
    asymptote_lines, default_gamma, default_omega, default_rho, degeneracy_audit, delta_l, find_zeros_disc,
    find_zeros_region, gamma_warnings, match_zeros, predict_multipoint, predict_two_phase_in, MatchReport, ZeroSet,
};
use phasezeros::{Complex64, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::args::{Cli, Command, CoveringArgs, DensityArgs, DiagramArgs, LeeYangArgs, MultipointArgs, VolumeArgs, ZeroArgs};

struct Out {
    dir: PathBuf,
}

impl Out {
    fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Out { dir: dir.to_path_buf() })
    }

    fn file(&self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        info!("writing {}", path.display());
        Ok(BufWriter::new(f))
    }

    fn csv(&self, name: &str, write: impl FnOnce(&mut BufWriter<File>) -> phasezeros::Result<()>) -> Result<()> {
        let mut f = self.file(name)?;
        write(&mut f).with_context(|| format!("writing {name}"))?;
        f.flush()?;
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut f = self.file(name)?;
        serde_json::to_writer_pretty(&mut f, value)?;
        writeln!(f)?;
        f.flush()?;
        Ok(())
    }

    fn text(&self, name: &str, text: &str) -> Result<()> {
        let mut f = self.file(name)?;
        f.write_all(text.as_bytes())?;
        f.flush()?;
        Ok(())
    }
}

pub fn load_model(spec: Option<&str>) -> Result<ModelSpec> {
    let Some(spec) = spec else {
        bail!(Error::Argument("--model is required".into()));
    };
    if let Some(name) = spec.strip_prefix("preset:") {
        return Ok(match name {
            "m2" => presets::two_phase(1, 1),
            "m2-q12" => presets::two_phase(1, 2),
            "m3" => presets::three_phase(&[1, 1, 1]),
            "m3-q112" => presets::three_phase(&[1, 1, 2]),
            "m4" => presets::four_phase(),
            "lee-yang" => presets::lee_yang(),
            other => bail!(Error::Argument(format!("unknown preset '{other}'"))),
        });
    }
    Ok(io::load_model(spec)?)
}

pub fn run(cli: &Cli) -> Result<()> {
    let model = load_model(cli.model.as_deref())?;
    let out = Out::new(&cli.out)?;
    match &cli.command {
        Command::TraceDiagram(a) => trace_diagram(&model, a, &out, cli.svg),
        Command::FindZeros(a) => find_zeros(&model, a, &out, cli.svg),
        Command::PredictZeros(a) => predict_zeros(&model, a, &out, cli.svg),
        Command::Compare(a) => compare(&model, a, &out, cli.svg),
        Command::Density(a) => density(&model, a, &out),
        Command::Multipoint(a) => multipoint(&model, a, &out, cli.svg),
        Command::Asymptotes(a) => asymptotes(&model, a, &out, cli.svg),
        Command::CheckAssumptions(a) => check_assumptions(&model, a, &out),
        Command::LeeYang(a) => lee_yang(&model, a, &out),
        Command::Covering(a) => covering(&model, a, &out),
    }
}

fn grid(model: &ModelSpec, size: usize) -> Result<Grid> {
    if size < 4 {
        bail!(Error::Argument(format!("grid size must be at least 4, got {size}")));
    }
    Ok(Grid::new(model.domain(), size, size))
}

fn diagram(model: &ModelSpec, size: usize) -> Result<PhaseDiagram> {
    let d = build_phase_diagram(model, &grid(model, size)?, &DiagramOptions::for_model(model));
    for diag in &d.diagnostics {
        warn!("diagram: {diag:?}");
    }
    Ok(d)
}

fn volume(model: &ModelSpec, v: &VolumeArgs) -> Result<FiniteVolumeModel> {
    let pert = match v.seed {
        Some(seed) => Perturbation::random(model, v.pert_degree, &mut ChaCha8Rng::seed_from_u64(seed)),
        None => Perturbation::None,
    };
    Ok(finite_volume(model, v.l, v.d, v.tau, v.kappa, &pert, v.theta)?)
}

/// A thin box above the domain center: `+-5%` of the domain width in `Re`
/// and height `20 / N` in `Im`.
fn default_box(model: &ModelSpec, n: f64) -> Rect {
    let d = model.domain();
    let c = d.center();
    let half = 0.05 * d.width();
    Rect::new(c.re - half, c.re + half, c.im, (c.im + 20.0 / n).min(d.im.1))
}

fn search_box(model: &ModelSpec, rect: Option<Rect>, n: f64) -> Result<Rect> {
    let rect = rect.unwrap_or_else(|| default_box(model, n));
    rect.validate()?;
    if !model.domain().contains_rect(&rect) {
        bail!(Error::Argument(format!("box {rect} leaves the domain {}", model.domain())));
    }
    Ok(rect)
}

fn svg_for(out: &Out, name: &str, viewport: Rect, d: Option<&PhaseDiagram>, zeros: &[&ZeroSet]) -> Result<()> {
    let mut plot = SvgPlot::new(viewport)?;
    if let Some(d) = d {
        plot.diagram(d);
    }
    for (i, z) in zeros.iter().enumerate() {
        plot.zeros(z, i);
    }
    out.text(name, &plot.render())
}

#[derive(Serialize)]
struct CurveSummary {
    pair: (usize, usize),
    samples: usize,
    length: f64,
    ends: [Termination; 2],
    file: String,
}

#[derive(Serialize)]
struct DiagramSummary<'a> {
    curves: Vec<CurveSummary>,
    multiple_points: &'a [phasezeros::diagram::MultiplePoint],
    min_angles: &'a [f64],
    diagnostics: &'a [phasezeros::diagram::TopologyDiagnostic],
}

fn trace_diagram(model: &ModelSpec, a: &DiagramArgs, out: &Out, svg: bool) -> Result<()> {
    let d = diagram(model, a.grid)?;
    let mut curves = Vec::new();
    for (i, c) in d.curves.iter().enumerate() {
        let file = format!("curve_{i:03}.csv");
        out.csv(&file, |w| io::write_curve_csv(w, c))?;
        curves.push(CurveSummary {
            pair: c.pair,
            samples: c.samples.len(),
            length: c.length(),
            ends: c.ends,
            file,
        });
    }
    let mps: Vec<Complex64> = d.multiple_points.iter().map(|m| m.z).collect();
    out.csv("multiple_points.csv", |w| io::write_points_csv(w, &mps))?;
    out.json(
        "diagram.json",
        &DiagramSummary {
            curves,
            multiple_points: &d.multiple_points,
            min_angles: &d.min_angles,
            diagnostics: &d.diagnostics,
        },
    )?;
    if svg {
        svg_for(out, "diagram.svg", model.domain(), Some(&d), &[])?;
    }
    println!("{} curves, {} multiple points", d.curves.len(), d.multiple_points.len());
    Ok(())
}

#[derive(Serialize)]
struct ZeroSummary<'a> {
    region: Rect,
    l: u32,
    volume: u64,
    count: usize,
    total_multiplicity: i64,
    box_winding: Option<i64>,
    consistent: bool,
    degeneracy: &'a phasezeros::zeros::DegeneracyReport,
}

fn locate(model: &ModelSpec, a: &ZeroArgs) -> Result<(FiniteVolumeModel, Rect, ZeroSet)> {
    let fvm = volume(model, &a.volume)?;
    let rect = search_box(model, a.rect, fvm.n())?;
    let zs = find_zeros_region(&fvm, rect, a.max_depth)?;
    Ok((fvm, rect, zs))
}

fn find_zeros(model: &ModelSpec, a: &ZeroArgs, out: &Out, svg: bool) -> Result<()> {
    let (fvm, rect, zs) = locate(model, a)?;
    let audit = degeneracy_audit(&fvm, &zs);
    out.csv("zeros.csv", |w| io::write_zeros_csv(w, &zs.zeros))?;
    out.json(
        "find_zeros.json",
        &ZeroSummary {
            region: rect,
            l: zs.l,
            volume: zs.volume,
            count: zs.len(),
            total_multiplicity: zs.total_multiplicity(),
            box_winding: zs.box_winding,
            consistent: zs.is_consistent(),
            degeneracy: &audit,
        },
    )?;
    if svg {
        svg_for(out, "zeros.svg", rect, None, &[&zs])?;
    }
    println!("{} zeros in {rect} (winding {:?})", zs.len(), zs.box_winding);
    Ok(())
}

/// Tolerances below this (relative) size are not resolvable in double precision.
const TOL_FLOOR: f64 = 1e-12;

/// Two-phase predictions in `rect` from every curve, with the matching
/// tolerance `delta_L` of each.
fn predict_in_box(fvm: &FiniteVolumeModel, d: &PhaseDiagram, rect: Rect, gamma: f64) -> Result<(ZeroSet, Vec<f64>)> {
    let model = fvm.base();
    let mut found = Vec::new();
    for c in &d.curves {
        let (m, n) = c.pair;
        for z in predict_two_phase_in(fvm, c, rect)?.zeros {
            let tol = match delta_l(model, z.z, fvm.l(), fvm.d(), gamma, fvm.tau(), fvm.kappa(), [m, n]) {
                Ok(t) => t.max(TOL_FLOOR * z.z.norm().max(1.0)),
                Err(Error::Domain { .. }) => f64::NAN,
                Err(e) => return Err(e.into()),
            };
            found.push((z, tol));
        }
    }
    let set = ZeroSet::new(found.iter().map(|p| p.0).collect(), rect, fvm.l(), fvm.volume(), None);
    let tolerances = set
        .points()
        .map(|z| {
            found
                .iter()
                .min_by(|a, b| (a.0.z - z).norm().total_cmp(&(b.0.z - z).norm()))
                .map_or(f64::NAN, |p| p.1)
        })
        .collect();
    Ok((set, tolerances))
}

fn predict_zeros(model: &ModelSpec, a: &ZeroArgs, out: &Out, svg: bool) -> Result<()> {
    let fvm = volume(model, &a.volume)?;
    let rect = search_box(model, a.rect, fvm.n())?;
    let d = diagram(model, a.grid)?;
    let (pred, _) = predict_in_box(&fvm, &d, rect, default_gamma(fvm.n(), a.gamma_scale))?;
    out.csv("predicted.csv", |w| io::write_zeros_csv(w, &pred.zeros))?;
    if svg {
        svg_for(out, "predicted.svg", rect, Some(&d), &[&pred])?;
    }
    println!("{} predicted zeros in {rect}", pred.len());
    Ok(())
}

#[derive(Serialize)]
struct CompareSummary<'a> {
    region: Rect,
    gamma: f64,
    located: usize,
    predicted: usize,
    matched: usize,
    max_distance: f64,
    clean: bool,
    warnings: Vec<String>,
    report: &'a MatchReport,
    degeneracy: &'a phasezeros::zeros::DegeneracyReport,
}

fn compare(model: &ModelSpec, a: &ZeroArgs, out: &Out, svg: bool) -> Result<()> {
    let (fvm, rect, located) = locate(model, a)?;
    let gamma = default_gamma(fvm.n(), a.gamma_scale);
    let warnings = gamma_warnings(fvm.l(), fvm.d(), gamma, fvm.tau());
    for w in &warnings {
        warn!("{w}");
    }
    let d = diagram(model, a.grid)?;
    let (predicted, tol) = predict_in_box(&fvm, &d, rect, gamma)?;
    let report = match_zeros(&predicted, &located, &tol, a.c_match, None)?;
    let audit = degeneracy_audit(&fvm, &located);
    out.csv("located.csv", |w| io::write_zeros_csv(w, &located.zeros))?;
    out.csv("predicted.csv", |w| io::write_zeros_csv(w, &predicted.zeros))?;
    out.csv("matches.csv", |w| io::write_matches_csv(w, &report, &predicted, &located))?;
    out.json(
        "match_report.json",
        &CompareSummary {
            region: rect,
            gamma,
            located: located.len(),
            predicted: predicted.len(),
            matched: report.pairs.len(),
            max_distance: report.max_distance(),
            clean: report.is_clean(),
            warnings,
            report: &report,
            degeneracy: &audit,
        },
    )?;
    if svg {
        svg_for(out, "compare.svg", rect, Some(&d), &[&located, &predicted])?;
    }
    println!(
        "{} matched pairs ({} located, {} predicted), max distance {:.3e}",
        report.pairs.len(),
        located.len(),
        predicted.len(),
        report.max_distance()
    );
    if !report.is_clean() {
        warn!(
            "matching is not clean: {} unmatched predicted, {} unmatched located, {} non-mutual, {} violations",
            report.unmatched_predicted.len(),
            report.unmatched_located.len(),
            report.non_mutual.len(),
            report.violations.len()
        );
    }
    Ok(())
}

fn density(model: &ModelSpec, a: &DensityArgs, out: &Out) -> Result<()> {
    let table = density_convergence(model, a.pair.0, a.pair.1, a.at, &a.eps, &a.l, a.d)?;
    out.csv("density.csv", |w| io::write_density_csv(w, &table))?;
    out.json("density.json", &table)?;
    for r in &table.rows {
        println!(
            "epsilon {} L {}: empirical {:.6} theoretical {:.6} error {:.3e}",
            r.epsilon, r.l, r.empirical, r.theoretical, r.abs_error
        );
    }
    Ok(())
}

#[derive(Serialize)]
struct MultipointSummary {
    z: Complex64,
    stable_set: Vec<usize>,
    rho: f64,
    predicted: usize,
    located: usize,
    circle_winding: Option<i64>,
    matched: usize,
    max_distance: f64,
    report: MatchReport,
}

fn multipoint(model: &ModelSpec, a: &MultipointArgs, out: &Out, svg: bool) -> Result<()> {
    let fvm = finite_volume(model, a.l, a.d, 1.0, 1.0, &Perturbation::None, 0.0)?;
    let n = fvm.n();
    let rho = default_rho(n, a.rho_scale);
    let mps = locate_multiple_points(model, &grid(model, a.grid)?).points;
    let mut summaries = Vec::new();
    for (k, mp) in mps.iter().enumerate() {
        let predicted = predict_multipoint(model, mp, a.l, a.d, rho)?;
        let located = find_zeros_disc(&fvm, mp.z, rho, a.max_depth)?;
        let tol = vec![n.powf(-4.0 / 3.0); predicted.len()];
        let report = match_zeros(&predicted, &located, &tol, a.c_match, None)?;
        out.csv(&format!("multipoint_{k}_predicted.csv"), |w| io::write_zeros_csv(w, &predicted.zeros))?;
        out.csv(&format!("multipoint_{k}_located.csv"), |w| io::write_zeros_csv(w, &located.zeros))?;
        out.csv(&format!("multipoint_{k}_matches.csv"), |w| {
            io::write_matches_csv(w, &report, &predicted, &located)
        })?;
        if svg {
            svg_for(out, &format!("multipoint_{k}.svg"), Rect::around(mp.z, rho), None, &[&located, &predicted])?;
        }
        println!(
            "multiple point {k} at {}: {} predicted, {} located, winding {:?}, max distance {:.3e}",
            mp.z,
            predicted.len(),
            located.len(),
            located.box_winding,
            report.max_distance()
        );
        summaries.push(MultipointSummary {
            z: mp.z,
            stable_set: mp.stable_set.clone(),
            rho,
            predicted: predicted.len(),
            located: located.len(),
            circle_winding: located.box_winding,
            matched: report.pairs.len(),
            max_distance: report.max_distance(),
            report,
        });
    }
    out.json("multipoint.json", &summaries)
}

fn asymptotes(model: &ModelSpec, a: &MultipointArgs, out: &Out, svg: bool) -> Result<()> {
    let n = (a.l as f64).powi(a.d as i32);
    let mps = locate_multiple_points(model, &grid(model, a.grid)?).points;
    let mut all = Vec::new();
    let mut overlays = Vec::new();
    for mp in &mps {
        let lines = asymptote_lines(model, mp)?;
        for l in &lines {
            println!(
                "({}, {}): offset {} direction {} shift {:.10}",
                l.side.0, l.side.1, l.origin_offset, l.direction, l.shift_magnitude
            );
        }
        overlays.push(AsymptoteOverlay { z_m: mp.z, n, lines: lines.clone() });
        all.push((mp.z, lines));
    }
    out.json("asymptotes.json", &all)?;
    if svg {
        let d = diagram(model, a.grid)?;
        let mut plot = SvgPlot::new(model.domain())?;
        plot.diagram(&d);
        for o in &overlays {
            plot.asymptotes(o);
        }
        out.text("asymptotes.svg", &plot.render())?;
    }
    Ok(())
}

fn check_assumptions(model: &ModelSpec, a: &DiagramArgs, out: &Out) -> Result<()> {
    let report = check_assumption_a(model, &grid(model, a.grid)?)?;
    out.json("assumptions.json", &report)?;
    if !report.violations.is_empty() {
        for v in &report.violations {
            println!("{:?} violated at {} (margin {:.3e})", v.kind, v.z, v.margin);
        }
        bail!(Error::Hypothesis(format!("{} assumption violations", report.violations.len())));
    }
    println!("all assumptions hold on the grid");
    Ok(())
}

fn lee_yang(model: &ModelSpec, a: &LeeYangArgs, out: &Out) -> Result<()> {
    let v = &a.volume;
    let base_seed = v.seed.unwrap_or(0);
    let mut reports: Vec<LeeYangReport> = Vec::new();
    for s in 0..a.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed + s);
        let pert = Perturbation::lee_yang_symmetric(model, a.plus, a.minus, v.pert_degree, &mut rng);
        let fvm = finite_volume(model, v.l, v.d, v.tau, v.kappa, &pert, v.theta)?;
        let rect = search_box(model, a.rect, fvm.n())?;
        let zs = find_zeros_region(&fvm, rect, a.max_depth)?;
        let rep = lee_yang_audit(&fvm, &zs, a.plus, a.minus, a.grid, a.tol_factor)?;
        out.csv(&format!("lee_yang_{s}.csv"), |w| io::write_zeros_csv(w, &zs.zeros))?;
        println!(
            "sample {s}: {} zeros, max |Re w| {:.3e} (tolerance {:.3e})",
            rep.zero_count, rep.max_abs_re, rep.tolerance
        );
        reports.push(rep);
    }
    out.json("lee_yang.json", &reports)
}

fn covering(model: &ModelSpec, a: &CoveringArgs, out: &Out) -> Result<()> {
    let n = (a.l as f64).powi(a.d as i32);
    let rect = match a.rect {
        Some(r) => search_box(model, Some(r), n)?,
        None => model.domain(),
    };
    let g = Grid::new(rect, a.grid, a.grid);
    let report = covering_check(
        model,
        a.l,
        a.d,
        a.omega.unwrap_or_else(|| default_omega(n)),
        default_gamma(n, a.gamma_scale),
        default_rho(n, a.rho_scale),
        &g,
    )?;
    out.csv("uncovered.csv", |w| io::write_points_csv(w, &report.uncovered))?;
    out.json("covering.json", &report)?;
    println!(
        "{} points checked, {} need a disc, {} uncovered, chi required {:.4}",
        report.points_checked,
        report.needing_disc,
        report.uncovered.len(),
        report.chi_required
    );
    Ok(())
}
