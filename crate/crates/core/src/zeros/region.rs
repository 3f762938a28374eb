use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::{winding_of, Contour};
use super::eval::{PartitionFn, Scaled};
use crate::error::{Error, Result};
use crate::model::{FiniteVolumeModel, Rect};

/// Default quadtree depth limit.
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Split positions tried in turn when a split line passes too close to a zero.
const SPLITS: [f64; 5] = [0.5371, 0.4471, 0.6173, 0.3553, 0.5829];
const CIRCLE_JITTER: [f64; 3] = [1.0, 0.61, 0.37];
const NEWTON_ITERATIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BruteForce,
    TwoPhaseEq,
    MultipointEq,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::BruteForce => "brute_force",
            Method::TwoPhaseEq => "two_phase_eq",
            Method::MultipointEq => "multipoint_eq",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zero {
    pub z: Complex64,
    pub multiplicity: u32,
    /// `|W(z)|` after polishing.
    pub residual: f64,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    /// Sorted by real part, then imaginary part.
    pub zeros: Vec<Zero>,
    pub region: Rect,
    pub l: u32,
    pub volume: u64,
    /// Winding number of the region boundary, when it was computed.
    pub box_winding: Option<i64>,
}

fn lex(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl ZeroSet {
    /// Sorts `zeros` and drops points within `1e-12` of an earlier one.
    pub fn new(mut zeros: Vec<Zero>, region: Rect, l: u32, volume: u64, box_winding: Option<i64>) -> Self {
        zeros.sort_by(|a, b| lex(&a.z, &b.z));
        let mut kept: Vec<Zero> = Vec::with_capacity(zeros.len());
        for z in zeros {
            if !kept.iter().rev().take_while(|k| z.z.re - k.z.re <= 1e-12).any(|k| (k.z - z.z).norm() <= 1e-12) {
                kept.push(z);
            }
        }
        ZeroSet {
            zeros: kept,
            region,
            l,
            volume,
            box_winding,
        }
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn total_multiplicity(&self) -> i64 {
        self.zeros.iter().map(|z| z.multiplicity as i64).sum()
    }

    /// True when the multiplicities add up to the boundary winding number.
    pub fn is_consistent(&self) -> bool {
        self.box_winding.is_none_or(|w| w == self.total_multiplicity())
    }

    pub fn points(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.zeros.iter().map(|z| z.z)
    }

    /// Zeros inside `rect`.
    pub fn restricted(&self, rect: Rect) -> ZeroSet {
        ZeroSet {
            zeros: self.zeros.iter().copied().filter(|z| rect.contains(z.z)).collect(),
            region: rect,
            l: self.l,
            volume: self.volume,
            box_winding: None,
        }
    }
}

/// Tuning for the quadtree search on a scaled function.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SearchParams {
    /// Cells below this diameter are polished directly.
    pub leaf_diameter: f64,
    /// Radius of the circle used to read off multiplicities.
    pub multiplicity_radius: f64,
    pub max_depth: u32,
    pub residual_tol: f64,
}

fn split(cell: &Rect, fx: f64, fy: f64) -> [Rect; 4] {
    let x = cell.re.0 + fx * cell.width();
    let y = cell.im.0 + fy * cell.height();
    [
        Rect::new(cell.re.0, x, cell.im.0, y),
        Rect::new(x, cell.re.1, cell.im.0, y),
        Rect::new(cell.re.0, x, y, cell.im.1),
        Rect::new(x, cell.re.1, y, cell.im.1),
    ]
}

enum Step {
    Leaf(Rect, i64),
    Children(Vec<(Rect, i64)>),
}

fn subdivide(f: &impl Scaled, cell: Rect, winding: i64, params: &SearchParams) -> Result<Step> {
    if cell.diameter() < params.leaf_diameter {
        return Ok(Step::Leaf(cell, winding));
    }
    for (i, &fx) in SPLITS.iter().enumerate() {
        let fy = SPLITS[(i + 2) % SPLITS.len()];
        let kids = split(&cell, fx, fy);
        let windings: Result<Vec<i64>> = kids.iter().map(|k| winding_of(f, &Contour::Rect(*k))).collect();
        match windings {
            Ok(w) if w.iter().sum::<i64>() == winding && w.iter().all(|&k| k >= 0) => {
                return Ok(Step::Children(
                    kids.into_iter().zip(w).filter(|(_, w)| *w > 0).collect(),
                ));
            }
            Ok(_) | Err(Error::ContourDegenerate { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::UnresolvedCluster { cell, winding })
}

/// Newton with multiplicity `k` from the cell centre.
fn polish(f: &impl Scaled, cell: &Rect, k: i64, params: &SearchParams) -> Option<Complex64> {
    let mut z = cell.center();
    let reach = cell.diameter().max(params.multiplicity_radius);
    for _ in 0..NEWTON_ITERATIONS {
        let (w, dw) = f.eval(z);
        if w.norm() == 0.0 {
            break;
        }
        if dw.norm() == 0.0 || !dw.re.is_finite() {
            return None;
        }
        let step = w / dw * k as f64;
        z -= step;
        if (z - cell.center()).norm() > reach {
            return None;
        }
        if step.norm() <= 1e-15 * z.norm().max(params.leaf_diameter) {
            break;
        }
    }
    Some(z)
}

fn multiplicity(f: &impl Scaled, z: Complex64, radius: f64) -> Result<i64> {
    let mut last = Err(Error::ContourDegenerate { near: z });
    for s in CIRCLE_JITTER {
        last = winding_of(f, &Contour::Circle { center: z, radius: radius * s });
        if last.is_ok() {
            break;
        }
    }
    last
}

fn resolve_leaf(f: &impl Scaled, cell: Rect, winding: i64, params: &SearchParams, method: Method) -> Result<Zero> {
    let unresolved = || Error::UnresolvedCluster { cell, winding };
    let z = polish(f, &cell, winding, params).ok_or_else(unresolved)?;
    let m = multiplicity(f, z, params.multiplicity_radius)?;
    if m != winding {
        return Err(unresolved());
    }
    let residual = f.value(z).norm();
    if residual > params.residual_tol {
        log::warn!("zero at {z} polished only to residual {residual:.3e}");
    }
    Ok(Zero {
        z,
        multiplicity: m as u32,
        residual,
        method,
    })
}

/// Quadtree search for all zeros of `f` in `rect`. Returns the zeros and the
/// winding number of the boundary.
pub(crate) fn search(f: &impl Scaled, rect: Rect, params: &SearchParams, method: Method) -> Result<(Vec<Zero>, i64)> {
    let total = winding_of(f, &Contour::Rect(rect))?;
    if total < 0 {
        return Err(Error::ContourDegenerate { near: rect.center() });
    }
    let mut frontier = if total > 0 { vec![(rect, total)] } else { Vec::new() };
    let mut leaves = Vec::new();
    let mut depth = 0;
    while !frontier.is_empty() {
        if depth > params.max_depth {
            let (cell, winding) = frontier[0];
            return Err(Error::UnresolvedCluster { cell, winding });
        }
        let steps: Vec<Step> = frontier
            .par_iter()
            .map(|&(cell, w)| subdivide(f, cell, w, params))
            .collect::<Result<_>>()?;
        frontier = Vec::new();
        for s in steps {
            match s {
                Step::Leaf(cell, w) => leaves.push((cell, w)),
                Step::Children(kids) => frontier.extend(kids),
            }
        }
        depth += 1;
    }
    let zeros: Vec<Zero> = leaves
        .par_iter()
        .map(|&(cell, w)| resolve_leaf(f, cell, w, params, method))
        .collect::<Result<_>>()?;
    Ok((zeros, total))
}

/// All zeros of the finite-volume partition function in `rect`, located by
/// the argument principle and polished by Newton's method.
pub fn find_zeros_region(fvm: &FiniteVolumeModel, rect: Rect, max_depth: u32) -> Result<ZeroSet> {
    rect.validate()?;
    if !fvm.base().domain().contains_rect(&rect) {
        return Err(Error::Domain {
            z: rect.center(),
            reason: format!("search box {rect} leaves the domain"),
        });
    }
    let n = fvm.n();
    let params = SearchParams {
        leaf_diameter: 1e-3 / n,
        multiplicity_radius: 1e-2 / n,
        max_depth,
        residual_tol: 1e-10,
    };
    let (zeros, total) = search(&PartitionFn { fvm }, rect, &params, Method::BruteForce)?;
    Ok(ZeroSet::new(zeros, rect, fvm.l(), fvm.volume(), Some(total)))
}

/// Zeros in the closed disc `|z - center| <= radius`. The quadtree runs on
/// a slightly larger, off-center square; `box_winding` is the winding number
/// of the circle itself.
pub fn find_zeros_disc(fvm: &FiniteVolumeModel, center: Complex64, radius: f64, max_depth: u32) -> Result<ZeroSet> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Argument(format!("radius must be positive, got {radius}")));
    }
    let shift = Complex64::new(0.00731, -0.00419) * radius;
    let square = Rect::around(center + shift, radius * 1.0137 + 1e-3 / fvm.n());
    let found = find_zeros_region(fvm, square, max_depth)?;
    let winding = winding_of(&PartitionFn { fvm }, &Contour::Circle { center, radius })?;
    let zeros = found.zeros.into_iter().filter(|z| (z.z - center).norm() <= radius).collect();
    Ok(ZeroSet::new(zeros, Rect::around(center, radius), fvm.l(), fvm.volume(), Some(winding)))
}
