use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use phasezeros::model::Rect;
use phasezeros::Complex64;

#[derive(Debug, Parser)]
#[command(name = "phasezeros", version, about = "Complex phase diagrams and partition-function zeros")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Model definition file, or `preset:NAME` (m2, m2-q12, m3, m3-q112, m4, lee-yang).
    #[arg(long, global = true)]
    pub model: Option<String>,

    /// Directory for CSV, JSON and SVG artifacts.
    #[arg(long, global = true, env = "PHASEZEROS_OUT", default_value = ".")]
    pub out: PathBuf,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Also write an SVG plot.
    #[arg(long, global = true)]
    pub svg: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace the coexistence curves and multiple points of the model.
    TraceDiagram(DiagramArgs),
    /// Locate partition-function zeros in a box by the argument principle.
    FindZeros(ZeroArgs),
    /// Solve the two-phase equations along every coexistence curve.
    PredictZeros(ZeroArgs),
    /// Match located against predicted zeros.
    Compare(ZeroArgs),
    /// Empirical against theoretical density of zeros.
    Density(DensityArgs),
    /// Zeros near multiple points against the multiple-point equation.
    Multipoint(MultipointArgs),
    /// Asymptotic half-lines of the zeros near each multiple point.
    Asymptotes(MultipointArgs),
    /// Check positivity, non-degeneracy and convexity of the model.
    CheckAssumptions(DiagramArgs),
    /// Audit a reflection-symmetric model for zeros off the line Re w = 0.
    LeeYang(LeeYangArgs),
    /// Check that two-phase regions and multiple-point discs cover the diagram.
    Covering(CoveringArgs),
}

#[derive(Debug, Args, Clone)]
pub struct DiagramArgs {
    /// Seeding grid points per side.
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
}

#[derive(Debug, Args, Clone)]
pub struct VolumeArgs {
    /// Linear size.
    #[arg(long = "L", default_value_t = 100)]
    pub l: u32,
    /// Dimension; the volume is N = L^d.
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    /// Decay rate of the perturbation, e^{-tau L}.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 1.0)]
    pub kappa: f64,
    /// Strength of the synthetic error term.
    #[arg(long, default_value_t = 0.0)]
    pub theta: f64,
    /// Seed for random analytic perturbations; unperturbed if absent.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Degree of the random perturbation polynomials.
    #[arg(long, default_value_t = 3)]
    pub pert_degree: usize,
}

#[derive(Debug, Args, Clone)]
pub struct ZeroArgs {
    #[command(flatten)]
    pub volume: VolumeArgs,
    /// Search box `re_lo,re_hi,im_lo,im_hi`.
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
    pub rect: Option<Rect>,
    #[arg(long, default_value_t = phasezeros::zeros::DEFAULT_MAX_DEPTH)]
    pub max_depth: u32,
    #[arg(long, default_value_t = 5.0)]
    pub gamma_scale: f64,
    #[arg(long, default_value_t = phasezeros::zeros::DEFAULT_C_MATCH)]
    pub c_match: f64,
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
}

#[derive(Debug, Args, Clone)]
pub struct DensityArgs {
    /// Coexistence point `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    pub at: Complex64,
    /// Phase pair `m,n`.
    #[arg(long, value_parser = parse_pair, default_value = "0,1")]
    pub pair: (usize, usize),
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub eps: Vec<f64>,
    #[arg(long = "L", value_delimiter = ',', default_value = "1000")]
    pub l: Vec<u32>,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
}

#[derive(Debug, Args, Clone)]
pub struct MultipointArgs {
    #[arg(long = "L", default_value_t = 1000)]
    pub l: u32,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[arg(long, default_value_t = 1.0)]
    pub rho_scale: f64,
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
    #[arg(long, default_value_t = 60)]
    pub max_depth: u32,
    #[arg(long, default_value_t = phasezeros::zeros::DEFAULT_C_MATCH)]
    pub c_match: f64,
}

#[derive(Debug, Args, Clone)]
pub struct LeeYangArgs {
    #[command(flatten)]
    pub volume: VolumeArgs,
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
    pub rect: Option<Rect>,
    #[arg(long, default_value_t = phasezeros::zeros::DEFAULT_MAX_DEPTH)]
    pub max_depth: u32,
    #[arg(long, default_value_t = 0)]
    pub plus: usize,
    #[arg(long, default_value_t = 1)]
    pub minus: usize,
    /// Number of symmetric perturbations, seeded from `--seed` upwards.
    #[arg(long, default_value_t = 1)]
    pub samples: u64,
    #[arg(long, default_value_t = 10.0)]
    pub tol_factor: f64,
    #[arg(long, default_value_t = 41)]
    pub grid: usize,
}

#[derive(Debug, Args, Clone)]
pub struct CoveringArgs {
    #[arg(long = "L", default_value_t = 1000)]
    pub l: u32,
    #[arg(long, default_value_t = 1)]
    pub d: u32,
    #[arg(long, default_value_t = 5.0)]
    pub gamma_scale: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho_scale: f64,
    /// Overrides the omega default `log N`.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub grid: usize,
    /// Restricts the check to this box instead of the whole domain.
    #[arg(long = "box", value_parser = parse_box, allow_hyphen_values = true)]
    pub rect: Option<Rect>,
}

fn numbers(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("numbers must be finite".into());
    }
    Ok(v)
}

pub fn parse_box(s: &str) -> Result<Rect, String> {
    let v = numbers(s, 4)?;
    let r = Rect::new(v[0], v[1], v[2], v[3]);
    r.validate().map_err(|e| e.to_string())?;
    Ok(r)
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let v = numbers(s, 2)?;
    Ok(Complex64::new(v[0], v[1]))
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let mut it = s.split(',').map(|p| p.trim().parse::<usize>());
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) if a != b => Ok((a, b)),
        _ => Err(format!("expected two distinct phase indices 'm,n', got '{s}'")),
    }
}
