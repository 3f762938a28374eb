use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::FiniteVolumeModel;

/// Below this separation two `b` values are treated as coinciding.
pub const NEAR_SINGULAR_GAP: f64 = 1e-12;

type Matrix = Vec<Vec<Complex64>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VandermondeReport {
    pub phases: Vec<usize>,
    pub z: Complex64,
    pub b_values: Vec<(usize, Complex64)>,
    /// `|det M|` from an LU factorization.
    pub det_abs: f64,
    /// `prod_{m<n} |b_n - b_m|`.
    pub det_pairwise: f64,
    /// Singular values of `M`, largest first.
    pub singular_values: Vec<f64>,
    /// Spectral norm of `M`.
    pub norm: f64,
    /// Spectral norm of `M^{-1}`.
    pub inverse_norm: f64,
    /// `norm^{q-1} / det_abs`.
    pub inverse_bound: f64,
}

impl VandermondeReport {
    pub fn bound_holds(&self) -> bool {
        self.inverse_norm <= self.inverse_bound * (1.0 + 1e-8)
    }

    pub fn det_identity_holds(&self) -> bool {
        (self.det_abs - self.det_pairwise).abs() <= 1e-8 * self.det_pairwise
    }
}

/// `M[l][m] = b_m^l` for `l = 0..q`.
pub fn vandermonde(b: &[Complex64]) -> Matrix {
    let q = b.len();
    (0..q).map(|l| b.iter().map(|&x| x.powu(l as u32)).collect()).collect()
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn lu_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut a: Matrix = m.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm())).unwrap();
        if a[p][k].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= a[k][k];
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                let t = a[k][j];
                a[i][j] -= f * t;
            }
        }
    }
    det
}

fn mul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

fn adjoint(a: &[Vec<Complex64>]) -> Matrix {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j].conj()).collect()).collect()
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, largest
/// first. Each rotation first makes the pivot real with a diagonal phase,
/// then annihilates it with a real plane rotation.
pub fn hermitian_eigenvalues(h: &[Vec<Complex64>]) -> Vec<f64> {
    let n = h.len();
    let mut a: Matrix = h.to_vec();
    let scale: f64 = a.iter().flatten().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale || scale == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq.conj() / r;
                let theta = 0.5 * (2.0 * r).atan2(a[p][p].re - a[q][q].re);
                let (s, c) = theta.sin_cos();
                // G = D R with D = diag(.., phase at q, ..), R a rotation in (p, q).
                let mut g: Matrix = (0..n)
                    .map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
                    .collect();
                g[p][p] = Complex64::new(c, 0.0);
                g[p][q] = Complex64::new(-s, 0.0);
                g[q][p] = phase * s;
                g[q][q] = phase * c;
                a = mul(&adjoint(&g), &mul(&a, &g));
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i].re).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Singular values of `m`, largest first.
pub fn singular_values(m: &[Vec<Complex64>]) -> Vec<f64> {
    hermitian_eigenvalues(&mul(m, &adjoint(m)))
        .into_iter()
        .map(|l| l.max(0.0).sqrt())
        .collect()
}

/// Conditioning of the Vandermonde matrix of `b_m = (log zeta_m^(L))'`
/// for `m` in `phases` at `z`.
pub fn vandermonde_report(fvm: &FiniteVolumeModel, phases: &[usize], z: Complex64) -> Result<VandermondeReport> {
    let model = fvm.base();
    let r = model.num_phases();
    if phases.len() < 2 {
        return Err(Error::Argument("at least two phases are needed".into()));
    }
    for (i, &m) in phases.iter().enumerate() {
        if m >= r || phases[..i].contains(&m) {
            return Err(Error::Argument(format!("invalid phase set {phases:?}")));
        }
    }
    model.require_in_domain(z)?;
    let eps = fvm.kappa() / fvm.l() as f64;
    if !model.in_s(z, phases, eps) {
        return Err(Error::Domain {
            z,
            reason: format!("phases {phases:?} are not all {eps}-stable here"),
        });
    }
    let b: Vec<Complex64> = phases.iter().map(|&m| fvm.v(m, z)).collect();
    let mut det_pairwise = 1.0;
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let gap = (b[j] - b[i]).norm();
            if gap < NEAR_SINGULAR_GAP {
                return Err(Error::NearSingular {
                    z,
                    first: phases[i],
                    second: phases[j],
                    gap,
                });
            }
            det_pairwise *= gap;
        }
    }
    let m = vandermonde(&b);
    let det_abs = lu_det(&m).norm();
    let sv = singular_values(&m);
    let norm = sv[0];
    let inverse_norm = 1.0 / sv[sv.len() - 1];
    let inverse_bound = norm.powi(b.len() as i32 - 1) / det_abs;
    Ok(VandermondeReport {
        phases: phases.to_vec(),
        z,
        b_values: phases.iter().copied().zip(b).collect(),
        det_abs,
        det_pairwise,
        singular_values: sv,
        norm,
        inverse_norm,
        inverse_bound,
    })
}
