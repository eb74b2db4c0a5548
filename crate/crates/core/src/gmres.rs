//! Unrestarted complex GMRES.
//!
//! The Krylov basis is built with modified Gram–Schmidt plus one
//! reorthogonalization pass, and the least-squares problem is updated with
//! complex Givens rotations. One Arnoldi step counts as one iteration.

use faer::{Col, Mat};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Anything that can apply a square complex matrix to a vector.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[Complex64], y: &mut [Complex64]);
}

impl LinearOperator for Mat<Complex64> {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        let xc = Col::from_fn(x.len(), |i| x[i]);
        let yc = self * &xc;
        for (i, v) in y.iter_mut().enumerate() {
            *v = yc[i];
        }
    }
}

/// Outcome of a GMRES run.
#[derive(Debug, Clone)]
pub struct KrylovReport {
    /// Number of Arnoldi steps taken.
    pub iterations: usize,
    /// Relative residual ‖b − Ax_j‖/‖b‖ after each step.
    pub residuals: Vec<f64>,
    pub solution: Vec<Complex64>,
    /// The Krylov space became invariant; the solution is exact.
    pub breakdown: bool,
}

impl KrylovReport {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GmresConfig {
    pub tol: f64,
    /// Iteration cap; the system dimension when `None`.
    pub max_iter: Option<usize>,
}

impl GmresConfig {
    pub fn new(tol: f64) -> Self {
        Self { tol, max_iter: None }
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Rotation (c, s) with c real that maps (a, b) to (ρ, 0).
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let na = a.norm();
    let r = (na * na + b.norm_sqr()).sqrt();
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if na == 0.0 {
        return (0.0, b.conj() / b.norm());
    }
    (na / r, (a / na) * b.conj() / r)
}

/// Solve A x = b to relative residual `tol` with x₀ = 0.
pub fn gmres_solve<A: LinearOperator + ?Sized>(op: &A, rhs: &[Complex64], tol: f64) -> Result<KrylovReport> {
    gmres_with(op, rhs, GmresConfig::new(tol))
}

pub fn gmres_with<A: LinearOperator + ?Sized>(op: &A, rhs: &[Complex64], config: GmresConfig) -> Result<KrylovReport> {
    let n = op.dim();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    let beta = norm(rhs);
    if beta == 0.0 {
        return Err(Error::ZeroRhs);
    }
    let max_iter = config.max_iter.unwrap_or(n).min(n);
    let zero = Complex64::new(0.0, 0.0);

    let mut basis: Vec<Vec<Complex64>> = vec![rhs.iter().map(|v| v / beta).collect()];
    // Columns of the rotated Hessenberg matrix (upper triangular part).
    let mut r_cols: Vec<Vec<Complex64>> = Vec::new();
    let mut rot: Vec<(f64, Complex64)> = Vec::new();
    let mut g = vec![Complex64::new(beta, 0.0)];
    let mut residuals = Vec::new();
    let mut breakdown = false;
    let mut w = vec![zero; n];

    for j in 0..max_iter {
        op.apply(&basis[j], &mut w);
        let mut h = vec![zero; j + 2];
        for _pass in 0..2 {
            for (i, v) in basis.iter().enumerate() {
                let c = inner(v, &w);
                h[i] += c;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= c * vk;
                }
            }
        }
        let hn = norm(&w);
        h[j + 1] = Complex64::new(hn, 0.0);

        for (i, &(c, s)) in rot.iter().enumerate() {
            let (a, b) = (h[i], h[i + 1]);
            h[i] = a * c + s * b;
            h[i + 1] = -s.conj() * a + b * c;
        }
        let (c, s) = givens(h[j], h[j + 1]);
        h[j] = h[j] * c + s * h[j + 1];
        h[j + 1] = zero;
        rot.push((c, s));
        let gj = g[j];
        g[j] = gj * c;
        g.push(-s.conj() * gj);
        h.truncate(j + 1);
        r_cols.push(h);

        let res = g[j + 1].norm() / beta;
        residuals.push(res);

        let scale = r_cols[j][j].norm().max(1.0);
        if hn <= 1e-14 * scale {
            breakdown = true;
        }
        if res <= config.tol || breakdown {
            let solution = assemble_solution(&basis, &r_cols, &g, n);
            return Ok(KrylovReport {
                iterations: j + 1,
                residuals,
                solution,
                breakdown,
            });
        }
        basis.push(w.iter().map(|v| v / hn).collect());
    }

    Err(Error::NotConverged {
        iterations: residuals.len(),
        residual: residuals.last().copied().unwrap_or(1.0),
        history: residuals,
    })
}

fn assemble_solution(basis: &[Vec<Complex64>], r_cols: &[Vec<Complex64>], g: &[Complex64], n: usize) -> Vec<Complex64> {
    let m = r_cols.len();
    let mut y = vec![Complex64::new(0.0, 0.0); m];
    for i in (0..m).rev() {
        let mut acc = g[i];
        for k in i + 1..m {
            acc -= r_cols[k][i] * y[k];
        }
        y[i] = acc / r_cols[i][i];
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for (yk, v) in y.iter().zip(basis) {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += yk * vi;
        }
    }
    x
}
