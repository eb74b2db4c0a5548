//! Periodic quadrature on the equispaced grid t_j = πj/n.
//!
//! All operators act node-to-node. Fourier coefficients use the asymmetric
//! mode range m = −n, …, n−1, stored at index m + n.

use std::f64::consts::PI;

use faer::{Mat, MatRef};
use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn half_count(len: usize) -> Result<usize> {
    if len == 0 || !len.is_multiple_of(2) {
        return Err(Error::Nodes(format!("grid length {len} is not a positive even number")));
    }
    Ok(len / 2)
}

/// Mode number stored at `index` of a coefficient vector of length 2n.
#[inline]
pub fn mode_of_index(index: usize, n: usize) -> i64 {
    index as i64 - n as i64
}

/// Fourier coefficients c_m = (1/2n) Σ_j ψ_j e^{−i m t_j}, m = −n..n−1.
pub fn fourier_coeffs(values: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = half_count(values.len())?;
    let len = 2 * n;
    let mut buf = values.to_vec();
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let scale = 1.0 / len as f64;
    Ok((0..len)
        .map(|idx| {
            let m = mode_of_index(idx, n);
            buf[m.rem_euclid(len as i64) as usize] * scale
        })
        .collect())
}

/// Inverse of [`fourier_coeffs`]: ψ_j = Σ_m c_m e^{i m t_j}.
pub fn inverse_fourier(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = half_count(coeffs.len())?;
    let len = 2 * n;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (idx, c) in coeffs.iter().enumerate() {
        let m = mode_of_index(idx, n);
        buf[m.rem_euclid(len as i64) as usize] = *c;
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    Ok(buf)
}

/// Apply the Fourier multiplier `symbol(m)` to grid values.
pub fn apply_multiplier(values: &[Complex64], symbol: impl Fn(i64) -> Complex64) -> Result<Vec<Complex64>> {
    let n = half_count(values.len())?;
    let mut coeffs = fourier_coeffs(values)?;
    for (idx, c) in coeffs.iter_mut().enumerate() {
        *c *= symbol(mode_of_index(idx, n));
    }
    inverse_fourier(&coeffs)
}

/// First row of the circulant matrix realizing a Fourier multiplier on the
/// 2n-point grid: entry (i, j) equals `row[(i − j) mod 2n]`.
pub fn multiplier_circulant(n: usize, symbol: impl Fn(i64) -> Complex64) -> Vec<Complex64> {
    let len = 2 * n;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for idx in 0..len {
        let m = mode_of_index(idx, n);
        buf[m.rem_euclid(len as i64) as usize] = symbol(m) / len as f64;
    }
    FftPlanner::new().plan_fft_inverse(len).process(&mut buf);
    buf
}

/// Dense matrix of a circulant with the given first column/row convention.
pub fn circulant_matrix(row: &[Complex64]) -> Mat<Complex64> {
    let len = row.len();
    Mat::from_fn(len, len, |i, j| row[(i + len - j) % len])
}

/// Weights R_j(t_i) for ∫ log(4 sin²((t−τ)/2)) f(τ) dτ ≈ Σ_j R_j(t_i) f(t_j).
///
/// Circulant: the weight depends only on (i − j) mod 2n.
#[derive(Debug, Clone)]
pub struct LogQuadWeights {
    n: usize,
    row: Vec<f64>,
}

impl LogQuadWeights {
    /// R(d) = −(2π/n) Σ_{m=1}^{n−1} cos(m d π/n)/m − (π/n²) cos(d π).
    pub fn new(n: usize) -> Self {
        let nf = n as f64;
        let row = (0..2 * n)
            .map(|d| {
                let s = PI * d as f64 / nf;
                let sum: f64 = (1..n).map(|m| (m as f64 * s).cos() / m as f64).sum();
                let alt = if d % 2 == 0 { 1.0 } else { -1.0 };
                -2.0 * PI / nf * sum - PI / (nf * nf) * alt
            })
            .collect();
        Self { n, row }
    }

    pub fn half(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        let len = 2 * self.n;
        self.row[(i + len - j) % len]
    }

    pub fn row(&self) -> &[f64] {
        &self.row
    }
}

/// ∫₀^{2π} [K1(t,τ) log(4 sin²((t−τ)/2)) + K2(t,τ)] ψ(τ) dτ at every node.
///
/// `k1` and `k2` are the kernel samples K(t_i, t_j); diagonals must hold the
/// analytic limits.
pub fn log_quadrature(
    weights: &LogQuadWeights,
    k1: MatRef<'_, Complex64>,
    k2: MatRef<'_, Complex64>,
    density: &[Complex64],
) -> Result<Vec<Complex64>> {
    let len = 2 * weights.half();
    check_len(len, density.len())?;
    for m in [k1, k2] {
        check_len(len, m.nrows())?;
        check_len(len, m.ncols())?;
    }
    let h = PI / weights.half() as f64;
    Ok((0..len)
        .map(|i| {
            (0..len)
                .map(|j| (k1[(i, j)] * weights.weight(i, j) + k2[(i, j)] * h) * density[j])
                .sum()
        })
        .collect())
}

/// Symbol of ψ ↦ (1/4π) PV∫ cot((τ−t)/2) ψ'(τ) dτ on e^{imt}.
#[inline]
pub fn hilbert_derivative_symbol(m: i64) -> f64 {
    -(m.unsigned_abs() as f64) / 2.0
}

/// (1/4π) PV∫₀^{2π} cot((τ−t)/2) ψ'(τ) dτ, computed spectrally.
pub fn hilbert_derivative(density: &[Complex64]) -> Result<Vec<Complex64>> {
    apply_multiplier(density, |m| hilbert_derivative_symbol(m).into())
}

/// First row of the real circulant matrix of the Hilbert-derivative
/// operator, i.e. the inverse transform of its symbol on 2n nodes.
pub fn hilbert_derivative_row(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..2 * n)
        .map(|d| {
            let s = PI * d as f64 / nf;
            let sum: f64 = (1..n).map(|m| m as f64 * (m as f64 * s).cos()).sum();
            let alt = if d % 2 == 0 { 1.0 } else { -1.0 };
            (-sum - 0.5 * nf * alt) / (2.0 * nf)
        })
        .collect()
}
