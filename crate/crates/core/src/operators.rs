//! Dense Nyström matrices of the boundary integral operators.
//!
//! Every matrix maps density values at the nodes to operator values at the
//! nodes. Logarithmic singularities are handled by the circulant log-weights
//! of [`crate::quadrature`]; the hypersingular operator additionally uses the
//! spectral Hilbert-derivative term.
//!
//! For wavenumbers with a large imaginary part the Bessel function J_0(kr)
//! grows like e^{Im k · r}, so splitting off its logarithm over the whole
//! curve would cancel catastrophically against the exponentially small
//! Hankel kernel. In that regime the log factor is multiplied by a smooth
//! cutoff in t − τ that equals one near the diagonal.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{dot, NodeSet};
use crate::quadrature::{circulant_matrix, hilbert_derivative_row, multiplier_circulant, LogQuadWeights};
use crate::specfun::{kernel_bessel, kernel_hankel, EULER_GAMMA};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Largest Im(k)·r over which the log factor is split off without a cutoff.
const GROWTH_BUDGET: f64 = 10.0;

/// A wavenumber in the closed first quadrant, excluding zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber(Complex64);

impl Wavenumber {
    pub fn new(k: Complex64) -> Result<Self> {
        if !(k.re.is_finite() && k.im.is_finite()) {
            return Err(Error::Wavenumber(k, "not finite"));
        }
        if k.re < 0.0 || k.im < 0.0 {
            return Err(Error::Wavenumber(k, "must lie in the closed first quadrant"));
        }
        if k.norm() == 0.0 {
            return Err(Error::Wavenumber(k, "zero wavenumber"));
        }
        Ok(Self(k))
    }

    pub fn real(k: f64) -> Result<Self> {
        Self::new(Complex64::new(k, 0.0))
    }

    /// A complexified wavenumber κ + iε with κ, ε > 0.
    pub fn complexified(k: Complex64) -> Result<Self> {
        if !(k.re > 0.0 && k.im > 0.0) {
            return Err(Error::Wavenumber(k, "needs strictly positive real and imaginary parts"));
        }
        Self::new(k)
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    S,
    D,
    Dstar,
    N,
    SigmaS,
    SigmaN,
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub kind: OperatorKind,
    pub k: Wavenumber,
    pub entries: Mat<Complex64>,
}

impl OperatorMatrix {
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        apply_dense(&self.entries, x)
    }
}

pub fn apply_dense(m: &Mat<Complex64>, x: &[Complex64]) -> Result<Vec<Complex64>> {
    if m.ncols() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: m.ncols(),
            got: x.len(),
        });
    }
    Ok((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * x[j]).sum())
        .collect())
}

/// The four layer-potential traces at one wavenumber.
#[derive(Debug, Clone)]
pub struct LayerOperators {
    pub k: Wavenumber,
    pub s: Mat<Complex64>,
    pub d: Mat<Complex64>,
    pub dstar: Mat<Complex64>,
    pub n: Mat<Complex64>,
}

#[derive(Clone, Copy)]
struct Which {
    s: bool,
    d: bool,
    dstar: bool,
    n: bool,
}

/// Smooth partition-of-unity bump: 1 at u = 0, 0 for u ≥ 1, all derivatives
/// vanishing at both ends.
fn bump(u: f64) -> f64 {
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        (2.0 * (-1.0 / u).exp() / (u - 1.0)).exp()
    }
}

/// Cutoff half-width in parameter space, or `None` for the global split.
fn cutoff_width(nodes: &NodeSet, k: Complex64) -> Option<f64> {
    let max_speed = nodes.speed.iter().cloned().fold(0.0, f64::max);
    if k.im * nodes.diameter() <= GROWTH_BUDGET {
        return None;
    }
    let h = nodes.param_weight();
    let w = (GROWTH_BUDGET / (k.im * max_speed)).max(8.0 * h);
    (w < PI).then_some(w)
}

fn wrapped(s: f64) -> f64 {
    let r = s.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

fn assemble(nodes: &NodeSet, k: Wavenumber, which: Which) -> Result<LayerOperators> {
    let len = nodes.len();
    let half = nodes.half();
    let h = nodes.param_weight();
    let kv = k.value();
    let weights = LogQuadWeights::new(half);
    let width = cutoff_width(nodes, kv);
    let zero = Complex64::new(0.0, 0.0);
    let mut s = Mat::<Complex64>::zeros(if which.s { len } else { 0 }, if which.s { len } else { 0 });
    let mut d = Mat::<Complex64>::zeros(if which.d { len } else { 0 }, if which.d { len } else { 0 });
    let mut ds = Mat::<Complex64>::zeros(if which.dstar { len } else { 0 }, if which.dstar { len } else { 0 });
    let mut nn = Mat::<Complex64>::zeros(if which.n { len } else { 0 }, if which.n { len } else { 0 });

    let inv4pi = 1.0 / (4.0 * PI);
    for i in 0..len {
        let xi = nodes.pos[i];
        let ai = nodes.d1[i];
        let si = nodes.speed[i];
        let ni = nodes.normal[i];
        for j in 0..len {
            let xj = nodes.pos[j];
            let aj = nodes.d1[j];
            let sj = nodes.speed[j];
            let nj = nodes.normal[j];
            let rw = weights.weight(i, j);
            if i == j {
                let b = nodes.d2[i];
                let c3 = nodes.d3[i];
                let lg = (kv * si / 2.0).ln();
                if which.s {
                    let k2 = (I / 4.0 - EULER_GAMMA / (2.0 * PI) - lg / (2.0 * PI)) * si;
                    s[(i, i)] = -inv4pi * si * rw + k2 * h;
                }
                let dl = dot(b, ni) / (4.0 * PI * si);
                if which.d {
                    d[(i, i)] = Complex64::from(dl * h);
                }
                if which.dstar {
                    ds[(i, i)] = Complex64::from(dl * h);
                }
                if which.n {
                    let a2 = si * si;
                    let m1 = -kv * kv * a2 / (8.0 * PI);
                    let m2 = kv * kv * a2 / (8.0 * PI) * (I * PI - 2.0 * EULER_GAMMA - 2.0 * lg + 1.0)
                        + inv4pi
                            * (dot(b, b) / (2.0 * a2) + dot(ai, c3) / (3.0 * a2)
                                - dot(ai, b).powi(2) / (a2 * a2)
                                - 1.0 / 6.0);
                    nn[(i, i)] = m1 * rw + m2 * h;
                }
                continue;
            }

            let dx = [xi[0] - xj[0], xi[1] - xj[1]];
            let r = dx[0].hypot(dx[1]);
            let z = kv * r;
            let chi = match width {
                None => 1.0,
                Some(w) => bump(wrapped(nodes.t[i] - nodes.t[j]).abs() / w),
            };
            let (j0, j1, h0, h1) = if chi > 0.0 {
                let kb = kernel_bessel(z)?;
                (kb.j0, kb.j1, kb.h0, kb.h1)
            } else {
                let (h0, h1) = kernel_hankel(z)?;
                (zero, zero, h0, h1)
            };
            let logv = {
                let sn = ((nodes.t[i] - nodes.t[j]) / 2.0).sin();
                (4.0 * sn * sn).ln()
            };
            // log-part coefficients carry the cutoff; the smooth part is the
            // full kernel minus the (cut-off) log part.
            let entry = |full: Complex64, log_coef: Complex64| -> Complex64 {
                let l1 = log_coef * chi;
                l1 * rw + (full - l1 * logv) * h
            };
            if which.s {
                let full = I / 4.0 * h0 * sj;
                let l1 = -inv4pi * j0 * sj;
                s[(i, j)] = entry(full, l1);
            }
            if which.dstar {
                let dn = dot(dx, ni) / r;
                let full = -I * kv / 4.0 * h1 * dn * sj;
                let l1 = kv * inv4pi * j1 * dn * sj;
                ds[(i, j)] = entry(full, l1);
            }
            if which.d {
                let dn = dot(dx, nj) / r;
                let full = I * kv / 4.0 * h1 * dn * sj;
                let l1 = -kv * inv4pi * j1 * dn * sj;
                d[(i, j)] = entry(full, l1);
            }
            if which.n {
                let ta = dot(dx, ai);
                let tb = dot(dx, aj);
                let p = dot(ai, aj);
                let q = ta * tb / (r * r);
                let k2 = kv * kv;
                let g = I / 4.0 * h0;
                let d2g = q * (I * k2 / 4.0 * h0 - I * kv / 2.0 * h1 / r) + I * kv / 4.0 * h1 / r * p;
                let sn = ((nodes.t[i] - nodes.t[j]) / 2.0).sin();
                let full = k2 * g * p - d2g - 1.0 / (8.0 * PI * sn * sn);
                let l1 = inv4pi * (q * (k2 * j0 - 2.0 * kv * j1 / r) + kv * j1 / r * p - k2 * j0 * p);
                nn[(i, j)] = entry(full, l1);
            }
        }
    }

    if which.n {
        let trow = hilbert_derivative_row(half);
        for i in 0..len {
            let inv = 1.0 / nodes.speed[i];
            for j in 0..len {
                let tv = trow[(i + len - j) % len];
                nn[(i, j)] = (nn[(i, j)] + tv) * inv;
            }
        }
    }

    Ok(LayerOperators {
        k,
        s,
        d,
        dstar: ds,
        n: nn,
    })
}

/// S, D, D* and N at one wavenumber with a single pass of Bessel evaluations.
pub fn assemble_layer_operators(nodes: &NodeSet, k: Wavenumber) -> Result<LayerOperators> {
    assemble(
        nodes,
        k,
        Which {
            s: true,
            d: true,
            dstar: true,
            n: true,
        },
    )
}

fn only(kind: OperatorKind) -> Which {
    Which {
        s: kind == OperatorKind::S,
        d: kind == OperatorKind::D,
        dstar: kind == OperatorKind::Dstar,
        n: kind == OperatorKind::N,
    }
}

fn single(nodes: &NodeSet, k: Wavenumber, kind: OperatorKind) -> Result<OperatorMatrix> {
    let ops = assemble(nodes, k, only(kind))?;
    let entries = match kind {
        OperatorKind::S => ops.s,
        OperatorKind::D => ops.d,
        OperatorKind::Dstar => ops.dstar,
        _ => ops.n,
    };
    Ok(OperatorMatrix { kind, k, entries })
}

pub fn assemble_single_layer(nodes: &NodeSet, k: Wavenumber) -> Result<OperatorMatrix> {
    single(nodes, k, OperatorKind::S)
}

pub fn assemble_double_layer(nodes: &NodeSet, k: Wavenumber) -> Result<OperatorMatrix> {
    single(nodes, k, OperatorKind::D)
}

pub fn assemble_adjoint_double_layer(nodes: &NodeSet, k: Wavenumber) -> Result<OperatorMatrix> {
    single(nodes, k, OperatorKind::Dstar)
}

pub fn assemble_hypersingular(nodes: &NodeSet, k: Wavenumber) -> Result<OperatorMatrix> {
    single(nodes, k, OperatorKind::N)
}

/// √(ξ² − κ²) with the principal branch; Im < 0 whenever κ has positive real
/// and imaginary parts.
fn radical(xi: f64, kappa: Complex64) -> Complex64 {
    (Complex64::from(xi * xi) - kappa * kappa).sqrt()
}

/// Principal symbol of the single layer: 1 / (2√(ξ² − κ²)).
pub fn symbol_single(xi: f64, kappa: Complex64) -> Complex64 {
    1.0 / (2.0 * radical(xi, kappa))
}

/// Principal symbol of the hypersingular operator: −√(ξ² − κ²) / 2.
pub fn symbol_hypersingular(xi: f64, kappa: Complex64) -> Complex64 {
    -0.5 * radical(xi, kappa)
}

/// Fourier-multiplier operators σ^S (acting on ψ|x'|) and σ^N (scaled by
/// 1/|x'| after the multiplier).
pub fn assemble_sigma(nodes: &NodeSet, kind: OperatorKind, kappa: Wavenumber) -> Result<OperatorMatrix> {
    let kv = kappa.value();
    if !(kv.re > 0.0 && kv.im > 0.0) {
        return Err(Error::Wavenumber(
            kv,
            "needs strictly positive real and imaginary parts",
        ));
    }
    let len = nodes.len();
    let half = nodes.half();
    let entries = match kind {
        OperatorKind::SigmaS => {
            let c = circulant_matrix(&multiplier_circulant(half, |m| symbol_single(m as f64, kv)));
            Mat::from_fn(len, len, |i, j| c[(i, j)] * nodes.speed[j])
        }
        OperatorKind::SigmaN => {
            let c = circulant_matrix(&multiplier_circulant(half, |m| symbol_hypersingular(m as f64, kv)));
            Mat::from_fn(len, len, |i, j| c[(i, j)] / nodes.speed[i])
        }
        other => {
            return Err(Error::Config(format!("{other:?} is not a Fourier-multiplier operator")));
        }
    };
    Ok(OperatorMatrix {
        kind,
        k: kappa,
        entries,
    })
}

/// Least-squares slope of log ‖(A − B) e^{imt}‖ against log m for
/// m ∈ [n/8, n/2], using the root-mean-square norm over the nodes.
pub fn operator_difference_decay(a: &Mat<Complex64>, b: &Mat<Complex64>, nodes: &NodeSet) -> Result<f64> {
    let len = nodes.len();
    if a.nrows() != len || b.nrows() != len || a.ncols() != len || b.ncols() != len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: a.nrows().min(b.nrows()),
        });
    }
    let n = nodes.half();
    let lo = (n / 8).max(2);
    let hi = n / 2;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for m in lo..=hi {
        let e: Vec<Complex64> = nodes
            .t
            .iter()
            .map(|&t| Complex64::from_polar(1.0, m as f64 * t))
            .collect();
        let mut acc = 0.0;
        for i in 0..len {
            let v: Complex64 = (0..len).map(|j| (a[(i, j)] - b[(i, j)]) * e[j]).sum();
            acc += v.norm_sqr();
        }
        xs.push((m as f64).ln());
        ys.push((acc / len as f64).sqrt().ln());
    }
    let count = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / count;
    let my = ys.iter().sum::<f64>() / count;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Max-norm residuals of the Calderón identities S·N = −I/4 + D² and
/// N·S = −I/4 + (D*)².
///
/// `full_*` are entrywise over the whole matrices. `resolved_*` compress
/// the residual to trigonometric polynomials of degree ≤ n/2 on both sides,
/// which excludes the near-Nyquist modes where the Nyström matrices alias.
/// `mixed` is ‖S·N + I/4 − (D*)²‖, which coincides with `full_sn` only when
/// D = D* (the circle).
#[derive(Debug, Clone, Copy)]
pub struct CalderonResidual {
    pub full_sn: f64,
    pub full_ns: f64,
    pub mixed: f64,
    pub resolved_sn: f64,
    pub resolved_ns: f64,
}

fn max_abs(m: &Mat<Complex64>) -> f64 {
    let mut out = 0.0f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            out = out.max(m[(i, j)].norm());
        }
    }
    out
}

pub fn calderon_residual(nodes: &NodeSet, k: Wavenumber) -> Result<CalderonResidual> {
    let ops = assemble_layer_operators(nodes, k)?;
    Ok(calderon_residual_of(&ops, nodes))
}

/// Same as [`calderon_residual`] for operators assembled elsewhere.
pub fn calderon_residual_of(ops: &LayerOperators, nodes: &NodeSet) -> CalderonResidual {
    let len = nodes.len();
    let quarter = Mat::<Complex64>::from_fn(len, len, |i, j| {
        if i == j {
            Complex64::from(0.25)
        } else {
            Complex64::from(0.0)
        }
    });
    let r_sn = &ops.s * &ops.n + &quarter - &ops.d * &ops.d;
    let r_ns = &ops.n * &ops.s + &quarter - &ops.dstar * &ops.dstar;
    let mixed = &ops.s * &ops.n + &quarter - &ops.dstar * &ops.dstar;
    let cut = (nodes.half() / 2) as i64;
    let band = circulant_matrix(&multiplier_circulant(nodes.half(), |m| {
        Complex64::from(if m.abs() <= cut { 1.0 } else { 0.0 })
    }));
    CalderonResidual {
        full_sn: max_abs(&r_sn),
        full_ns: max_abs(&r_ns),
        mixed: max_abs(&mixed),
        resolved_sn: max_abs(&(&band * &r_sn * &band)),
        resolved_ns: max_abs(&(&band * &r_ns * &band)),
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::geometry::{make_circle, make_kite, sample};
    use crate::specfun::{bessel_j, hankel1};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mode(nodes: &NodeSet, m: i64) -> Vec<Complex64> {
        nodes
            .t
            .iter()
            .map(|&t| Complex64::from_polar(1.0, m as f64 * t))
            .collect()
    }

    fn circle_eigen_error(mat: &Mat<Complex64>, nodes: &NodeSet, m: i64, lambda: Complex64) -> f64 {
        let e = mode(nodes, m);
        let r = apply_dense(mat, &e).unwrap();
        r.iter()
            .zip(&e)
            .map(|(a, b)| (a - b * lambda).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn wavenumber_admissibility() {
        assert!(Wavenumber::new(c(0.0, 0.0)).is_err());
        assert!(Wavenumber::new(c(-1.0, 0.0)).is_err());
        assert!(Wavenumber::new(c(1.0, -0.1)).is_err());
        assert!(Wavenumber::new(c(0.0, 2.0)).is_ok());
        assert!(Wavenumber::complexified(c(2.0, 0.0)).is_err());
    }

    #[test]
    fn single_layer_circle_eigenvalues() {
        let nodes = sample(&make_circle(), 64).unwrap();
        for k in [c(1.0, 0.0), c(2.0, 1.0)] {
            let s = assemble_single_layer(&nodes, Wavenumber::new(k).unwrap()).unwrap();
            for m in -16i64..=16 {
                let o = m.unsigned_abs() as u32;
                let lam = I * PI / 2.0 * bessel_j(o, k).unwrap() * hankel1(o, k).unwrap();
                let err = circle_eigen_error(&s.entries, &nodes, m, lam);
                assert!(err < 1e-10, "k={k} m={m} err={err}");
            }
        }
    }

    #[test]
    fn double_layer_circle_eigenvalues() {
        // Interior limits of the potentials plus the jump terms.
        let nodes = sample(&make_circle(), 64).unwrap();
        for k in [c(1.0, 0.0), c(2.0, 1.0)] {
            let ops = assemble_layer_operators(&nodes, Wavenumber::new(k).unwrap()).unwrap();
            for m in -12i64..=12 {
                let o = m.unsigned_abs() as u32;
                let j = bessel_j(o, k).unwrap();
                let jp = crate::specfun::bessel_j_deriv(o, k).unwrap();
                let hh = hankel1(o, k).unwrap();
                let hp = crate::specfun::hankel1_deriv(o, k).unwrap();
                let lam_d = I * PI * k / 2.0 * j * hp + 0.5;
                let lam_ds = I * PI * k / 2.0 * jp * hh - 0.5;
                let lam_n = I * PI * k * k / 2.0 * jp * hp;
                assert!(circle_eigen_error(&ops.d, &nodes, m, lam_d) < 1e-10, "D k={k} m={m}");
                assert!(
                    circle_eigen_error(&ops.dstar, &nodes, m, lam_ds) < 1e-10,
                    "D* k={k} m={m}"
                );
                let en = circle_eigen_error(&ops.n, &nodes, m, lam_n);
                assert!(en < 1e-9 * (1.0 + m.abs() as f64), "N k={k} m={m} err={en}");
            }
        }
    }

    #[test]
    fn laplace_like_double_layer_of_constant() {
        let nodes = sample(&make_kite(), 64).unwrap();
        let d = assemble_double_layer(&nodes, Wavenumber::real(1e-6).unwrap()).unwrap();
        let r = d.apply(&vec![c(1.0, 0.0); nodes.len()]).unwrap();
        assert!(r.iter().all(|v| (v + 0.5).norm() < 1e-8));
    }

    #[test]
    fn double_layers_are_adjoint() {
        let nodes = sample(&make_circle(), 32).unwrap();
        let ops = assemble_layer_operators(&nodes, Wavenumber::new(c(3.0, 0.5)).unwrap()).unwrap();
        let len = nodes.len();
        let mut dev: f64 = 0.0;
        for i in 0..len {
            for j in 0..len {
                // weighted transpose: W D* = (W D)^T with W = diag(|x'|)
                let lhs = ops.dstar[(i, j)] * nodes.speed[i];
                let rhs = ops.d[(j, i)] * nodes.speed[j];
                dev = dev.max((lhs - rhs).norm());
            }
        }
        assert!(dev < 1e-12, "{dev}");
    }

    #[test]
    fn sigma_product_is_minus_quarter() {
        let nodes = sample(&make_kite(), 32).unwrap();
        let kappa = Wavenumber::complexified(c(2.0, 1.0)).unwrap();
        let ss = assemble_sigma(&nodes, OperatorKind::SigmaS, kappa).unwrap();
        let sn = assemble_sigma(&nodes, OperatorKind::SigmaN, kappa).unwrap();
        let prod = &sn.entries * &ss.entries;
        for i in 0..nodes.len() {
            for j in 0..nodes.len() {
                let want = if i == j { -0.25 } else { 0.0 };
                assert!((prod[(i, j)] - want).norm() < 1e-13);
            }
        }
        assert!(assemble_sigma(&nodes, OperatorKind::SigmaS, Wavenumber::real(2.0).unwrap()).is_err());
        assert!(assemble_sigma(&nodes, OperatorKind::S, kappa).is_err());
    }

    #[test]
    fn symbol_values() {
        let ps = symbol_single(3.0, c(2.0, 1.0));
        let pn = symbol_hypersingular(3.0, c(2.0, 1.0));
        assert!((ps - c(0.178_206_223_390_529_58, 0.053_956_502_934_877_90)).norm() < 1e-15);
        assert!((pn - c(-1.285_063_352_082_689_1, 0.389_085_875_952_851_0)).norm() < 1e-14);
        for m in -300..300 {
            let kappa = c(20.0, 4.0);
            assert!(symbol_single(m as f64, kappa).im > 0.0);
            assert!(symbol_hypersingular(m as f64, kappa).im > 0.0);
        }
    }

    #[test]
    fn cutoff_split_matches_global_split() {
        // moderate Im k where both splits are accurate: force the cutoff by
        // comparing against a direct assembly with the budget bypassed.
        let nodes = sample(&make_kite(), 96).unwrap();
        let k = Wavenumber::new(c(3.0, 4.0)).unwrap();
        let w = cutoff_width(&nodes, k.value());
        assert!(w.is_some());
        let cut = assemble_layer_operators(&nodes, k).unwrap();
        // the same operator applied to a smooth density must agree with the
        // finer-grid result
        let fine = sample(&make_kite(), 192).unwrap();
        let cutf = assemble_layer_operators(&fine, k).unwrap();
        let f = |t: f64| c((2.0 * t).cos() + 0.3, t.sin());
        let x: Vec<_> = nodes.t.iter().map(|&t| f(t)).collect();
        let xf: Vec<_> = fine.t.iter().map(|&t| f(t)).collect();
        for (a, b) in [(&cut.s, &cutf.s), (&cut.n, &cutf.n), (&cut.d, &cutf.d)] {
            let ya = apply_dense(a, &x).unwrap();
            let yb = apply_dense(b, &xf).unwrap();
            let err = (0..nodes.len()).map(|i| (ya[i] - yb[2 * i]).norm()).fold(0.0, f64::max);
            assert!(err < 1e-7, "err={err}");
        }
    }

    #[test]
    fn calderon_identities() {
        for curve in [make_circle(), make_kite()] {
            let k = Wavenumber::real(2.0).unwrap();
            let a = calderon_residual(&sample(&curve, 64).unwrap(), k).unwrap();
            let b = calderon_residual(&sample(&curve, 128).unwrap(), k).unwrap();
            eprintln!("{} {a:?}\n{} {b:?}", curve.name(), curve.name());
            assert!(a.resolved_sn < 1e-8 && a.resolved_ns < 1e-8, "{}", curve.name());
            assert!(b.resolved_sn < (a.resolved_sn / 100.0).max(1e-13));
            assert!(b.full_sn < a.full_sn);
        }
    }

    #[test]
    fn kite_self_convergence() {
        let k = Wavenumber::real(8.0).unwrap();
        let coarse = sample(&make_kite(), 64).unwrap();
        let fine = sample(&make_kite(), 128).unwrap();
        let a = assemble_layer_operators(&coarse, k).unwrap();
        let b = assemble_layer_operators(&fine, k).unwrap();
        let f = |t: f64| c((t).cos().exp(), (2.0 * t).sin());
        let x: Vec<_> = coarse.t.iter().map(|&t| f(t)).collect();
        let xf: Vec<_> = fine.t.iter().map(|&t| f(t)).collect();
        for (name, ma, mb) in [
            ("S", &a.s, &b.s),
            ("D", &a.d, &b.d),
            ("D*", &a.dstar, &b.dstar),
            ("N", &a.n, &b.n),
        ] {
            let ya = apply_dense(ma, &x).unwrap();
            let yb = apply_dense(mb, &xf).unwrap();
            let err = (0..coarse.len())
                .map(|i| (ya[i] - yb[2 * i]).norm())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "{name} err={err:e}");
        }
    }

    #[test]
    fn positivity_of_complexified_operators() {
        use rand::{Rng, SeedableRng};
        let kappa = Wavenumber::complexified(c(2.0, 1.0)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for curve in [make_circle(), make_kite(), crate::geometry::make_cavity()] {
            let nodes = sample(&curve, 48).unwrap();
            let ops = assemble_layer_operators(&nodes, kappa).unwrap();
            let w = nodes.arclength_weights();
            for _ in 0..100 {
                let x: Vec<Complex64> = (0..nodes.len())
                    .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                    .collect();
                for m in [&ops.s, &ops.n] {
                    let y = apply_dense(m, &x).unwrap();
                    let q: Complex64 = (0..nodes.len()).map(|i| x[i].conj() * w[i] * y[i]).sum();
                    assert!(q.im > 0.0, "{} {q}", curve.name());
                }
            }
        }
    }

    #[test]
    fn smoothing_slopes() {
        let nodes = sample(&make_circle(), 64).unwrap();
        let ka = Wavenumber::new(c(2.0, 1.0)).unwrap();
        let kb = Wavenumber::new(c(5.0, 0.5)).unwrap();
        let a = assemble_layer_operators(&nodes, ka).unwrap();
        let b = assemble_layer_operators(&nodes, kb).unwrap();
        let sig = assemble_sigma(&nodes, OperatorKind::SigmaS, ka).unwrap();
        let s_sig = operator_difference_decay(&a.s, &sig.entries, &nodes).unwrap();
        let s_s = operator_difference_decay(&a.s, &b.s, &nodes).unwrap();
        let n_n = operator_difference_decay(&a.n, &b.n, &nodes).unwrap();
        assert!(s_sig <= -2.7, "S - sigma slope {s_sig}");
        assert!(s_s <= -2.7, "S - S slope {s_s}");
        assert!(n_n <= -0.7, "N - N slope {n_n}");
    }
}
