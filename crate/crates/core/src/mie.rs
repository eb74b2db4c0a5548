//! Separation-of-variables solution for a penetrable disc.
//!
//! With incidence angle θ_d the incident wave is Σ i^m e^{−imθ_d} J_m(k₁r) e^{imθ}.
//! The scattered field is Σ a_m H_m(k₁r) e^{imθ} and the interior field is
//! Σ c_m J_m(k₂r) e^{imθ}. Each mode solves the 2×2 system
//!
//! ```text
//!   a_m H_m(k₁R)     − c_m J_m(k₂R)       = −I_m J_m(k₁R)
//!   a_m k₁ H_m'(k₁R) − c_m ν k₂ J_m'(k₂R) = −I_m k₁ J_m'(k₁R)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::formulations::TransmissionConfig;
use crate::geometry::Point;
use crate::postprocess::FarField;
use crate::specfun::{bessel_j, bessel_j_deriv, hankel1, hankel1_deriv, MAX_ORDER};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Consecutive negligible modes required before the series is cut.
const TAIL_RUN: usize = 4;
const TAIL_RATIO: f64 = 1e-16;

#[derive(Debug, Clone)]
pub struct MieSolution {
    pub radius: f64,
    pub k1: f64,
    pub k2: f64,
    pub nu: f64,
    /// Incidence angle θ_d.
    pub incidence_angle: f64,
    /// Modes −order..=order are kept.
    pub order: usize,
    /// a_m at index m + order.
    pub scattered: Vec<Complex64>,
    /// c_m at index m + order.
    pub interior: Vec<Complex64>,
    /// 2-norm condition number of each mode's system, for m = 0..=order.
    pub condition: Vec<f64>,
}

struct ModeSolve {
    a: Complex64,
    c: Complex64,
    /// |c_m J_m(k₂R)|, the interior field's size on the boundary.
    edge: f64,
    cond: f64,
}

fn incident_coefficient(m: i64, theta_d: f64) -> Complex64 {
    I.powi(m as i32) * Complex64::from_polar(1.0, -(m as f64) * theta_d)
}

fn cond2(m: [[Complex64; 2]; 2]) -> f64 {
    let fro: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    if det == 0.0 {
        return f64::INFINITY;
    }
    // σ_max σ_min = |det|, so κ = σ_max² / |det|.
    let disc = (fro * fro - 4.0 * det * det).max(0.0).sqrt();
    (fro + disc) / 2.0 / det
}

/// Per-order solve for the coefficient pair at mode |m| with unit incident
/// coefficient. Symmetry J_{−m} = (−1)^m J_m makes a_{−m}/I_{−m} = a_m/I_m.
fn solve_order(order: u32, radius: f64, k1: f64, k2: f64, nu: f64) -> Result<ModeSolve> {
    let z1 = Complex64::from(k1 * radius);
    let z2 = Complex64::from(k2 * radius);
    let j1 = bessel_j(order, z1)?;
    let j1p = bessel_j_deriv(order, z1)?;
    let h = hankel1(order, z1)?;
    let hp = hankel1_deriv(order, z1)?;
    let j2 = bessel_j(order, z2)?;
    let j2p = bessel_j_deriv(order, z2)?;
    let mat = [[h, -j2], [hp * k1, -j2p * nu * k2]];
    let det = mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0];
    if det.norm() == 0.0 || !det.is_finite() {
        return Err(Error::SingularMode { mode: order as i64 });
    }
    let rhs = [-j1, -j1p * k1];
    let a = (rhs[0] * mat[1][1] - mat[0][1] * rhs[1]) / det;
    let c = (mat[0][0] * rhs[1] - mat[1][0] * rhs[0]) / det;
    // Column scaling keeps the condition number meaningful when H_m is
    // large and J_m small.
    let col0 = h.norm().max(mat[1][0].norm());
    let col1 = j2.norm().max(mat[1][1].norm());
    let scaled = [
        [mat[0][0] / col0, mat[0][1] / col1],
        [mat[1][0] / col0, mat[1][1] / col1],
    ];
    Ok(ModeSolve {
        a,
        c,
        edge: (c * j2).norm(),
        cond: cond2(scaled),
    })
}

/// Solve for the disc of the given radius with the config's wavenumbers,
/// contrast and incidence.
pub fn mie_solve(radius: f64, config: &TransmissionConfig) -> Result<MieSolution> {
    let d = config.incidence();
    mie_solve_with(radius, config.k1(), config.k2(), config.nu(), d[1].atan2(d[0]), None)
}

/// Explicit-parameter variant. `order` fixes the truncation; otherwise modes
/// are added until both |a_m| and |c_m J_m(k₂R)| have stayed below
/// 1e-16 of their running maximum for several orders.
pub fn mie_solve_with(
    radius: f64,
    k1: f64,
    k2: f64,
    nu: f64,
    incidence_angle: f64,
    order: Option<usize>,
) -> Result<MieSolution> {
    if !(radius > 0.0 && k1 > 0.0 && k2 > 0.0 && nu > 0.0) {
        return Err(Error::Config("disc radius, wavenumbers and ν must be positive".into()));
    }
    let mut per_order = Vec::new();
    let mut biggest: f64 = 0.0;
    let mut quiet = 0;
    let mut m = 0usize;
    loop {
        if let Some(fixed) = order {
            if m > fixed {
                break;
            }
        } else {
            if quiet >= TAIL_RUN && m as f64 > k1.max(k2) * radius {
                break;
            }
            if m as u32 > MAX_ORDER - 1 {
                return Err(Error::Truncation(MAX_ORDER as usize));
            }
        }
        let sol = solve_order(m as u32, radius, k1, k2, nu)?;
        let mag = sol.a.norm().max(sol.edge);
        biggest = biggest.max(mag);
        if mag <= TAIL_RATIO * biggest {
            quiet += 1;
        } else {
            quiet = 0;
        }
        per_order.push(sol);
        m += 1;
    }
    let top = per_order.len() - 1;
    let mut scattered = Vec::with_capacity(2 * top + 1);
    let mut interior = Vec::with_capacity(2 * top + 1);
    for mm in -(top as i64)..=(top as i64) {
        let s = &per_order[mm.unsigned_abs() as usize];
        let inc = incident_coefficient(mm, incidence_angle);
        // J_{−m} = (−1)^m J_m and H_{−m} = (−1)^m H_m: the per-order ratios
        // a/I and c/I are the same for ±m.
        scattered.push(s.a * inc);
        interior.push(s.c * inc);
    }
    Ok(MieSolution {
        radius,
        k1,
        k2,
        nu,
        incidence_angle,
        order: top,
        scattered,
        interior,
        condition: per_order.iter().map(|s| s.cond).collect(),
    })
}

impl MieSolution {
    pub fn coefficient(&self, m: i64) -> Complex64 {
        self.scattered[(m + self.order as i64) as usize]
    }

    pub fn interior_coefficient(&self, m: i64) -> Complex64 {
        self.interior[(m + self.order as i64) as usize]
    }

    fn modes(&self) -> impl Iterator<Item = i64> {
        let top = self.order as i64;
        -top..=top
    }

    /// Scattered far-field amplitude at observation angle θ.
    pub fn far_field_at(&self, theta: f64) -> Complex64 {
        let pre = (2.0 / (PI * self.k1)).sqrt() * Complex64::from_polar(1.0, -PI / 4.0);
        let sum: Complex64 = self
            .modes()
            .map(|m| self.coefficient(m) * (-I).powi(m as i32) * Complex64::from_polar(1.0, m as f64 * theta))
            .sum();
        pre * sum
    }

    /// Total field: u^inc + u¹ for r > R, u² for r < R.
    pub fn near_field(&self, p: Point) -> Result<Complex64> {
        let r = p[0].hypot(p[1]);
        let theta = p[1].atan2(p[0]);
        if r >= self.radius {
            let inc = Complex64::new(
                0.0,
                self.k1 * (self.incidence_angle.cos() * p[0] + self.incidence_angle.sin() * p[1]),
            )
            .exp();
            let z = Complex64::from(self.k1 * r);
            let mut acc = inc;
            for m in self.modes() {
                let hm = hankel1(m.unsigned_abs() as u32, z)? * sign(m);
                acc += self.coefficient(m) * hm * Complex64::from_polar(1.0, m as f64 * theta);
            }
            Ok(acc)
        } else {
            let z = Complex64::from(self.k2 * r);
            let mut acc = Complex64::new(0.0, 0.0);
            for m in self.modes() {
                let jm = bessel_j(m.unsigned_abs() as u32, z)? * sign(m);
                acc += self.interior_coefficient(m) * jm * Complex64::from_polar(1.0, m as f64 * theta);
            }
            Ok(acc)
        }
    }

    /// Exterior and interior Cauchy data at boundary angles:
    /// (u_ext, ∂_r u_ext, u_int, ∂_r u_int), exterior values include u^inc.
    pub fn boundary_traces(&self, angles: &[f64]) -> Result<Vec<[Complex64; 4]>> {
        let z1 = Complex64::from(self.k1 * self.radius);
        let z2 = Complex64::from(self.k2 * self.radius);
        let mut per_mode = Vec::new();
        for m in self.modes() {
            let o = m.unsigned_abs() as u32;
            let s = sign(m);
            per_mode.push((
                m,
                bessel_j(o, z1)? * s,
                bessel_j_deriv(o, z1)? * s,
                hankel1(o, z1)? * s,
                hankel1_deriv(o, z1)? * s,
                bessel_j(o, z2)? * s,
                bessel_j_deriv(o, z2)? * s,
            ));
        }
        Ok(angles
            .iter()
            .map(|&th| {
                let mut out = [Complex64::new(0.0, 0.0); 4];
                for &(m, j1, j1p, h, hp, j2, j2p) in &per_mode {
                    let e = Complex64::from_polar(1.0, m as f64 * th);
                    let inc = incident_coefficient(m, self.incidence_angle);
                    let a = self.coefficient(m);
                    let c = self.interior_coefficient(m);
                    out[0] += (inc * j1 + a * h) * e;
                    out[1] += (inc * j1p + a * hp) * self.k1 * e;
                    out[2] += c * j2 * e;
                    out[3] += c * j2p * self.k2 * e;
                }
                out
            })
            .collect())
    }
}

/// (−1)^m for the negative-order reflection formula.
fn sign(m: i64) -> f64 {
    if m < 0 && m % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

/// Far-field amplitudes on the given angles.
pub fn mie_far_field(sol: &MieSolution, angles: &[f64]) -> FarField {
    FarField {
        angles: angles.to_vec(),
        amplitudes: angles.iter().map(|&t| sol.far_field_at(t)).collect(),
    }
}
