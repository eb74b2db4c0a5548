//! Far fields, near fields and the far-field error metric.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{NodeSet, Point};
use crate::solver::Solution;
use crate::specfun::hankel1;

/// Far-field amplitudes on equispaced observation angles.
#[derive(Debug, Clone, PartialEq)]
pub struct FarField {
    pub angles: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
}

impl FarField {
    /// θ_j = 2πj/count.
    pub fn angles(count: usize) -> Vec<f64> {
        (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect()
    }

    pub fn directions(&self) -> Vec<Point> {
        self.angles.iter().map(|a| [a.cos(), a.sin()]).collect()
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// CSV with columns angle, re, im, abs.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["angle", "re", "im", "abs"])?;
        for (a, u) in self.angles.iter().zip(&self.amplitudes) {
            w.write_record([
                format!("{a:.12}"),
                format!("{:.15e}", u.re),
                format!("{:.15e}", u.im),
                format!("{:.15e}", u.norm()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// e^{iπ/4} / √(8πk): the constant in G_k(x − y) ≈ C e^{ik|x|}/√|x| · e^{−ik x̂·y}.
pub fn far_field_constant(k: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI / 4.0) / (8.0 * PI * k).sqrt()
}

/// Far field of D_k[α] − S_k[β] on the given nodes.
pub fn layer_far_field(nodes: &NodeSet, k: f64, alpha: &[Complex64], beta: &[Complex64], angles: &[f64]) -> FarField {
    let cst = far_field_constant(k);
    let h = nodes.param_weight();
    let ik = Complex64::new(0.0, k);
    let amplitudes = angles
        .iter()
        .map(|a| {
            let xh = [a.cos(), a.sin()];
            let sum: Complex64 = (0..nodes.len())
                .map(|j| {
                    let y = nodes.pos[j];
                    let nrm = nodes.normal[j];
                    let phase = (-ik * (xh[0] * y[0] + xh[1] * y[1])).exp();
                    let dn = xh[0] * nrm[0] + xh[1] * nrm[1];
                    (-ik * dn * alpha[j] - beta[j]) * phase * (h * nodes.speed[j])
                })
                .sum();
            cst * sum
        })
        .collect();
    FarField {
        angles: angles.to_vec(),
        amplitudes,
    }
}

fn require_converged(sol: &Solution) -> Result<()> {
    if sol.report.final_residual() > sol.config().tol && !sol.report.breakdown {
        return Err(Error::Unconverged);
    }
    Ok(())
}

/// Far field of the scattered wave on `config.directions` equispaced angles.
pub fn far_field(sol: &Solution) -> Result<FarField> {
    require_converged(sol)?;
    let angles = FarField::angles(sol.config().directions);
    Ok(layer_far_field(
        &sol.system.nodes,
        sol.config().k1(),
        &sol.alpha,
        &sol.beta,
        &angles,
    ))
}

/// Far field computed from the recovered Cauchy data instead of the
/// formulation's own densities. For direct formulations the two coincide.
pub fn far_field_from_traces(sol: &Solution) -> Result<FarField> {
    require_converged(sol)?;
    let angles = FarField::angles(sol.config().directions);
    Ok(layer_far_field(
        &sol.system.nodes,
        sol.config().k1(),
        &sol.trace,
        &sol.normal_derivative,
        &angles,
    ))
}

/// max_x̂ |u_calc(x̂) − u_ref(x̂)|.
pub fn far_field_error(computed: &FarField, reference: &FarField) -> Result<f64> {
    if computed.angles.len() != reference.angles.len()
        || computed
            .angles
            .iter()
            .zip(&reference.angles)
            .any(|(a, b)| (a - b).abs() > 1e-12)
    {
        return Err(Error::GridMismatch);
    }
    Ok(computed
        .amplitudes
        .iter()
        .zip(&reference.amplitudes)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max))
}

/// Trapezoid evaluation of D_k[α] − S_k[β] at a point off the curve.
pub fn layer_potential(
    nodes: &NodeSet,
    k: f64,
    alpha: &[Complex64],
    beta: &[Complex64],
    x: Point,
) -> Result<Complex64> {
    let kc = Complex64::from(k);
    let h = nodes.param_weight();
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..nodes.len() {
        let y = nodes.pos[j];
        let d = [x[0] - y[0], x[1] - y[1]];
        let r = d[0].hypot(d[1]);
        let h0 = hankel1(0, kc * r)?;
        let h1 = hankel1(1, kc * r)?;
        let dn = (d[0] * nodes.normal[j][0] + d[1] * nodes.normal[j][1]) / r;
        let dlp = Complex64::new(0.0, k / 4.0) * h1 * dn;
        let slp = Complex64::new(0.0, 0.25) * h0;
        acc += (dlp * alpha[j] - slp * beta[j]) * (h * nodes.speed[j]);
    }
    Ok(acc)
}

/// Total field at points away from Γ: u^inc + u¹ outside, u² inside.
pub fn near_field(sol: &Solution, points: &[Point]) -> Result<Vec<Complex64>> {
    require_converged(sol)?;
    let nodes = &sol.system.nodes;
    let config = sol.config();
    let min_dist = 3.0 * nodes.max_spacing();
    let inv_nu = 1.0 / config.nu();
    let d = config.incidence();
    let int_alpha: Vec<Complex64> = sol.trace.iter().map(|v| -v).collect();
    let int_beta: Vec<Complex64> = sol.normal_derivative.iter().map(|v| -v * inv_nu).collect();
    points
        .iter()
        .map(|&p| {
            let dist = nodes.distance_to(p);
            if dist < min_dist {
                return Err(Error::TooClose(p[0], p[1], dist));
            }
            if nodes.winding_number(p).abs() > 0.5 {
                // u² = −D₂[u] + ν⁻¹ S₂[∂u/∂n]
                layer_potential(nodes, config.k2(), &int_alpha, &int_beta, p)
            } else {
                let inc = Complex64::new(0.0, config.k1() * (d[0] * p[0] + d[1] * p[1])).exp();
                Ok(inc + layer_potential(nodes, config.k1(), &sol.alpha, &sol.beta, p)?)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formulations::{Formulation, Polarization, TransmissionConfig};
    use crate::geometry::{sample, GeometryKind};
    use crate::mie::{mie_far_field, mie_solve};
    use crate::solver::solve;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn circle(f: Formulation, eps2: f64, n: usize) -> TransmissionConfig {
        TransmissionConfig::new(GeometryKind::Circle, f, 8.0, eps2, Polarization::E, n)
    }

    #[test]
    fn asymptotic_kernel_matches_brute_force_at_large_radius() {
        let nodes = sample(&GeometryKind::Kite.curve(), 32).unwrap();
        let k = 1.0;
        let alpha: Vec<_> = nodes.t.iter().map(|t| c(t.cos(), 0.3 * (2.0 * t).sin())).collect();
        let beta: Vec<_> = nodes.t.iter().map(|t| c((3.0 * t).sin(), 1.0)).collect();
        let angles = FarField::angles(360);
        let ff = layer_far_field(&nodes, k, &alpha, &beta, &angles);
        let radius = 1e6;
        let h = nodes.param_weight();
        let scale = ff.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        for (a, u_inf) in angles.iter().zip(&ff.amplitudes).step_by(7) {
            let x = [radius * a.cos(), radius * a.sin()];
            // full Hankel kernels through the Amos routines, no domain cap
            let mut u = c(0.0, 0.0);
            for j in 0..nodes.len() {
                let d = [x[0] - nodes.pos[j][0], x[1] - nodes.pos[j][1]];
                let r = d[0].hypot(d[1]);
                let h0 = complex_bessel::hankel1(0.0, c(k * r, 0.0)).unwrap();
                let h1 = complex_bessel::hankel1(1.0, c(k * r, 0.0)).unwrap();
                let dn = (d[0] * nodes.normal[j][0] + d[1] * nodes.normal[j][1]) / r;
                u += (c(0.0, k / 4.0) * h1 * dn * alpha[j] - c(0.0, 0.25) * h0 * beta[j]) * (h * nodes.speed[j]);
            }
            let rescaled = u * radius.sqrt() * c(0.0, -k * radius).exp();
            assert!((rescaled - u_inf).norm() <= 1e-6 * scale, "angle {a}");
        }
    }

    #[test]
    fn error_metric() {
        let angles = FarField::angles(360);
        let a = FarField {
            angles: angles.clone(),
            amplitudes: angles.iter().map(|t| c(t.cos(), t.sin())).collect(),
        };
        assert_eq!(far_field_error(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b.amplitudes.iter_mut().for_each(|v| *v += 1e-3);
        assert!((far_field_error(&b, &a).unwrap() - 1e-3).abs() < 1e-15);
        let other = FarField {
            angles: FarField::angles(720),
            amplitudes: vec![c(0.0, 0.0); 720],
        };
        assert!(matches!(far_field_error(&a, &other), Err(Error::GridMismatch)));
    }

    #[test]
    fn zero_contrast_scatters_nothing() {
        for f in [Formulation::Sk15, Formulation::SkrLp] {
            let sol = solve(&circle(f, 1.0, 24)).unwrap();
            let ff = far_field(&sol).unwrap();
            let peak = ff.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
            assert!(peak < 1e-7, "{f}: {peak}");
            // inside, the total field is the incident wave
            let d = sol.config().incidence();
            let p = [0.2, -0.1];
            let u = near_field(&sol, &[p]).unwrap()[0];
            let inc = c(0.0, 8.0 * (d[0] * p[0] + d[1] * p[1])).exp();
            assert!((u - inc).norm() < 1e-7, "{f}");
        }
    }

    #[test]
    fn circle_matches_mie_near_and_far() {
        let config = circle(Formulation::Sk15, 2.0, 32);
        let sol = solve(&config).unwrap();
        let mie = mie_solve(1.0, &config).unwrap();
        let reference = mie_far_field(&mie, &FarField::angles(config.directions));
        assert!(far_field_error(&far_field(&sol).unwrap(), &reference).unwrap() <= 1e-7);

        let points: Vec<Point> = (0..16)
            .map(|j| {
                let a = 0.4 * j as f64;
                let r = if j % 2 == 0 { 3.0 } else { 0.5 };
                [r * a.cos(), r * a.sin()]
            })
            .collect();
        let bie = near_field(&sol, &points).unwrap();
        for (p, u) in points.iter().zip(bie) {
            let exact = mie.near_field(*p).unwrap();
            assert!((u - exact).norm() <= 1e-6, "{p:?}: {u} vs {exact}");
        }
    }

    #[test]
    fn points_near_the_boundary_are_rejected() {
        let sol = solve(&circle(Formulation::Sk15, 2.0, 16)).unwrap();
        assert!(matches!(near_field(&sol, &[[1.01, 0.0]]), Err(Error::TooClose(..))));
    }

    #[test]
    fn unconverged_solution_is_rejected() {
        let mut sol = solve(&circle(Formulation::Sk15, 2.0, 16)).unwrap();
        sol.report.residuals.push(1.0);
        assert!(matches!(far_field(&sol), Err(Error::Unconverged)));
    }

    #[test]
    fn regularized_densities_and_recovered_traces_agree() {
        for g in [GeometryKind::Circle, GeometryKind::Kite] {
            for f in [Formulation::SkrLp, Formulation::SkrPs] {
                let config = TransmissionConfig::new(g, f, 8.0, 2.0, Polarization::H, 64);
                let sol = solve(&config).unwrap();
                let a = far_field(&sol).unwrap();
                let b = far_field_from_traces(&sol).unwrap();
                let scale = b.amplitudes.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let diff = far_field_error(&a, &b).unwrap();
                assert!(diff <= 10.0 * config.tol * scale.max(1.0), "{g} {f}: {diff}");
            }
        }
    }

    #[test]
    fn reciprocity_on_the_circle() {
        let count = 720;
        let step = 2.0 * PI / count as f64;
        let (i_theta, i_phi) = (100usize, 530usize);
        let (theta, phi) = (i_theta as f64 * step, i_phi as f64 * step);
        let run = |incidence: f64, observe: usize| {
            let mut config = circle(Formulation::Sk15, 2.0, 32);
            config.direction = Some([incidence.cos(), incidence.sin()]);
            far_field(&solve(&config).unwrap()).unwrap().amplitudes[observe % count]
        };
        let forward = run(phi, i_theta);
        let backward = run(theta + PI, i_phi + count / 2);
        assert!((forward - backward).norm() <= 1e-6, "{forward} vs {backward}");
    }

    #[test]
    fn transmission_residual_across_the_boundary_decays() {
        // u outside and inside at x ± δn, extrapolated to δ → 0.
        let jump = |n: usize| {
            let sol = solve(&circle(Formulation::Sk15, 2.0, n)).unwrap();
            let delta = 3.5 * sol.system.nodes.max_spacing();
            let t = 0.7f64;
            let x = [t.cos(), t.sin()];
            let at = |s: f64| [x[0] * (1.0 + s), x[1] * (1.0 + s)];
            let pts = [at(delta), at(2.0 * delta), at(-delta), at(-2.0 * delta)];
            let u = near_field(&sol, &pts).unwrap();
            let outside = u[0] * 2.0 - u[1];
            let inside = u[2] * 2.0 - u[3];
            (outside - inside).norm()
        };
        let coarse = jump(64);
        let fine = jump(128);
        assert!(fine < coarse / 3.0, "{coarse} -> {fine}");
    }

    #[test]
    fn csv_layout() {
        let ff = FarField {
            angles: vec![0.0, PI],
            amplitudes: vec![c(1.0, -2.0), c(0.0, 0.5)],
        };
        let mut buf = Vec::new();
        ff.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "angle,re,im,abs");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.000000000000,1.000000000000000e0,-2.000000000000000e0"));
    }
}
