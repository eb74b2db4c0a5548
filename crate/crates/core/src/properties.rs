//! Automated property checks, reported one record per property.
//!
//! Every check is deterministic (fixed seeds, fixed sizes). Two optional
//! faults let the suite demonstrate that it can fail: a perturbation of the
//! single-layer diagonal, and a real (ε = 0) regularization wavenumber.

use std::f64::consts::PI;
use std::io::Write;

use faer::linalg::solvers::Solve;
use faer::Col;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::formulations::{assemble_formulation, Formulation, Polarization, TransmissionConfig};
use crate::geometry::{sample, GeometryKind, NodeSet};
use crate::gmres::gmres_solve;
use crate::mie::{mie_far_field, mie_solve_with};
use crate::operators::{
    apply_dense, assemble_layer_operators, assemble_sigma, assemble_single_layer, calderon_residual_of,
    operator_difference_decay, symbol_hypersingular, symbol_single, OperatorKind, Wavenumber,
};
use crate::postprocess::{far_field, far_field_error, far_field_from_traces, FarField};
use crate::quadrature::hilbert_derivative;
use crate::solver::solve;
use crate::specfun::{bessel_j, bessel_j_deriv, bessel_y, bessel_y_deriv, hankel1};

/// One property outcome.
#[derive(Debug, Clone, Serialize)]
pub struct PropertyRecord {
    pub module: &'static str,
    pub property: String,
    pub observed: f64,
    pub required: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl PropertyRecord {
    fn at_most(module: &'static str, property: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            module,
            property: property.into(),
            observed,
            required: format!("<= {bound:e}"),
            pass: observed <= bound,
            detail: None,
        }
    }

    fn above(module: &'static str, property: impl Into<String>, observed: f64, bound: f64) -> Self {
        Self {
            module,
            property: property.into(),
            observed,
            required: format!("> {bound:e}"),
            pass: observed > bound,
            detail: None,
        }
    }

    fn failed(module: &'static str, property: impl Into<String>, required: &str, err: impl std::fmt::Display) -> Self {
        Self {
            module,
            property: property.into(),
            observed: f64::NAN,
            required: required.into(),
            pass: false,
            detail: Some(format!("rejected: {err}")),
        }
    }

    fn with_detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PropertyOptions {
    /// Wavenumber of the positivity suite.
    pub kappa1: Complex64,
    /// Added to the single-layer diagonal in the Calderón check.
    pub diagonal_fault: Option<f64>,
}

impl Default for PropertyOptions {
    fn default() -> Self {
        Self {
            kappa1: Complex64::new(2.0, 1.0),
            diagonal_fault: None,
        }
    }
}

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

fn specfun_checks() -> Result<Vec<PropertyRecord>> {
    let mut rec = 0.0f64;
    let mut wr = 0.0f64;
    for z in [c(0.3, 0.0), c(2.0, 1.0), c(7.5, 0.2), c(15.0, 3.0), c(40.0, 0.0)] {
        for n in 1..30u32 {
            for f in [bessel_j, hankel1] {
                let (a, b, d) = (f(n - 1, z)?, f(n, z)?, f(n + 1, z)?);
                rec = rec.max((a + d - b * (2.0 * n as f64) / z).norm() / b.norm());
            }
            let w = bessel_j(n, z)? * bessel_y_deriv(n, z)? - bessel_j_deriv(n, z)? * bessel_y(n, z)?;
            let exact = c(2.0 / PI, 0.0) / z;
            wr = wr.max((w - exact).norm() / exact.norm());
        }
    }
    Ok(vec![
        PropertyRecord::at_most("specfun", "three-term recurrence relative residual", rec, 1e-10),
        PropertyRecord::at_most("specfun", "Wronskian J Y' - J' Y = 2/(pi z)", wr, 1e-10),
    ])
}

fn quadrature_checks() -> Result<Vec<PropertyRecord>> {
    // The Hilbert-derivative multiplier is exact on trigonometric polynomials.
    let n = 32;
    let t: Vec<f64> = (0..2 * n).map(|j| PI * j as f64 / n as f64).collect();
    let f: Vec<Complex64> = t.iter().map(|&s| c((3.0 * s).cos(), (5.0 * s).sin())).collect();
    let g = hilbert_derivative(&f)?;
    let err = t
        .iter()
        .zip(&g)
        .map(|(&s, v)| (v - c(-1.5 * (3.0 * s).cos(), -2.5 * (5.0 * s).sin())).norm())
        .fold(0.0, f64::max);
    Ok(vec![PropertyRecord::at_most(
        "quadrature",
        "Hilbert-derivative multiplier exact on trig polynomials",
        err,
        1e-12,
    )])
}

fn operator_checks(options: &PropertyOptions) -> Result<Vec<PropertyRecord>> {
    let mut out = Vec::new();

    // spectral oracle for S on the unit circle
    let circle = sample(&GeometryKind::Circle.curve(), 64)?;
    let mut worst = 0.0f64;
    for k in [c(1.0, 0.0), c(2.0, 1.0)] {
        let s = assemble_single_layer(&circle, Wavenumber::new(k)?)?;
        for m in -16i64..=16 {
            let o = m.unsigned_abs() as u32;
            let lam = c(0.0, PI / 2.0) * bessel_j(o, k)? * hankel1(o, k)?;
            let e = mode(&circle, m);
            let r = apply_dense(&s.entries, &e)?;
            worst = worst.max(r.iter().zip(&e).map(|(a, b)| (a - b * lam).norm()).fold(0.0, f64::max));
        }
    }
    out.push(PropertyRecord::at_most(
        "operators",
        "single-layer circle eigenvalues, |m| <= n/4, n = 64, k in {1, 2+i}",
        worst,
        1e-10,
    ));

    // Calderón identities, optionally with a corrupted kernel diagonal
    let k = Wavenumber::real(2.0)?;
    for g in [GeometryKind::Circle, GeometryKind::Kite] {
        let mut res = Vec::new();
        for n in [64, 128] {
            let nodes = sample(&g.curve(), n)?;
            let mut ops = assemble_layer_operators(&nodes, k)?;
            if let Some(delta) = options.diagonal_fault {
                for i in 0..nodes.len() {
                    ops.s[(i, i)] += delta;
                }
            }
            res.push(calderon_residual_of(&ops, &nodes));
        }
        let detail = format!(
            "full-matrix S*N + I/4 - D^2: {:.2e} -> {:.2e}; mixed pairing (D*)^2: {:.2e}",
            res[0].full_sn, res[1].full_sn, res[0].mixed
        );
        let observed = res[0].resolved_sn.max(res[0].resolved_ns);
        out.push(
            PropertyRecord::at_most(
                "operators",
                format!("Calderon residual (resolved band), {g}, n = 64, k = 2"),
                observed,
                1e-8,
            )
            .with_detail(detail),
        );
        // Once the coarse residual is at roundoff a 100× drop is not measurable.
        let fine = res[1].resolved_sn.max(res[1].resolved_ns);
        out.push(PropertyRecord::at_most(
            "operators",
            format!("Calderon residual at n = 128 (needs 100x drop from n = 64, floor 1e-12), {g}"),
            fine,
            (observed / 100.0).max(1e-12),
        ));
    }

    // positivity of the complexified operators and of the principal symbols
    match Wavenumber::complexified(options.kappa1) {
        Err(e) => out.push(PropertyRecord::failed(
            "operators",
            "positivity suite admissibility",
            "Re, Im kappa1 > 0",
            e,
        )),
        Ok(kappa) => {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for g in [GeometryKind::Circle, GeometryKind::Kite, GeometryKind::Cavity] {
                let nodes = sample(&g.curve(), 48)?;
                let ops = assemble_layer_operators(&nodes, kappa)?;
                let ss = assemble_sigma(&nodes, OperatorKind::SigmaS, kappa)?;
                let sn = assemble_sigma(&nodes, OperatorKind::SigmaN, kappa)?;
                let w = nodes.arclength_weights();
                let mut least = [f64::INFINITY; 4];
                for _ in 0..100 {
                    let x: Vec<Complex64> = (0..nodes.len())
                        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                        .collect();
                    let norm: f64 = x.iter().zip(&w).map(|(v, wi)| v.norm_sqr() * wi).sum();
                    for (slot, m) in [&ops.s, &ops.n, &ss.entries, &sn.entries].into_iter().enumerate() {
                        let y = apply_dense(m, &x)?;
                        let q: Complex64 = (0..nodes.len()).map(|i| x[i].conj() * w[i] * y[i]).sum();
                        least[slot] = least[slot].min(q.im / norm);
                    }
                }
                for (name, v) in ["S", "N", "sigma^S", "sigma^N"].iter().zip(least) {
                    out.push(PropertyRecord::above(
                        "operators",
                        format!("min Im <{name} phi, phi> / |phi|^2 over 100 random densities, {g}"),
                        v,
                        0.0,
                    ));
                }
            }
            let kv = kappa.value();
            let least = (-512i64..=512)
                .map(|m| {
                    symbol_single(m as f64, kv)
                        .im
                        .min(symbol_hypersingular(m as f64, kv).im)
                })
                .fold(f64::INFINITY, f64::min);
            out.push(PropertyRecord::above(
                "operators",
                "min over |m| <= 512 of Im p^S, Im p^N",
                least,
                0.0,
            ));
        }
    }

    // σ^N σ^S = −I/4
    let kite = sample(&GeometryKind::Kite.curve(), 32)?;
    let kappa = Wavenumber::complexified(c(2.0, 1.0))?;
    let prod = &assemble_sigma(&kite, OperatorKind::SigmaN, kappa)?.entries
        * &assemble_sigma(&kite, OperatorKind::SigmaS, kappa)?.entries;
    let mut dev = 0.0f64;
    for i in 0..kite.len() {
        for j in 0..kite.len() {
            let want = if i == j { -0.25 } else { 0.0 };
            dev = dev.max((prod[(i, j)] - want).norm());
        }
    }
    out.push(PropertyRecord::at_most(
        "operators",
        "sigma^N sigma^S + I/4",
        dev,
        1e-13,
    ));

    // smoothing slopes
    let ka = Wavenumber::new(c(2.0, 1.0))?;
    let kb = Wavenumber::new(c(5.0, 0.5))?;
    let a = assemble_layer_operators(&circle, ka)?;
    let b = assemble_layer_operators(&circle, kb)?;
    let sig = assemble_sigma(&circle, OperatorKind::SigmaS, ka)?;
    out.push(PropertyRecord::at_most(
        "operators",
        "decay exponent of S_k - sigma^S",
        operator_difference_decay(&a.s, &sig.entries, &circle)?,
        -2.7,
    ));
    out.push(PropertyRecord::at_most(
        "operators",
        "decay exponent of S_ka - S_kb",
        operator_difference_decay(&a.s, &b.s, &circle)?,
        -2.7,
    ));
    out.push(PropertyRecord::at_most(
        "operators",
        "decay exponent of N_ka - N_kb",
        operator_difference_decay(&a.n, &b.n, &circle)?,
        -0.7,
    ));
    Ok(out)
}

/// Largest pairwise far-field distance among all five formulations,
/// relative to the largest far-field amplitude.
pub fn formulation_spread(config: &TransmissionConfig) -> Result<f64> {
    let fields = Formulation::ALL
        .iter()
        .map(|&f| far_field(&solve(&config.with_formulation(f))?))
        .collect::<Result<Vec<_>>>()?;
    let scale = fields[0].amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            worst = worst.max(far_field_error(&fields[i], &fields[j])?);
        }
    }
    Ok(worst / scale)
}

fn solver_checks() -> Result<Vec<PropertyRecord>> {
    let mut out = Vec::new();
    for (g, n) in [(GeometryKind::Circle, 48), (GeometryKind::Kite, 96)] {
        let config = TransmissionConfig::new(g, Formulation::Sk15, 8.0, 2.0, Polarization::E, n);
        out.push(PropertyRecord::at_most(
            "formulations",
            format!(
                "relative pairwise far-field spread of all formulations, {g}, {} unknowns",
                config.unknowns()
            ),
            formulation_spread(&config)?,
            10.0 * config.tol,
        ));
    }

    // GMRES against a dense LU solve
    let mut config = TransmissionConfig::new(GeometryKind::Kite, Formulation::SkrLp, 8.0, 2.0, Polarization::H, 32);
    config.tol = 1e-10;
    let system = assemble_formulation(&config)?;
    let report = gmres_solve(&system.matrix, &system.rhs, config.tol)?;
    let rhs = Col::from_fn(system.rhs.len(), |i| system.rhs[i]);
    let direct: Col<Complex64> = system.matrix.partial_piv_lu().solve(&rhs);
    let scale = (0..direct.nrows()).map(|i| direct[i].norm()).fold(0.0, f64::max);
    let diff = (0..direct.nrows())
        .map(|i| (direct[i] - report.solution[i]).norm())
        .fold(0.0, f64::max);
    out.push(PropertyRecord::at_most(
        "gmres",
        "relative max-norm distance to a dense LU solve / tol",
        diff / scale / config.tol,
        10.0,
    ));
    Ok(out)
}

fn mie_checks() -> Result<Vec<PropertyRecord>> {
    let (k1, k2, nu) = (8.0, 8.0 * 2f64.sqrt(), 0.5);
    let sol = mie_solve_with(1.0, k1, k2, nu, -PI / 2.0, None)?;
    let angles = FarField::angles(64);
    let traces = sol.boundary_traces(&angles)?;
    let mut dir = 0.0f64;
    let mut neu = 0.0f64;
    for t in &traces {
        dir = dir.max((t[0] - t[2]).norm() / t[0].norm().max(1.0));
        neu = neu.max((t[1] - t[3] * nu).norm() / t[1].norm().max(1.0));
    }
    // optical theorem: ∫|u∞|² dθ = −√(8π/k) Re(e^{iπ/4} u∞(θ_d))
    let ff = mie_far_field(&sol, &FarField::angles(2048));
    let total: f64 = ff.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * 2.0 * PI / 2048.0;
    let forward = sol.far_field_at(-PI / 2.0);
    let theorem = -(8.0 * PI / k1).sqrt() * (Complex64::from_polar(1.0, PI / 4.0) * forward).re;
    Ok(vec![
        PropertyRecord::at_most("mie", "transmission condition residual (Dirichlet)", dir, 1e-12),
        PropertyRecord::at_most("mie", "transmission condition residual (Neumann)", neu, 1e-12),
        PropertyRecord::at_most(
            "mie",
            "optical theorem relative defect",
            (total - theorem).abs() / total,
            1e-10,
        ),
    ])
}

fn postprocess_checks() -> Result<Vec<PropertyRecord>> {
    let mut out = Vec::new();
    for f in [Formulation::SkrLp, Formulation::SkrPs] {
        let config = TransmissionConfig::new(GeometryKind::Kite, f, 8.0, 2.0, Polarization::E, 64);
        let sol = solve(&config)?;
        let d = far_field_error(&far_field(&sol)?, &far_field_from_traces(&sol)?)?;
        out.push(PropertyRecord::at_most(
            "postprocess",
            format!("{f} far field vs far field of recovered traces, kite"),
            d,
            10.0 * config.tol,
        ));
    }
    let count = 720;
    let step = 2.0 * PI / count as f64;
    let (it, ip) = (100usize, 530usize);
    let run = |incidence: f64, observe: usize| -> Result<Complex64> {
        let mut config =
            TransmissionConfig::new(GeometryKind::Circle, Formulation::Sk15, 8.0, 2.0, Polarization::E, 32);
        config.direction = Some([incidence.cos(), incidence.sin()]);
        Ok(far_field(&solve(&config)?)?.amplitudes[observe % count])
    };
    let fwd = run(ip as f64 * step, it)?;
    let bwd = run(it as f64 * step + PI, ip + count / 2)?;
    out.push(PropertyRecord::at_most(
        "postprocess",
        "reciprocity on the circle",
        (fwd - bwd).norm(),
        1e-6,
    ));
    Ok(out)
}

/// Run every property. Checks that cannot be evaluated are reported as
/// failed records rather than skipped.
pub fn run_properties(options: &PropertyOptions) -> Vec<PropertyRecord> {
    type Group<'a> = (&'static str, Box<dyn Fn() -> Result<Vec<PropertyRecord>> + 'a>);
    let groups: [Group; 6] = [
        ("specfun", Box::new(specfun_checks)),
        ("quadrature", Box::new(quadrature_checks)),
        ("operators", Box::new(move || operator_checks(options))),
        ("formulations", Box::new(solver_checks)),
        ("mie", Box::new(mie_checks)),
        ("postprocess", Box::new(postprocess_checks)),
    ];
    let mut out = Vec::new();
    for (module, run) in groups {
        match run() {
            Ok(records) => out.extend(records),
            Err(e) => out.push(PropertyRecord::failed(module, "suite", "completes", e)),
        }
    }
    out
}

pub fn write_json_lines<W: Write>(records: &[PropertyRecord], mut out: W) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
