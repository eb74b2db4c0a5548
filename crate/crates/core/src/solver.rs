//! Assemble, solve, and recover boundary data in one call.

use std::time::Instant;

use num_complex::Complex64;

use crate::error::Result;
use crate::formulations::{assemble_formulation, plane_wave_trace, BlockSystem, TransmissionConfig, Unknowns};
use crate::gmres::{gmres_solve, KrylovReport};
use crate::operators::apply_dense;

/// A converged solve together with the boundary data every post-processing
/// step needs.
#[derive(Debug, Clone)]
pub struct Solution {
    pub system: BlockSystem,
    pub report: KrylovReport,
    /// Densities of the exterior representation u¹ = D₁[α] − S₁[β].
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    /// Exterior trace and normal derivative of the total field.
    pub trace: Vec<Complex64>,
    pub normal_derivative: Vec<Complex64>,
    pub assembly_seconds: f64,
    pub solve_seconds: f64,
}

impl Solution {
    pub fn config(&self) -> &TransmissionConfig {
        &self.system.config
    }

    pub fn iterations(&self) -> usize {
        self.report.iterations
    }
}

pub fn solve(config: &TransmissionConfig) -> Result<Solution> {
    let start = Instant::now();
    let system = assemble_formulation(config)?;
    let assembly_seconds = start.elapsed().as_secs_f64();
    solve_system(system, assembly_seconds)
}

pub fn solve_system(system: BlockSystem, assembly_seconds: f64) -> Result<Solution> {
    let start = Instant::now();
    let report = gmres_solve(&system.matrix, &system.rhs, system.config.tol)?;
    let solve_seconds = start.elapsed().as_secs_f64();
    let m = system.half_dim();
    let (first, second) = report.solution.split_at(m);

    let (alpha, beta, trace, normal_derivative) = match system.unknowns {
        Unknowns::Cauchy => (first.to_vec(), second.to_vec(), first.to_vec(), second.to_vec()),
        Unknowns::Regularized => {
            let reg = system.regularizer.as_ref().expect("regularized system carries R");
            let (alpha, beta) = reg.apply(first, second)?;
            let (u, un) = recover_cauchy(&system, &alpha, &beta)?;
            (alpha, beta, u, un)
        }
    };

    Ok(Solution {
        system,
        report,
        alpha,
        beta,
        trace,
        normal_derivative,
        assembly_seconds,
        solve_seconds,
    })
}

/// Exterior total-field traces from the layer densities:
/// u = α/2 + D₁α − S₁β + u^inc, ∂u/∂n = N₁α + β/2 − D₁*β + ∂u^inc/∂n.
pub fn recover_cauchy(
    system: &BlockSystem,
    alpha: &[Complex64],
    beta: &[Complex64],
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let ext = &system.exterior;
    let config = &system.config;
    let (uinc, uinc_n) = plane_wave_trace(&system.nodes, config.k1(), config.incidence());
    let d_a = apply_dense(&ext.d, alpha)?;
    let s_b = apply_dense(&ext.s, beta)?;
    let n_a = apply_dense(&ext.n, alpha)?;
    let ds_b = apply_dense(&ext.dstar, beta)?;
    let u = (0..alpha.len())
        .map(|i| alpha[i] * 0.5 + d_a[i] - s_b[i] + uinc[i])
        .collect();
    let un = (0..alpha.len())
        .map(|i| n_a[i] + beta[i] * 0.5 - ds_b[i] + uinc_n[i])
        .collect();
    Ok((u, un))
}
