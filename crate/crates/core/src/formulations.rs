//! The five 2×2 block systems for the transmission problem.
//!
//! Direct formulations solve for the exterior Cauchy data (u, ∂u/∂n) of the
//! total field on Γ. The regularized formulations solve for auxiliary
//! densities (a, b); the physical layer densities are recovered as
//! (α, β) = (R₁₁a + R₁₂b, R₂₁a + R₂₂b) and the scattered field is
//! u¹ = D₁[α] − S₁[β]. All systems are stored as one dense matrix so every
//! formulation shares the same matvec.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sample, GeometryKind, NodeSet};
use crate::operators::{assemble_layer_operators, assemble_sigma, LayerOperators, OperatorKind, Wavenumber};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formulation {
    #[serde(rename = "sk14")]
    Sk14,
    #[serde(rename = "sk15")]
    Sk15,
    #[serde(rename = "fk16")]
    Fk16,
    #[serde(rename = "skr-lp")]
    SkrLp,
    #[serde(rename = "skr-ps")]
    SkrPs,
}

impl Formulation {
    pub const ALL: [Formulation; 5] = [
        Formulation::Sk14,
        Formulation::Sk15,
        Formulation::Fk16,
        Formulation::SkrLp,
        Formulation::SkrPs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Sk14 => "sk14",
            Formulation::Sk15 => "sk15",
            Formulation::Fk16 => "fk16",
            Formulation::SkrLp => "skr-lp",
            Formulation::SkrPs => "skr-ps",
        }
    }

    pub fn is_regularized(self) -> bool {
        matches!(self, Formulation::SkrLp | Formulation::SkrPs)
    }
}

impl FromStr for Formulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Formulation::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarization {
    #[serde(rename = "E", alias = "e")]
    E,
    #[serde(rename = "H", alias = "h")]
    H,
}

impl FromStr for Polarization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "E" | "e" => Ok(Polarization::E),
            "H" | "h" => Ok(Polarization::H),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarization::E => "E",
            Polarization::H => "H",
        })
    }
}

/// How the complex wavenumber κ₁ of the regularizer is chosen. All rules
/// share the real part (k₁ + k₂)/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kappa1Rule {
    /// Imaginary part 4.
    Plus4i,
    /// Imaginary part ω/4.
    PlusQuarterOmega,
    /// Imaginary part ω.
    PlusOmega,
    /// A fixed value.
    Value { re: f64, im: f64 },
}

impl FromStr for Kappa1Rule {
    type Err = Error;
    /// Accepts `4i`, `omega/4`, `omega`, or an explicit `re,im` pair.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "4i" | "+4i" => Ok(Kappa1Rule::Plus4i),
            "omega/4" | "w/4" => Ok(Kappa1Rule::PlusQuarterOmega),
            "omega" | "w" => Ok(Kappa1Rule::PlusOmega),
            other => {
                let (re, im) = other
                    .split_once(',')
                    .ok_or_else(|| Error::Config(format!("cannot parse kappa1 `{other}`")))?;
                let parse = |v: &str| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Config(format!("cannot parse kappa1 `{other}`")))
                };
                Ok(Kappa1Rule::Value {
                    re: parse(re)?,
                    im: parse(im)?,
                })
            }
        }
    }
}

impl fmt::Display for Kappa1Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa1Rule::Plus4i => f.write_str("4i"),
            Kappa1Rule::PlusQuarterOmega => f.write_str("omega/4"),
            Kappa1Rule::PlusOmega => f.write_str("omega"),
            Kappa1Rule::Value { re, im } => write!(f, "{re},{im}"),
        }
    }
}

fn default_eps1() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-8
}
fn default_directions() -> usize {
    720
}
fn default_kappa1() -> Kappa1Rule {
    Kappa1Rule::Plus4i
}

/// Everything needed to set up and solve one scattering problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransmissionConfig {
    pub geometry: GeometryKind,
    pub formulation: Formulation,
    pub omega: f64,
    #[serde(default = "default_eps1")]
    pub eps1: f64,
    pub eps2: f64,
    pub polarization: Polarization,
    /// Incidence direction; the per-geometry default when absent.
    #[serde(default)]
    pub direction: Option<[f64; 2]>,
    #[serde(default = "default_kappa1")]
    pub kappa1: Kappa1Rule,
    /// Half node count: 2n nodes and 4n unknowns.
    pub n: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_directions")]
    pub directions: usize,
}

impl TransmissionConfig {
    pub fn new(
        geometry: GeometryKind,
        formulation: Formulation,
        omega: f64,
        eps2: f64,
        polarization: Polarization,
        n: usize,
    ) -> Self {
        Self {
            geometry,
            formulation,
            omega,
            eps1: 1.0,
            eps2,
            polarization,
            direction: None,
            kappa1: Kappa1Rule::Plus4i,
            n,
            tol: 1e-8,
            directions: 720,
        }
    }

    pub fn with_formulation(&self, formulation: Formulation) -> Self {
        Self {
            formulation,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{what} must be positive, got {v}")))
            }
        };
        positive(self.omega, "omega")?;
        positive(self.eps1, "eps1")?;
        positive(self.eps2, "eps2")?;
        positive(self.tol, "tol")?;
        if self.n < 8 {
            return Err(Error::Config(format!("n = {} is below the minimum of 8", self.n)));
        }
        if self.directions < 360 {
            return Err(Error::Config(format!(
                "at least 360 far-field directions are required, got {}",
                self.directions
            )));
        }
        let d = self.incidence();
        if ((d[0] * d[0] + d[1] * d[1]).sqrt() - 1.0).abs() > 1e-12 {
            return Err(Error::Config("incidence direction must be a unit vector".into()));
        }
        Ok(())
    }

    /// Transmission constant: 1 for E, ε₁/ε₂ for H.
    pub fn nu(&self) -> f64 {
        match self.polarization {
            Polarization::E => 1.0,
            Polarization::H => self.eps1 / self.eps2,
        }
    }

    pub fn k1(&self) -> f64 {
        self.omega * self.eps1.sqrt()
    }

    pub fn k2(&self) -> f64 {
        self.omega * self.eps2.sqrt()
    }

    pub fn unknowns(&self) -> usize {
        4 * self.n
    }

    pub fn incidence(&self) -> [f64; 2] {
        self.direction.unwrap_or_else(|| default_incidence(self.geometry))
    }

    pub fn kappa1(&self) -> Result<Wavenumber> {
        kappa1_default(self)
    }
}

/// Incidence used for each benchmark curve: straight down onto the circle,
/// 45° into the fourth quadrant onto the kite, along +x into the cavity.
pub fn default_incidence(geometry: GeometryKind) -> [f64; 2] {
    match geometry {
        GeometryKind::Circle => [0.0, -1.0],
        GeometryKind::Kite => [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2],
        GeometryKind::Cavity => [1.0, 0.0],
    }
}

/// κ₁ = (k₁ + k₂)/2 + i·(imaginary offset of the configured rule).
pub fn kappa1_default(config: &TransmissionConfig) -> Result<Wavenumber> {
    let re = (config.k1() + config.k2()) / 2.0;
    let k = match config.kappa1 {
        Kappa1Rule::Plus4i => Complex64::new(re, 4.0),
        Kappa1Rule::PlusQuarterOmega => Complex64::new(re, config.omega / 4.0),
        Kappa1Rule::PlusOmega => Complex64::new(re, config.omega),
        Kappa1Rule::Value { re, im } => Complex64::new(re, im),
    };
    Wavenumber::complexified(k)
}

/// Incident plane wave e^{ik₁ d·x} and its normal derivative at the nodes.
pub fn plane_wave_trace(nodes: &NodeSet, k1: f64, d: [f64; 2]) -> (Vec<Complex64>, Vec<Complex64>) {
    let ik = Complex64::new(0.0, k1);
    nodes
        .pos
        .iter()
        .zip(&nodes.normal)
        .map(|(x, n)| {
            let u = (ik * (d[0] * x[0] + d[1] * x[1])).exp();
            (u, ik * (d[0] * n[0] + d[1] * n[1]) * u)
        })
        .unzip()
}

/// What the two halves of the unknown vector mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unknowns {
    /// Exterior trace and normal derivative of the total field.
    Cauchy,
    /// Auxiliary densities (a, b) of the regularized ansatz.
    Regularized,
}

/// R = [[r11·I, R12], [R21, r22·I]] mapping (a, b) to (α, β).
#[derive(Debug, Clone)]
pub struct Regularizer {
    pub r11: f64,
    pub r12: Mat<Complex64>,
    pub r21: Mat<Complex64>,
    pub r22: f64,
}

impl Regularizer {
    pub fn apply(&self, a: &[Complex64], b: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let r12b = crate::operators::apply_dense(&self.r12, b)?;
        let r21a = crate::operators::apply_dense(&self.r21, a)?;
        let alpha = a.iter().zip(&r12b).map(|(x, y)| x * self.r11 + y).collect();
        let beta = b.iter().zip(&r21a).map(|(x, y)| x * self.r22 + y).collect();
        Ok((alpha, beta))
    }
}

/// An assembled dense system A x = rhs of size 4n.
#[derive(Debug, Clone)]
pub struct BlockSystem {
    pub config: TransmissionConfig,
    pub nodes: NodeSet,
    pub matrix: Mat<Complex64>,
    pub rhs: Vec<Complex64>,
    pub unknowns: Unknowns,
    pub regularizer: Option<Regularizer>,
    pub kappa1: Option<Wavenumber>,
    /// Operators at k₁; reused for trace recovery.
    pub exterior: LayerOperators,
    /// Operators at k₂.
    pub interior: LayerOperators,
}

impl BlockSystem {
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn half_dim(&self) -> usize {
        self.rhs.len() / 2
    }

    /// Block (row, col) ∈ {0, 1}² as an owned matrix.
    pub fn block(&self, row: usize, col: usize) -> Mat<Complex64> {
        let m = self.half_dim();
        self.matrix.as_ref().submatrix(row * m, col * m, m, m).to_owned()
    }
}

fn identity(len: usize, scale: f64) -> Mat<Complex64> {
    Mat::from_fn(len, len, |i, j| Complex64::from(if i == j { scale } else { 0.0 }))
}

fn scaled(m: &Mat<Complex64>, s: f64) -> Mat<Complex64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * s)
}

fn stack(a11: &Mat<Complex64>, a12: &Mat<Complex64>, a21: &Mat<Complex64>, a22: &Mat<Complex64>) -> Mat<Complex64> {
    let m = a11.nrows();
    Mat::from_fn(2 * m, 2 * m, |i, j| match (i < m, j < m) {
        (true, true) => a11[(i, j)],
        (true, false) => a12[(i, j - m)],
        (false, true) => a21[(i - m, j)],
        (false, false) => a22[(i - m, j - m)],
    })
}

/// Assemble the configured formulation on freshly sampled nodes.
pub fn assemble_formulation(config: &TransmissionConfig) -> Result<BlockSystem> {
    config.validate()?;
    let nodes = sample(&config.geometry.curve(), config.n)?;
    assemble_on_nodes(config, nodes)
}

/// Assemble the configured formulation on the given nodes.
pub fn assemble_on_nodes(config: &TransmissionConfig, nodes: NodeSet) -> Result<BlockSystem> {
    config.validate()?;
    let len = nodes.len();
    let nu = config.nu();
    let inv_nu = 1.0 / nu;
    let ext = assemble_layer_operators(&nodes, Wavenumber::real(config.k1())?)?;
    let int = assemble_layer_operators(&nodes, Wavenumber::real(config.k2())?)?;
    let (uinc, uinc_n) = plane_wave_trace(&nodes, config.k1(), config.incidence());

    let cat =
        |a: &[Complex64], b: &[Complex64], s: f64| -> Vec<Complex64> { a.iter().chain(b).map(|v| v * s).collect() };

    let (matrix, rhs, unknowns, regularizer, kappa1) = match config.formulation {
        Formulation::Sk14 => {
            let a11 = identity(len, 1.0) + &int.d - &ext.d;
            let a12 = &ext.s - scaled(&int.s, inv_nu);
            let a21 = &int.n - &ext.n;
            let a22 = identity(len, (1.0 + inv_nu) / 2.0) + &ext.dstar - scaled(&int.dstar, inv_nu);
            let rhs = cat(&uinc, &uinc_n, 1.0);
            (stack(&a11, &a12, &a21, &a22), rhs, Unknowns::Cauchy, None, None)
        }
        Formulation::Sk15 => {
            let a11 = identity(len, (1.0 + inv_nu) / 2.0) + &int.d - scaled(&ext.d, inv_nu);
            let a12 = scaled(&(&ext.s - &int.s), inv_nu);
            let a21 = &int.n - &ext.n;
            let a22 = identity(len, (1.0 + inv_nu) / 2.0) + &ext.dstar - scaled(&int.dstar, inv_nu);
            let mut rhs: Vec<Complex64> = uinc.iter().map(|v| v * inv_nu).collect();
            rhs.extend_from_slice(&uinc_n);
            (stack(&a11, &a12, &a21, &a22), rhs, Unknowns::Cauchy, None, None)
        }
        Formulation::Fk16 => {
            let a11 = scaled(&(&ext.d + &int.d), -1.0);
            let a12 = &ext.s + scaled(&int.s, inv_nu);
            let a21 = scaled(&(&ext.n + scaled(&int.n, nu)), -1.0);
            let a22 = &ext.dstar + &int.dstar;
            let rhs = cat(&uinc, &uinc_n, 1.0);
            (stack(&a11, &a12, &a21, &a22), rhs, Unknowns::Cauchy, None, None)
        }
        Formulation::SkrLp | Formulation::SkrPs => {
            let kappa = kappa1_default(config)?;
            let (s_k, n_k) = if config.formulation == Formulation::SkrLp {
                let ops = assemble_layer_operators(&nodes, kappa)?;
                (ops.s, ops.n)
            } else {
                (
                    assemble_sigma(&nodes, OperatorKind::SigmaS, kappa)?.entries,
                    assemble_sigma(&nodes, OperatorKind::SigmaN, kappa)?.entries,
                )
            };
            let reg = Regularizer {
                r11: nu / (1.0 + nu),
                r12: scaled(&s_k, -2.0 / (1.0 + nu)),
                r21: scaled(&n_k, 2.0 * nu / (1.0 + nu)),
                r22: 1.0 / (1.0 + nu),
            };
            let sum_d = &ext.d + &int.d;
            let sum_s = &ext.s + scaled(&int.s, inv_nu);
            let sum_n = &ext.n + scaled(&int.n, nu);
            let sum_ds = &ext.dstar + &int.dstar;
            let a11 = identity(len, 0.5) - &int.d + scaled(&sum_d, reg.r11) - &sum_s * &reg.r21;
            let a12 = scaled(&int.s, inv_nu) + &sum_d * &reg.r12 - scaled(&sum_s, reg.r22);
            let a21 = scaled(&int.n, -nu) + scaled(&sum_n, reg.r11) - &sum_ds * &reg.r21;
            let a22 = identity(len, 0.5) + &int.dstar + &sum_n * &reg.r12 - scaled(&sum_ds, reg.r22);
            let rhs = cat(&uinc, &uinc_n, -1.0);
            (
                stack(&a11, &a12, &a21, &a22),
                rhs,
                Unknowns::Regularized,
                Some(reg),
                Some(kappa),
            )
        }
    };

    Ok(BlockSystem {
        config: config.clone(),
        nodes,
        matrix,
        rhs,
        unknowns,
        regularizer,
        kappa1,
        exterior: ext,
        interior: int,
    })
}
