//! Smooth 2π-periodic boundary curves and their Nyström node sets.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

type CurveFn = Arc<dyn Fn(f64) -> Point + Send + Sync>;

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

/// A closed curve x(t), t ∈ [0, 2π), with analytic derivatives through
/// third order.
#[derive(Clone)]
pub struct ParamCurve {
    name: String,
    position: CurveFn,
    d1: CurveFn,
    d2: CurveFn,
    d3: CurveFn,
}

impl fmt::Debug for ParamCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParamCurve").field("name", &self.name).finish()
    }
}

impl ParamCurve {
    pub fn new(
        name: impl Into<String>,
        position: impl Fn(f64) -> Point + Send + Sync + 'static,
        d1: impl Fn(f64) -> Point + Send + Sync + 'static,
        d2: impl Fn(f64) -> Point + Send + Sync + 'static,
        d3: impl Fn(f64) -> Point + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            position: Arc::new(position),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
            d3: Arc::new(d3),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn position(&self, t: f64) -> Point {
        (self.position)(t)
    }

    pub fn d1(&self, t: f64) -> Point {
        (self.d1)(t)
    }

    pub fn d2(&self, t: f64) -> Point {
        (self.d2)(t)
    }

    pub fn d3(&self, t: f64) -> Point {
        (self.d3)(t)
    }

    pub fn speed(&self, t: f64) -> f64 {
        norm(self.d1(t))
    }
}

/// Circle of the given radius centred at the origin.
pub fn make_circle_with_radius(radius: f64) -> ParamCurve {
    ParamCurve::new(
        "circle",
        move |t| [radius * t.cos(), radius * t.sin()],
        move |t| [-radius * t.sin(), radius * t.cos()],
        move |t| [-radius * t.cos(), -radius * t.sin()],
        move |t| [radius * t.sin(), -radius * t.cos()],
    )
}

/// The unit circle.
pub fn make_circle() -> ParamCurve {
    make_circle_with_radius(1.0)
}

/// Kite: (cos t + 0.65 cos 2t − 0.65, 1.5 sin t).
pub fn make_kite() -> ParamCurve {
    ParamCurve::new(
        "kite",
        |t| [t.cos() + 0.65 * (2.0 * t).cos() - 0.65, 1.5 * t.sin()],
        |t| [-t.sin() - 1.3 * (2.0 * t).sin(), 1.5 * t.cos()],
        |t| [-t.cos() - 2.6 * (2.0 * t).cos(), -1.5 * t.sin()],
        |t| [t.sin() + 5.2 * (2.0 * t).sin(), -1.5 * t.cos()],
    )
}

/// Cavity-like scatterer:
/// x₁ = (cos t + 2 cos 2t)/2.5, x₂ = Y/2 − Yₛ/48 with
/// Y = sin t + sin 2t + ½ sin 3t and Yₛ = −4 sin t + 7 sin 2t − 6 sin 3t + 2 sin 4t.
pub fn make_cavity() -> ParamCurve {
    // x₂ = Σ c_m sin(m t)
    const C: [f64; 4] = [0.5 + 4.0 / 48.0, 0.5 - 7.0 / 48.0, 0.25 + 6.0 / 48.0, -2.0 / 48.0];
    fn y(t: f64, deriv: u32) -> f64 {
        C.iter()
            .enumerate()
            .map(|(i, c)| {
                let m = (i + 1) as f64;
                let a = m * t;
                c * m.powi(deriv as i32)
                    * match deriv % 4 {
                        0 => a.sin(),
                        1 => a.cos(),
                        2 => -a.sin(),
                        _ => -a.cos(),
                    }
            })
            .sum()
    }
    ParamCurve::new(
        "cavity",
        |t| [(t.cos() + 2.0 * (2.0 * t).cos()) / 2.5, y(t, 0)],
        |t| [(-t.sin() - 4.0 * (2.0 * t).sin()) / 2.5, y(t, 1)],
        |t| [(-t.cos() - 8.0 * (2.0 * t).cos()) / 2.5, y(t, 2)],
        |t| [(t.sin() + 16.0 * (2.0 * t).sin()) / 2.5, y(t, 3)],
    )
}

/// Built-in geometries selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryKind {
    Circle,
    Kite,
    Cavity,
}

impl GeometryKind {
    pub fn curve(self) -> ParamCurve {
        match self {
            GeometryKind::Circle => make_circle(),
            GeometryKind::Kite => make_kite(),
            GeometryKind::Cavity => make_cavity(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeometryKind::Circle => "circle",
            GeometryKind::Kite => "kite",
            GeometryKind::Cavity => "cavity",
        }
    }
}

impl FromStr for GeometryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" => Ok(GeometryKind::Circle),
            "kite" => Ok(GeometryKind::Kite),
            "cavity" => Ok(GeometryKind::Cavity),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Curve samples on the equispaced grid t_j = πj/n, j = 0..2n.
///
/// Normals point out of the bounded region regardless of the curve's
/// orientation.
#[derive(Debug, Clone)]
pub struct NodeSet {
    n: usize,
    pub t: Vec<f64>,
    pub pos: Vec<Point>,
    pub d1: Vec<Point>,
    pub d2: Vec<Point>,
    pub d3: Vec<Point>,
    pub speed: Vec<f64>,
    pub normal: Vec<Point>,
    /// +1 for counter-clockwise parametrizations, −1 otherwise.
    pub orientation: f64,
    name: String,
}

/// Sample `curve` at 2n equispaced parameter values.
pub fn sample(curve: &ParamCurve, n: usize) -> Result<NodeSet> {
    if n < 8 {
        return Err(Error::Nodes(format!("half node count {n} is below 8")));
    }
    let total = 2 * n;
    let t: Vec<f64> = (0..total).map(|j| PI * j as f64 / n as f64).collect();
    let pos: Vec<Point> = t.iter().map(|&s| curve.position(s)).collect();
    let d1: Vec<Point> = t.iter().map(|&s| curve.d1(s)).collect();
    let d2: Vec<Point> = t.iter().map(|&s| curve.d2(s)).collect();
    let d3: Vec<Point> = t.iter().map(|&s| curve.d3(s)).collect();
    let speed: Vec<f64> = d1.iter().map(|&v| norm(v)).collect();
    if let Some(j) = speed.iter().position(|&s| !s.is_finite() || s <= 0.0) {
        return Err(Error::Nodes(format!("degenerate parametrization at node {j}")));
    }
    // Signed area via the trapezoid rule, exact for trigonometric curves.
    let area: f64 = pos.iter().zip(&d1).map(|(p, v)| p[0] * v[1] - p[1] * v[0]).sum::<f64>() * PI / (2.0 * n as f64);
    let orientation = if area >= 0.0 { 1.0 } else { -1.0 };
    let normal = d1
        .iter()
        .zip(&speed)
        .map(|(v, s)| [orientation * v[1] / s, -orientation * v[0] / s])
        .collect();
    Ok(NodeSet {
        n,
        t,
        pos,
        d1,
        d2,
        d3,
        speed,
        normal,
        orientation,
        name: curve.name().to_string(),
    })
}

impl NodeSet {
    /// Build from a total node count, which must be even.
    pub fn from_total(curve: &ParamCurve, total: usize) -> Result<Self> {
        if !total.is_multiple_of(2) {
            return Err(Error::Nodes(format!("total node count {total} is odd")));
        }
        sample(curve, total / 2)
    }

    /// Half node count n.
    pub fn half(&self) -> usize {
        self.n
    }

    /// Total node count 2n.
    pub fn len(&self) -> usize {
        2 * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Trapezoid weight in the parameter variable, π/n.
    pub fn param_weight(&self) -> f64 {
        PI / self.n as f64
    }

    /// Arclength quadrature weights (π/n)|x'(t_j)|.
    pub fn arclength_weights(&self) -> Vec<f64> {
        let h = self.param_weight();
        self.speed.iter().map(|s| s * h).collect()
    }

    /// x''·n/|x'|², the signed curvature with respect to the outward normal
    /// (negative on convex arcs).
    pub fn curvature(&self, j: usize) -> f64 {
        dot(self.d2[j], self.normal[j]) / (self.speed[j] * self.speed[j])
    }

    /// Largest distance between two nodes.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for (i, p) in self.pos.iter().enumerate() {
            for q in &self.pos[i + 1..] {
                best = best.max(norm(sub(*p, *q)));
            }
        }
        best
    }

    /// Largest arclength spacing between consecutive nodes (first order).
    pub fn max_spacing(&self) -> f64 {
        self.speed.iter().cloned().fold(0.0, f64::max) * self.param_weight()
    }

    /// Winding number of the sampled polygon about `z`; ≈1 inside, ≈0 outside.
    pub fn winding_number(&self, z: Point) -> f64 {
        let m = self.len();
        let mut total = 0.0;
        for j in 0..m {
            let a = sub(self.pos[j], z);
            let b = sub(self.pos[(j + 1) % m], z);
            total += (a[0] * b[1] - a[1] * b[0]).atan2(dot(a, b));
        }
        self.orientation * total / (2.0 * PI)
    }

    /// Smallest distance from `z` to a node.
    pub fn distance_to(&self, z: Point) -> f64 {
        self.pos.iter().map(|p| norm(sub(*p, z))).fold(f64::INFINITY, f64::min)
    }
}
