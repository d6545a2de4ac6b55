use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Expr;
use crate::quadrature::{gauss_legendre_on, trapezoid_periodic};

/// The model manifolds, each covered by one coordinate box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ManifoldId {
    #[serde(rename = "s3")]
    Sphere3,
    #[serde(rename = "s2")]
    Sphere2,
    #[serde(rename = "t3")]
    Torus3,
    #[serde(rename = "t2")]
    Torus2,
    #[serde(rename = "solid-torus")]
    SolidTorus,
    #[serde(rename = "d2")]
    Disk2,
}

/// One coordinate axis: range and whether it is periodic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

const fn axis(name: &'static str, lo: f64, hi: f64, periodic: bool) -> Axis {
    Axis { name, lo, hi, periodic }
}

impl ManifoldId {
    pub const ALL: [ManifoldId; 6] = [
        ManifoldId::Sphere3,
        ManifoldId::Sphere2,
        ManifoldId::Torus3,
        ManifoldId::Torus2,
        ManifoldId::SolidTorus,
        ManifoldId::Disk2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ManifoldId::Sphere3 => "s3",
            ManifoldId::Sphere2 => "s2",
            ManifoldId::Torus3 => "t3",
            ManifoldId::Torus2 => "t2",
            ManifoldId::SolidTorus => "solid-torus",
            ManifoldId::Disk2 => "d2",
        }
    }

    pub fn axes(self) -> &'static [Axis] {
        const S3: [Axis; 3] = [
            axis("eta", 0.0, FRAC_PI_2, false),
            axis("xi1", 0.0, TAU, true),
            axis("xi2", 0.0, TAU, true),
        ];
        const S2: [Axis; 2] = [axis("phi", 0.0, PI, false), axis("psi", 0.0, TAU, true)];
        const T3: [Axis; 3] = [
            axis("x", 0.0, TAU, true),
            axis("y", 0.0, TAU, true),
            axis("z", 0.0, TAU, true),
        ];
        const T2: [Axis; 2] = [axis("x", 0.0, TAU, true), axis("y", 0.0, TAU, true)];
        const ST: [Axis; 3] = [
            axis("r", 0.0, 1.0, false),
            axis("theta", 0.0, TAU, true),
            axis("t", 0.0, 1.0, true),
        ];
        const D2: [Axis; 2] = [axis("r", 0.0, 1.0, false), axis("theta", 0.0, TAU, true)];
        match self {
            ManifoldId::Sphere3 => &S3,
            ManifoldId::Sphere2 => &S2,
            ManifoldId::Torus3 => &T3,
            ManifoldId::Torus2 => &T2,
            ManifoldId::SolidTorus => &ST,
            ManifoldId::Disk2 => &D2,
        }
    }

    pub fn dim(self) -> usize {
        self.axes().len()
    }

    pub fn variables(self) -> Vec<&'static str> {
        self.axes().iter().map(|a| a.name).collect()
    }

    /// Canonical volume density with respect to the coordinate measure.
    pub fn density(self, p: &[f64]) -> f64 {
        match self {
            ManifoldId::Sphere3 => (2.0 * p[0]).sin() / (4.0 * PI * PI),
            ManifoldId::Sphere2 => p[0].sin() / (4.0 * PI),
            ManifoldId::Torus3 | ManifoldId::Torus2 => 1.0,
            ManifoldId::SolidTorus | ManifoldId::Disk2 => p[0],
        }
    }

    /// The same density as an expression.
    pub fn density_expr(self) -> Expr {
        let v = |n: &str| Expr::var(n);
        match self {
            ManifoldId::Sphere3 => {
                (Expr::num(2.0) * v("eta")).sin() / (Expr::num(4.0) * Expr::Pi * Expr::Pi)
            }
            ManifoldId::Sphere2 => v("phi").sin() / (Expr::num(4.0) * Expr::Pi),
            ManifoldId::Torus3 | ManifoldId::Torus2 => Expr::one(),
            ManifoldId::SolidTorus | ManifoldId::Disk2 => v("r"),
        }
    }

    pub fn exact_volume(self) -> f64 {
        match self {
            ManifoldId::Sphere3 | ManifoldId::Sphere2 => 1.0,
            ManifoldId::Torus3 => TAU.powi(3),
            ManifoldId::Torus2 => TAU.powi(2),
            ManifoldId::SolidTorus | ManifoldId::Disk2 => PI,
        }
    }
}

impl fmt::Display for ManifoldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ManifoldId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ManifoldId::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown manifold `{s}`")))
    }
}

/// Tensor-product quadrature grid on one chart.
#[derive(Debug, Clone)]
pub struct ChartGrid {
    pub manifold: ManifoldId,
    pub resolution: Vec<usize>,
    /// Coordinates; entries beyond the chart dimension are zero.
    pub nodes: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub density: Vec<f64>,
}

impl ChartGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ weight · density`.
    pub fn total_volume(&self) -> f64 {
        total_volume(self)
    }

    /// Resolution rendered as `AxBxC`.
    pub fn describe(&self) -> String {
        self.resolution
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join("x")
    }
}

/// Build the tensor grid; bounded axes get Gauss nodes, periodic axes the trapezoid rule.
pub fn make_grid(manifold: ManifoldId, resolution: &[usize]) -> Result<ChartGrid> {
    let axes = manifold.axes();
    if resolution.len() != axes.len() {
        return Err(Error::InvalidInput(format!(
            "{} needs {} resolutions, got {}",
            manifold,
            axes.len(),
            resolution.len()
        )));
    }
    for (i, &n) in resolution.iter().enumerate() {
        if n < 4 {
            return Err(Error::InvalidResolution { axis: i, got: n });
        }
    }
    let rules: Vec<(Vec<f64>, Vec<f64>)> = axes
        .iter()
        .zip(resolution)
        .map(|(a, &n)| {
            if a.periodic {
                trapezoid_periodic(n, a.lo, a.hi)
            } else {
                gauss_legendre_on(n, a.lo, a.hi)
            }
        })
        .collect();
    let total: usize = resolution.iter().product();
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    for _ in 0..total {
        let mut p = [0.0; 3];
        let mut w = 1.0;
        for (d, &i) in idx.iter().enumerate() {
            p[d] = rules[d].0[i];
            w *= rules[d].1[i];
        }
        nodes.push(p);
        weights.push(w);
        for d in (0..axes.len()).rev() {
            idx[d] += 1;
            if idx[d] < resolution[d] {
                break;
            }
            idx[d] = 0;
        }
    }
    let density = nodes.iter().map(|p| manifold.density(p)).collect();
    Ok(ChartGrid {
        manifold,
        resolution: resolution.to_vec(),
        nodes,
        weights,
        density,
    })
}

/// Same resolution on every axis.
pub fn make_uniform_grid(manifold: ManifoldId, n: usize) -> Result<ChartGrid> {
    make_grid(manifold, &vec![n; manifold.dim()])
}

pub fn total_volume(grid: &ChartGrid) -> f64 {
    crate::quadrature::compensated_sum(grid.weights.iter().zip(&grid.density).map(|(w, d)| w * d))
}

/// Hopf map in coordinates: `(eta, xi1, xi2) ↦ (2 eta, xi1 - xi2 mod 2π)`.
pub fn hopf_projection(p: [f64; 3]) -> [f64; 2] {
    [2.0 * p[0], (p[1] - p[2]).rem_euclid(TAU)]
}
