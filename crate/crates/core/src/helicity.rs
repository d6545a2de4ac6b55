//! Helicity and relative helicity of strictly contact fields.

use serde::{Deserialize, Serialize};

use crate::calculus::{
    average, beta_primitive_s3, integrate_form, integrate_values, PrimitiveReport,
    PRIMITIVE_TOLERANCE,
};
use crate::contact::{contact_form, require_basic, ContactSolver};
use crate::error::{Error, Result};
use crate::fields::{mismatch, Expr, NodalVectorField, ScalarField};
use crate::manifolds::{ChartGrid, ManifoldId};
use crate::quadrature::{compensated_sum, gauss_legendre_on, map_indices, trapezoid_periodic};

/// Agreement required between `∫β∧dβ` and `∫β(X)μ`, relative with a unit floor.
pub const DIRECT_AGREEMENT: f64 = 1e-6;
/// Threshold for the equality cases of the L² bounds.
pub const TIGHTNESS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ContactFormula,
    DirectQuadrature,
    TimeDependentFormula,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HelicityResult {
    pub value: f64,
    pub method: Method,
    pub residual: Option<f64>,
    pub grid: String,
}

fn require_s3(h: &ScalarField, grid: &ChartGrid) -> Result<()> {
    if h.manifold != grid.manifold {
        return Err(mismatch(h.manifold, grid.manifold));
    }
    match h.manifold {
        ManifoldId::Sphere3 => Ok(()),
        ManifoldId::Torus3 => Err(Error::Unsupported(
            "the contact formula needs a regular contact form; use the torus module on t3".into(),
        )),
        other => Err(mismatch(ManifoldId::Sphere3, other)),
    }
}

/// Frame components of the strictly contact field of `h` at the grid nodes.
pub fn contact_vector_field(h: &ScalarField, grid: &ChartGrid) -> Result<NodalVectorField> {
    if h.manifold != grid.manifold {
        return Err(mismatch(h.manifold, grid.manifold));
    }
    require_basic(h, grid)?;
    let values = ContactSolver::new(h)?.tabulate(grid)?;
    Ok(NodalVectorField {
        manifold: h.manifold,
        values,
    })
}

/// `(4 c_H c_K − 3 c_{HK}) · vol`.
pub fn contact_formula(c_h: f64, c_k: f64, c_hk: f64, volume: f64) -> f64 {
    (4.0 * c_h * c_k - 3.0 * c_hk) * volume
}

struct Means {
    c_h: f64,
    c_k: f64,
    c_hk: f64,
    volume: f64,
}

fn means(h: &[f64], k: &[f64], grid: &ChartGrid) -> Means {
    let volume = grid.total_volume();
    let hk: Vec<f64> = h.iter().zip(k).map(|(a, b)| a * b).collect();
    Means {
        c_h: integrate_values(h, grid) / volume,
        c_k: integrate_values(k, grid) / volume,
        c_hk: integrate_values(&hk, grid) / volume,
        volume,
    }
}

pub fn helicity_contact(h: &ScalarField, grid: &ChartGrid) -> Result<HelicityResult> {
    require_s3(h, grid)?;
    require_basic(h, grid)?;
    let v = h.tabulate(grid)?;
    let m = means(&v, &v, grid);
    Ok(HelicityResult {
        value: contact_formula(m.c_h, m.c_k, m.c_hk, m.volume),
        method: Method::ContactFormula,
        residual: None,
        grid: grid.describe(),
    })
}

pub fn relative_helicity_contact(h: &ScalarField, k: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    require_s3(h, grid)?;
    require_s3(k, grid)?;
    require_basic(h, grid)?;
    require_basic(k, grid)?;
    let m = means(&h.tabulate(grid)?, &k.tabulate(grid)?, grid);
    Ok(contact_formula(m.c_h, m.c_k, m.c_hk, m.volume))
}

/// `∫ β ∧ dβ`, cross-checked against `∫ β(X) μ`.
pub fn helicity_direct(
    x: &NodalVectorField,
    beta: &PrimitiveReport,
    grid: &ChartGrid,
    tolerance: f64,
) -> Result<HelicityResult> {
    beta.require(tolerance)?;
    if x.manifold != grid.manifold || beta.form.manifold != grid.manifold {
        return Err(mismatch(grid.manifold, beta.form.manifold));
    }
    let form = &beta.form;
    let value = integrate_form(&form.wedge(&form.exterior_derivative()?)?, grid)?;
    let code = form.compile()?;
    let pairing = map_indices(grid.len(), |i| {
        let b = code.eval(&grid.nodes[i], 0.0);
        let v = x.values[i];
        b[0] * v[0] + b[1] * v[1] + b[2] * v[2]
    });
    let other = integrate_values(&pairing, grid);
    if (value - other).abs() > DIRECT_AGREEMENT * (1.0 + value.abs()) {
        return Err(Error::Inconsistent {
            what: "helicity integrands".into(),
            left: value,
            right: other,
            tolerance: DIRECT_AGREEMENT,
        });
    }
    Ok(HelicityResult {
        value,
        method: Method::DirectQuadrature,
        residual: Some(beta.residual),
        grid: grid.describe(),
    })
}

/// Direct quadrature on S³ using the explicit zonal primitive.
pub fn helicity_direct_s3(h: &ScalarField, grid: &ChartGrid) -> Result<HelicityResult> {
    require_s3(h, grid)?;
    let x = contact_vector_field(h, grid)?;
    let beta = beta_primitive_s3(h, grid)?;
    helicity_direct(&x, &beta.report, grid, PRIMITIVE_TOLERANCE)
}

/// Freeze the time variable.
pub fn time_slice(h: &ScalarField, t: f64) -> ScalarField {
    ScalarField {
        manifold: h.manifold,
        expr: h.expr.substitute("t", &Expr::num(t)),
    }
}

/// Trapezoid in time of the per-slice contact formula.
pub fn helicity_timedep(h: &ScalarField, grid: &ChartGrid, times: &[f64]) -> Result<HelicityResult> {
    if times.len() < 2 {
        return Err(Error::InvalidInput("need at least two time nodes".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("time nodes must increase".into()));
    }
    let slices = times
        .iter()
        .map(|&t| helicity_contact(&time_slice(h, t), grid).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let value = compensated_sum(
        times
            .windows(2)
            .zip(slices.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1])),
    );
    Ok(HelicityResult {
        value,
        method: Method::TimeDependentFormula,
        residual: None,
        grid: grid.describe(),
    })
}

/// `n + 1` uniform nodes on `[0, 1]`.
pub fn uniform_times(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub value: f64,
    pub upper: f64,
    pub tight_lower: bool,
    pub tight_upper: bool,
}

/// `−3‖H‖² ≤ H(X_H) ≤ ‖H‖²`, equality below iff `c_H = 0`, above iff `H` is constant.
pub fn bounds_check(h: &ScalarField, grid: &ChartGrid) -> Result<Bounds> {
    let value = helicity_contact(h, grid)?.value;
    let v = h.tabulate(grid)?;
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let norm = integrate_values(&sq, grid);
    let mean = integrate_values(&v, grid) / grid.total_volume();
    let spread = v.iter().fold(0.0f64, |m, x| m.max((x - mean).abs()));
    Ok(Bounds {
        lower: -3.0 * norm,
        value,
        upper: norm,
        tight_lower: mean.abs() <= TIGHTNESS_TOLERANCE,
        tight_upper: spread <= TIGHTNESS_TOLERANCE,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftResult {
    pub value: f64,
    pub constant: bool,
}

/// `(c(F)² − c(F²)) · area` for the horizontal lift of `F` on the Hopf base.
pub fn horizontal_lift_helicity(f: &ScalarField, grid: &ChartGrid) -> Result<LiftResult> {
    if f.manifold != ManifoldId::Sphere2 || grid.manifold != ManifoldId::Sphere2 {
        return Err(mismatch(ManifoldId::Sphere2, f.manifold));
    }
    let v = f.tabulate(grid)?;
    let area = grid.total_volume();
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    let c = integrate_values(&v, grid) / area;
    let c2 = integrate_values(&sq, grid) / area;
    let spread = v.iter().fold(0.0f64, |m, x| m.max((x - c).abs()));
    Ok(LiftResult {
        value: (c * c - c2) * area,
        constant: spread <= TIGHTNESS_TOLERANCE,
    })
}

/// Tolerance for the disc integral against the volume average.
pub const DISC_AGREEMENT: f64 = 1e-8;

/// `∫_D H dα` over the disc `{ξ₁ = 0}`, oriented so that `H ≡ 1` gives `+1`.
pub fn filling_disc_average(h: &ScalarField, n_eta: usize, n_xi: usize, grid: &ChartGrid) -> Result<f64> {
    require_s3(h, grid)?;
    require_basic(h, grid)?;
    if n_eta < 4 || n_xi < 4 {
        return Err(Error::InvalidResolution {
            axis: if n_eta < 4 { 0 } else { 1 },
            got: n_eta.min(n_xi),
        });
    }
    let d_alpha = contact_form(ManifoldId::Sphere3)?.exterior_derivative()?;
    // restriction to ξ₁ = 0 keeps the dη∧dξ₂ coefficient
    let coeff = d_alpha
        .coefficient(&[0, 2])
        .unwrap()
        .substitute("xi1", &Expr::zero());
    let density = coeff.compile(&["eta", "xi2"])?;
    let code = h.compile()?;
    let (etas, we) = gauss_legendre_on(n_eta, 0.0, std::f64::consts::FRAC_PI_2);
    let (xis, wx) = trapezoid_periodic(n_xi, 0.0, std::f64::consts::TAU);
    let mut raw = Vec::with_capacity(n_eta * n_xi);
    let mut anchor = Vec::with_capacity(n_eta * n_xi);
    for (eta, a) in etas.iter().zip(&we) {
        for (xi, b) in xis.iter().zip(&wx) {
            let w = a * b * density.eval(&[*eta, *xi]);
            anchor.push(w);
            raw.push(w * code.eval(&[*eta, 0.0, *xi], 0.0));
        }
    }
    let orientation = compensated_sum(anchor).signum();
    let value = orientation * compensated_sum(raw);
    let mean = average(h, grid)?;
    if (value - mean).abs() > DISC_AGREEMENT {
        return Err(Error::Inconsistent {
            what: "disc integral and volume average".into(),
            left: value,
            right: mean,
            tolerance: DISC_AGREEMENT,
        });
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignedPoint {
    pub phi: f64,
    pub psi: f64,
    pub sign: i8,
}

/// `−Σ sign · F(a)` over a null-homologous set of signed points on S².
pub fn fiber_linking(f: &ScalarField, points: &[SignedPoint]) -> Result<f64> {
    if f.manifold != ManifoldId::Sphere2 {
        return Err(mismatch(ManifoldId::Sphere2, f.manifold));
    }
    if let Some(p) = points.iter().find(|p| p.sign != 1 && p.sign != -1) {
        return Err(Error::InvalidInput(format!("sign must be ±1, got {}", p.sign)));
    }
    let sum: i64 = points.iter().map(|p| p.sign as i64).sum();
    if sum != 0 {
        return Err(Error::NotNullHomologous { sum });
    }
    let code = f.compile()?;
    Ok(-compensated_sum(
        points
            .iter()
            .map(|p| p.sign as f64 * code.eval(&[p.phi, p.psi, 0.0], 0.0)),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitResult {
    pub values: Vec<f64>,
    /// `sup |H_i − H_{i−1}|` for `i ≥ 1`.
    pub sup_gaps: Vec<f64>,
}

pub fn helicity_limit(sequence: &[ScalarField], grid: &ChartGrid) -> Result<LimitResult> {
    let mut values = Vec::with_capacity(sequence.len());
    let mut sup_gaps = Vec::new();
    let mut prev: Option<Vec<f64>> = None;
    for h in sequence {
        values.push(helicity_contact(h, grid)?.value);
        let cur = h.tabulate(grid)?;
        if let Some(p) = &prev {
            sup_gaps.push(p.iter().zip(&cur).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())));
        }
        prev = Some(cur);
    }
    Ok(LimitResult { values, sup_gaps })
}
