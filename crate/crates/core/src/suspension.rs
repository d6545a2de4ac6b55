//! Suspensions of compactly supported disk isotopies and their helicity.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::calculus::{integrate, integrate_form};
use crate::contact::{contact_form, contract_volume};
use crate::error::{Error, Result};
use crate::fields::{check_variables, mismatch, Expr, KForm, ScalarField, Tabulated, VectorField};
use crate::manifolds::{ChartGrid, ManifoldId};
use crate::quadrature::map_indices;

/// Support check threshold for `F` and its first derivatives.
pub const SUPPORT_TOLERANCE: f64 = 1e-9;
/// Agreement required between direct helicity and the Calabi identities.
pub const CALABI_AGREEMENT: f64 = 1e-6;

/// Hamiltonian `F(r, θ, t)` on the unit disk, vanishing for `r ≥ support_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsotopySpec {
    pub hamiltonian: Expr,
    pub support_radius: f64,
}

impl IsotopySpec {
    pub fn new(hamiltonian: Expr, support_radius: f64) -> Result<Self> {
        if !(support_radius > 0.0 && support_radius < 1.0) {
            return Err(Error::InvalidInput(format!(
                "support radius must lie in (0, 1), got {support_radius}"
            )));
        }
        check_variables(ManifoldId::SolidTorus, &hamiltonian, false)?;
        let spec = IsotopySpec {
            hamiltonian,
            support_radius,
        };
        spec.check_support()?;
        Ok(spec)
    }

    pub fn parse(text: &str, support_radius: f64) -> Result<Self> {
        Self::new(crate::parse(text)?, support_radius)
    }

    pub fn zero() -> Self {
        IsotopySpec {
            hamiltonian: Expr::zero(),
            support_radius: 0.5,
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        IsotopySpec {
            hamiltonian: Expr::num(a) * self.hamiltonian.clone(),
            support_radius: self.support_radius,
        }
    }

    fn field(&self) -> ScalarField {
        ScalarField {
            manifold: ManifoldId::SolidTorus,
            expr: self.hamiltonian.clone(),
        }
    }

    /// Largest `|F|`, `|∂F|` sampled on `support_radius ≤ r ≤ 1`.
    pub fn support_deviation(&self) -> Result<f64> {
        let f = self.field();
        let codes = [
            f.compile()?,
            f.derivative("r").compile()?,
            f.derivative("theta").compile()?,
            f.derivative("t").compile()?,
        ];
        let mut worst = 0.0f64;
        for i in 0..=8 {
            let r = self.support_radius + (1.0 - self.support_radius) * i as f64 / 8.0;
            for j in 0..12 {
                let theta = TAU * j as f64 / 12.0;
                for k in 0..5 {
                    let t = k as f64 / 5.0;
                    for c in &codes {
                        let v = c.eval(&[r, theta, t], t).abs();
                        worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
                    }
                }
            }
        }
        Ok(worst)
    }

    fn check_support(&self) -> Result<()> {
        let deviation = self.support_deviation()?;
        if deviation.is_nan() || deviation > SUPPORT_TOLERANCE {
            return Err(Error::NotCompactlySupported {
                radius: self.support_radius,
                deviation,
            });
        }
        Ok(())
    }
}

/// Autonomous twist `F(r) = ∫_r^1 s ρ(s) ds`, whose Hamiltonian field is `ρ(r) ∂θ`.
pub fn twist_isotopy(profile: &Expr, support_radius: f64) -> Result<IsotopySpec> {
    if let Some(v) = profile.variables().into_iter().find(|v| v != "r") {
        return Err(Error::InvalidInput(format!("twist profile must depend on r only, found `{v}`")));
    }
    let rho = profile.compile(&["r"])?;
    let g = Tabulated::antiderivative("twist", 0.0, 1.0, crate::calculus::TABLE_CELLS, 0.0, |s| {
        s * rho.eval(&[s])
    });
    let total = g.last_value();
    let hamiltonian = Expr::num(total) - Expr::table(Arc::new(g), Expr::var("r"));
    IsotopySpec::new(hamiltonian, support_radius)
}

fn require_solid_torus(grid: &ChartGrid) -> Result<()> {
    if grid.manifold != ManifoldId::SolidTorus {
        return Err(mismatch(ManifoldId::SolidTorus, grid.manifold));
    }
    Ok(())
}

/// `∫₀¹ ∫_D F ω dt`.
pub fn calabi(spec: &IsotopySpec, grid: &ChartGrid) -> Result<f64> {
    require_solid_torus(grid)?;
    integrate(&spec.field(), grid)
}

/// `X_F + ∂t` with `ι_{X_F} ω = dF`, i.e. `X^r = F_θ/r`, `X^θ = −F_r/r`.
pub fn suspension_field(spec: &IsotopySpec) -> VectorField {
    let f = &spec.hamiltonian;
    let r = Expr::var("r");
    VectorField {
        manifold: ManifoldId::SolidTorus,
        components: vec![
            f.differentiate("theta") / r.clone(),
            -(f.differentiate("r") / r),
            Expr::one(),
        ],
    }
}

/// `λ = (r²/2) dθ`, a primitive of `ω`.
pub fn disk_primitive() -> KForm {
    KForm {
        manifold: ManifoldId::SolidTorus,
        degree: 1,
        coeffs: vec![
            Expr::zero(),
            Expr::var("r").powi(2) / Expr::num(2.0),
            Expr::zero(),
        ],
    }
}

/// `β = F dt + λ`.
pub fn suspension_primitive(spec: &IsotopySpec) -> KForm {
    KForm {
        manifold: ManifoldId::SolidTorus,
        degree: 1,
        coeffs: vec![
            Expr::zero(),
            Expr::var("r").powi(2) / Expr::num(2.0),
            spec.hamiltonian.clone(),
        ],
    }
}

/// `max |dβ − ι_X (ω∧dt)|` over the grid.
pub fn suspension_residual(spec: &IsotopySpec, grid: &ChartGrid) -> Result<f64> {
    require_solid_torus(grid)?;
    let x = suspension_field(spec).tabulate(grid)?;
    let d_beta = suspension_primitive(spec).exterior_derivative()?.compile()?;
    let errs = map_indices(grid.len(), |i| {
        let p = &grid.nodes[i];
        let want = contract_volume(grid.density[i], &x.values[i]);
        let got = d_beta.eval(p, p[2]);
        (0..3).map(|k| (got[k] - want[k]).abs()).fold(0.0, f64::max)
    });
    Ok(errs.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuspensionResult {
    pub value: f64,
    pub calabi: f64,
    pub residual: f64,
    pub grid: String,
}

fn agree(what: &str, left: f64, right: f64, scale: f64) -> Result<()> {
    if (left - right).abs() > CALABI_AGREEMENT * (1.0 + scale.abs()) {
        return Err(Error::Inconsistent {
            what: what.into(),
            left,
            right,
            tolerance: CALABI_AGREEMENT,
        });
    }
    Ok(())
}

/// `∫ β∧dβ` for the suspension, checked against `2 Cal`.
pub fn suspension_helicity_direct(spec: &IsotopySpec, grid: &ChartGrid) -> Result<SuspensionResult> {
    require_solid_torus(grid)?;
    let beta = suspension_primitive(spec);
    let value = integrate_form(&beta.wedge(&beta.exterior_derivative()?)?, grid)?;
    let cal = calabi(spec, grid)?;
    agree("suspension helicity and twice the Calabi invariant", value, 2.0 * cal, cal)?;
    Ok(SuspensionResult {
        value,
        calabi: cal,
        residual: suspension_residual(spec, grid)?,
        grid: grid.describe(),
    })
}

/// `∫ β_X ∧ dλ`, checked against `Cal`.
pub fn relative_helicity_suspension(spec: &IsotopySpec, grid: &ChartGrid) -> Result<f64> {
    require_solid_torus(grid)?;
    let beta = suspension_primitive(spec);
    let value = integrate_form(&beta.wedge(&disk_primitive().exterior_derivative()?)?, grid)?;
    let cal = calabi(spec, grid)?;
    agree("relative helicity and the Calabi invariant", value, cal, cal)?;
    Ok(value)
}

/// `∫ β∧dβ` for the disk part `X_F` alone, with `β = F dt`; identically zero.
pub fn disk_part_helicity(spec: &IsotopySpec, grid: &ChartGrid) -> Result<f64> {
    require_solid_torus(grid)?;
    let beta = KForm {
        manifold: ManifoldId::SolidTorus,
        degree: 1,
        coeffs: vec![Expr::zero(), Expr::zero(), spec.hamiltonian.clone()],
    };
    integrate_form(&beta.wedge(&beta.exterior_derivative()?)?, grid)
}

/// The two solid tori glued along `{η = π/4}` in Hopf coordinates.
pub fn embed_tau(index: u8, p: [f64; 3]) -> Result<[f64; 3]> {
    let [r, theta, t] = p;
    let s = r.clamp(0.0, 1.0).asin();
    match index {
        1 => Ok([0.5 * s, (theta + TAU * t).rem_euclid(TAU), (TAU * t).rem_euclid(TAU)]),
        2 => Ok([0.5 * (PI - s), (TAU * t).rem_euclid(TAU), (theta + TAU * t).rem_euclid(TAU)]),
        other => Err(Error::InvalidInput(format!("embedding index must be 1 or 2, got {other}"))),
    }
}

/// Push the frame vector `x` at `p` forward along `τ^index`.
pub fn pushforward(index: u8, p: [f64; 3], x: [f64; 3]) -> Result<[f64; 3]> {
    let r = p[0];
    let radial = if x[0] == 0.0 {
        0.0
    } else {
        x[0] / (2.0 * (1.0 - r * r).sqrt())
    };
    match index {
        1 => Ok([radial, x[1] + TAU * x[2], TAU * x[2]]),
        2 => Ok([-radial, TAU * x[2], x[1] + TAU * x[2]]),
        other => Err(Error::InvalidInput(format!("embedding index must be 1 or 2, got {other}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Termwise {
    /// `H(X₁) + H(X₂)` for the disk parts, by polarization.
    pub h_sum: f64,
    /// `R(X₁, ∂t) + R(X₂, ∂t)`.
    pub r_reeb: f64,
    /// Helicity of the Reeb field in the glued volume of total mass `2π`.
    pub h_reeb: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoubleSuspension {
    pub formula_value: f64,
    pub termwise_value: f64,
    pub termwise: Termwise,
    pub calabi: [f64; 2],
}

/// `2π² (Cal₁ + Cal₂ + 2π²)` and its termwise reconstruction.
pub fn double_suspension_helicity(
    spec1: &IsotopySpec,
    spec2: &IsotopySpec,
    torus_grid: &ChartGrid,
    sphere_grid: &ChartGrid,
) -> Result<DoubleSuspension> {
    require_solid_torus(torus_grid)?;
    if sphere_grid.manifold != ManifoldId::Sphere3 {
        return Err(mismatch(ManifoldId::Sphere3, sphere_grid.manifold));
    }
    let mut h_sum = 0.0;
    let mut r_reeb = 0.0;
    let mut cals = [0.0; 2];
    let h_vertical = integrate_form(
        &disk_primitive().wedge(&disk_primitive().exterior_derivative()?)?,
        torus_grid,
    )?;
    for (k, spec) in [spec1, spec2].into_iter().enumerate() {
        let full = suspension_helicity_direct(spec, torus_grid)?;
        let rel = relative_helicity_suspension(spec, torus_grid)?;
        let polarized = full.value - 2.0 * rel - h_vertical;
        let direct = disk_part_helicity(spec, torus_grid)?;
        agree("disk-part helicity by polarization and directly", polarized, direct, full.value)?;
        h_sum += polarized;
        r_reeb += rel;
        cals[k] = full.calabi;
    }
    let alpha = contact_form(ManifoldId::Sphere3)?;
    let reeb_s3 = integrate_form(&alpha.wedge(&alpha.exterior_derivative()?)?, sphere_grid)?;
    let glued_volume = 2.0 * PI;
    let h_reeb = glued_volume * glued_volume * reeb_s3;
    let scale = PI * PI;
    let termwise_value = scale * (h_sum + 2.0 * r_reeb + h_reeb);
    let formula_value = 2.0 * PI * PI * (cals[0] + cals[1] + 2.0 * PI * PI);
    Ok(DoubleSuspension {
        formula_value,
        termwise_value,
        termwise: Termwise {
            h_sum,
            r_reeb,
            h_reeb,
        },
        calabi: cals,
    })
}
