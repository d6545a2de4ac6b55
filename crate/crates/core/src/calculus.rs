//! Quadrature, Fourier coefficients and explicit primitive one-forms.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contact::{contact_form, contract_volume, ContactSolver};
use crate::error::{Error, Result};
use crate::fields::{mismatch, Expr, KForm, ScalarField, Tabulated};
use crate::manifolds::{make_grid, ChartGrid, ManifoldId};
use crate::quadrature::{compensated_sum, map_indices};

/// Default bound on primitive residuals.
pub const PRIMITIVE_TOLERANCE: f64 = 1e-6;
/// Cells used to tabulate one-variable primitives.
pub const TABLE_CELLS: usize = 4096;

/// `Σ weight · density · value` for values given at the grid nodes.
pub fn integrate_values(values: &[f64], grid: &ChartGrid) -> f64 {
    compensated_sum(
        values
            .iter()
            .zip(&grid.weights)
            .zip(&grid.density)
            .map(|((v, w), d)| v * w * d),
    )
}

/// Integral of a scalar against the canonical volume.
pub fn integrate(f: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    integrate_at(f, grid, 0.0)
}

/// Same as [`integrate`] with the time variable frozen at `t`.
pub fn integrate_at(f: &ScalarField, grid: &ChartGrid, t: f64) -> Result<f64> {
    Ok(integrate_values(&f.tabulate_at(grid, t)?, grid))
}

/// Integral of a top-degree form; the coordinate order is positively oriented.
pub fn integrate_form(form: &KForm, grid: &ChartGrid) -> Result<f64> {
    if form.manifold != grid.manifold {
        return Err(mismatch(form.manifold, grid.manifold));
    }
    if form.degree != form.manifold.dim() {
        return Err(Error::NotTopDegree {
            degree: form.degree,
        });
    }
    let code = form.compile()?;
    let vals = map_indices(grid.len(), |i| code.eval_coeff(0, &grid.nodes[i], 0.0));
    Ok(compensated_sum(
        vals.iter().zip(&grid.weights).map(|(v, w)| v * w),
    ))
}

pub fn average(f: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    Ok(integrate(f, grid)? / grid.total_volume())
}

pub fn l2_norm_sq(f: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    let v = f.tabulate(grid)?;
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    Ok(integrate_values(&sq, grid))
}

/// Largest absolute value at the grid nodes.
pub fn sup_norm(f: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    Ok(f.tabulate(grid)?.iter().fold(0.0, |m, v| m.max(v.abs())))
}

/// Coefficients `c_n`, `|n| ≤ N`, of `Σ c_n e^{inz}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct FourierSpectrum {
    max_index: usize,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    #[serde(rename = "N")]
    n: usize,
    coeffs: Vec<[f64; 2]>,
}

impl TryFrom<SpectrumJson> for FourierSpectrum {
    type Error = Error;

    fn try_from(j: SpectrumJson) -> Result<Self> {
        FourierSpectrum::new(
            j.n,
            j.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
        )
    }
}

impl From<FourierSpectrum> for SpectrumJson {
    fn from(s: FourierSpectrum) -> Self {
        SpectrumJson {
            n: s.max_index,
            coeffs: s.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl FourierSpectrum {
    /// `coeffs` ordered `n = −N..=N`.
    pub fn new(max_index: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * max_index + 1 {
            return Err(Error::InvalidInput(format!(
                "spectrum with N = {max_index} needs {} coefficients, got {}",
                2 * max_index + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite Fourier coefficient".into()));
        }
        Ok(FourierSpectrum { max_index, coeffs })
    }

    pub fn zeros(max_index: usize) -> Self {
        FourierSpectrum {
            max_index,
            coeffs: vec![Complex64::new(0.0, 0.0); 2 * max_index + 1],
        }
    }

    /// Real function from `c_n` for `n ≥ 0`; negative modes are conjugates.
    pub fn from_positive(coeffs: &[Complex64]) -> Self {
        let n = coeffs.len().saturating_sub(1);
        let mut s = FourierSpectrum::zeros(n);
        for (k, c) in coeffs.iter().enumerate() {
            s.set(k as i64, *c);
            if k > 0 {
                s.set(-(k as i64), c.conj());
            }
        }
        s
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, n: i64) -> Complex64 {
        if n.unsigned_abs() as usize > self.max_index {
            return Complex64::new(0.0, 0.0);
        }
        self.coeffs[(n + self.max_index as i64) as usize]
    }

    pub fn set(&mut self, n: i64, c: Complex64) {
        self.coeffs[(n + self.max_index as i64) as usize] = c;
    }

    /// Largest `|c_{−n} − conj(c_n)|`.
    pub fn reality_defect(&self) -> f64 {
        let n = self.max_index as i64;
        (0..=n)
            .map(|k| (self.get(-k) - self.get(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// `Σ |c_n|²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn eval(&self, z: f64) -> Complex64 {
        let n = self.max_index as i64;
        (-n..=n)
            .map(|k| self.get(k) * Complex64::from_polar(1.0, k as f64 * z))
            .sum()
    }

    /// The real part of the series as an expression in `var`.
    pub fn to_real_expr(&self, var: &str) -> Expr {
        let z = Expr::var(var);
        let mut e = Expr::num(self.get(0).re);
        for k in 1..=self.max_index as i64 {
            let sum = self.get(k) + self.get(-k);
            let diff = self.get(k) - self.get(-k);
            // c_k e^{ikz} + c_{-k} e^{-ikz} has real part Re(sum) cos kz − Im(diff) sin kz
            let arg = Expr::num(k as f64) * z.clone();
            if sum.re != 0.0 {
                e = e + Expr::num(sum.re) * arg.clone().cos();
            }
            if diff.im != 0.0 {
                e = e - Expr::num(diff.im) * arg.sin();
            }
        }
        e
    }
}

/// Coefficients from `m` uniform samples of one period, `f(2πj/m)`.
pub fn fourier_coeffs_samples(samples: &[f64], max_index: usize) -> FourierSpectrum {
    let m = samples.len() as f64;
    let n = max_index as i64;
    let coeffs = (-n..=n)
        .map(|k| {
            let re = compensated_sum(
                samples
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (-(k as f64) * TAU * j as f64 / m).cos()),
            );
            let im = compensated_sum(
                samples
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (-(k as f64) * TAU * j as f64 / m).sin()),
            );
            Complex64::new(re / m, im / m)
        })
        .collect();
    FourierSpectrum {
        max_index,
        coeffs,
    }
}

/// Number of samples used for a spectrum up to `N`.
pub fn default_samples(max_index: usize) -> usize {
    (4 * max_index + 4).max(64)
}

pub fn fourier_coeffs_fn(f: impl Fn(f64) -> f64, max_index: usize) -> FourierSpectrum {
    let m = default_samples(max_index);
    let samples: Vec<f64> = (0..m).map(|j| f(TAU * j as f64 / m as f64)).collect();
    fourier_coeffs_samples(&samples, max_index)
}

/// Spectrum of an expression in the single variable `var`.
pub fn fourier_coeffs(e: &Expr, var: &str, max_index: usize) -> Result<FourierSpectrum> {
    if let Some(other) = e.variables().into_iter().find(|v| v != var) {
        return Err(Error::InvalidInput(format!(
            "expected a function of {var} only, found `{other}`"
        )));
    }
    let code = e.compile(&[var])?;
    Ok(fourier_coeffs_fn(|z| code.eval(&[z]), max_index))
}

/// A primitive together with the measured defect of its exterior derivative.
#[derive(Debug, Clone)]
pub struct PrimitiveReport {
    pub form: KForm,
    pub residual: f64,
}

impl PrimitiveReport {
    pub fn require(&self, tolerance: f64) -> Result<()> {
        if self.residual.is_nan() || self.residual > tolerance {
            return Err(Error::ResidualTooLarge {
                residual: self.residual,
                tolerance,
            });
        }
        Ok(())
    }
}

/// `γ = a(φ) dψ` with `dγ = (F − c_F) ω`.
#[derive(Debug, Clone)]
pub struct ZonalPrimitive {
    pub report: PrimitiveReport,
    pub mean: f64,
    /// `a(π)`; zero up to quadrature error because `F − c_F` has mean zero.
    pub closing: f64,
    pub coefficient: Arc<Tabulated>,
}

/// Largest `|F(φ, ψ) − F(φ, ψ₀)|` over the grid rows.
fn zonal_deviation(values: &[f64], grid: &ChartGrid) -> f64 {
    let per_row = grid.resolution[1];
    values
        .chunks(per_row)
        .map(|row| row.iter().fold(0.0f64, |m, v| m.max((v - row[0]).abs())))
        .fold(0.0, f64::max)
}

pub const ZONAL_TOLERANCE: f64 = 1e-10;

pub fn zonal_primitive(f: &ScalarField, grid: &ChartGrid) -> Result<ZonalPrimitive> {
    if f.manifold != ManifoldId::Sphere2 {
        return Err(mismatch(ManifoldId::Sphere2, f.manifold));
    }
    if grid.manifold != ManifoldId::Sphere2 {
        return Err(mismatch(ManifoldId::Sphere2, grid.manifold));
    }
    let values = f.tabulate(grid)?;
    let deviation = zonal_deviation(&values, grid);
    if deviation.is_nan() || deviation > ZONAL_TOLERANCE {
        return Err(Error::NotZonal { deviation });
    }
    let mean = integrate_values(&values, grid) / grid.total_volume();
    let code = f.compile()?;
    let table = Arc::new(Tabulated::antiderivative(
        "a",
        0.0,
        PI,
        TABLE_CELLS,
        0.0,
        |phi| (code.eval(&[phi, 0.0, 0.0], 0.0) - mean) * phi.sin() / (4.0 * PI),
    ));
    let closing = table.last_value();
    let form = KForm::one_form(
        ManifoldId::Sphere2,
        vec![Expr::zero(), Expr::table(table.clone(), Expr::var("phi"))],
    )?;
    let target = KForm::top(
        ManifoldId::Sphere2,
        (f.expr.clone() - Expr::num(mean)) * ManifoldId::Sphere2.density_expr(),
    );
    let defect = form.exterior_derivative()?.sub(&target)?.compile()?;
    let residual = map_indices(grid.len(), |i| defect.eval_coeff(0, &grid.nodes[i], 0.0).abs())
        .into_iter()
        .fold(0.0, f64::max);
    Ok(ZonalPrimitive {
        report: PrimitiveReport { form, residual },
        mean,
        closing,
        coefficient: table,
    })
}

/// Largest deviation of `h` from its value at `(η, 0, 0)` over the grid.
fn eta_only_deviation(h: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    let code = h.compile()?;
    let devs = map_indices(grid.len(), |i| {
        let p = grid.nodes[i];
        (code.eval(&p, 0.0) - code.eval(&[p[0], 0.0, 0.0], 0.0)).abs()
    });
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Residual `max |dβ − ι_X μ|` with `X` the strictly contact field of `h`.
pub fn contact_primitive_residual(beta: &KForm, h: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    let solver = ContactSolver::new(h)?;
    let d_beta = beta.exterior_derivative()?.compile()?;
    let m = h.manifold;
    let errs = map_indices(grid.len(), |i| -> Result<f64> {
        let p = &grid.nodes[i];
        let x = solver.solve(p, i)?;
        let want = contract_volume(m.density(p), &x);
        let got = d_beta.eval(p, 0.0);
        Ok((0..3).map(|k| (got[k] - want[k]).abs()).fold(0.0, f64::max))
    });
    let mut worst = 0.0f64;
    for e in errs {
        worst = worst.max(e?);
    }
    Ok(worst)
}

/// Explicit primitive `β = 2 p*γ + (2 c_H − H) α` on S³ for `H` depending on `η` only.
#[derive(Debug, Clone)]
pub struct SpherePrimitive {
    pub report: PrimitiveReport,
    pub mean: f64,
    pub zonal: ZonalPrimitive,
}

pub fn beta_primitive_s3(h: &ScalarField, grid: &ChartGrid) -> Result<SpherePrimitive> {
    if h.manifold != ManifoldId::Sphere3 {
        return Err(mismatch(ManifoldId::Sphere3, h.manifold));
    }
    if grid.manifold != ManifoldId::Sphere3 {
        return Err(mismatch(ManifoldId::Sphere3, grid.manifold));
    }
    let deviation = eta_only_deviation(h, grid)?;
    if deviation.is_nan() || deviation > ZONAL_TOLERANCE {
        return Err(Error::NotZonal { deviation });
    }
    let phi = Expr::var("phi");
    let base = h.expr.substitute_all(&[
        ("eta", phi / Expr::num(2.0)),
        ("xi1", Expr::zero()),
        ("xi2", Expr::zero()),
    ]);
    let f = ScalarField::new(ManifoldId::Sphere2, base)?;
    let s2 = make_grid(ManifoldId::Sphere2, &[(2 * grid.resolution[0]).max(64), 4])?;
    let zonal = zonal_primitive(&f, &s2)?;
    let c = zonal.mean;
    let a = zonal.report.form.coeffs[1].substitute("phi", &(Expr::num(2.0) * Expr::var("eta")));
    let alpha = contact_form(ManifoldId::Sphere3)?;
    let pull = KForm::one_form(
        ManifoldId::Sphere3,
        vec![Expr::zero(), Expr::num(2.0) * a.clone(), Expr::num(-2.0) * a],
    )?;
    let form = pull.add(&alpha.scale(Expr::num(2.0 * c) - h.expr.clone()))?;
    let residual = contact_primitive_residual(&form, h, grid)?;
    Ok(SpherePrimitive {
        report: PrimitiveReport { form, residual },
        mean: c,
        zonal,
    })
}

/// `F`, `G` and `β = F dx + G dy − H α` on T³.
#[derive(Debug, Clone)]
pub struct TorusPrimitive {
    pub f: FourierSpectrum,
    pub g: FourierSpectrum,
    pub f_expr: Expr,
    pub g_expr: Expr,
    pub h_expr: Expr,
    pub report: PrimitiveReport,
}

/// Coefficients of `F` and `G`; requires `c_{±1} = 0`.
pub fn torus_series(spec: &FourierSpectrum) -> Result<(FourierSpectrum, FourierSpectrum)> {
    let c1 = spec.get(1);
    let cm1 = spec.get(-1);
    if c1.norm() > crate::torus::EXACT_TOLERANCE || cm1.norm() > crate::torus::EXACT_TOLERANCE {
        return Err(Error::NotExact { re: c1.re, im: c1.im });
    }
    let n = spec.max_index() + 1;
    let mut f = FourierSpectrum::zeros(n);
    let mut g = FourierSpectrum::zeros(n);
    let i = Complex64::new(0.0, 1.0);
    for m in -(n as i64)..=(n as i64) {
        if m == 0 {
            continue;
        }
        let lo = spec.get(m - 1);
        let hi = spec.get(m + 1);
        let mf = m as f64;
        f.set(m, (lo - hi) / mf);
        g.set(m, i * (lo + hi) / mf);
    }
    Ok((f, g))
}

pub fn torus_primitives(spec: &FourierSpectrum, grid: &ChartGrid) -> Result<TorusPrimitive> {
    if grid.manifold != ManifoldId::Torus3 {
        return Err(mismatch(ManifoldId::Torus3, grid.manifold));
    }
    let (f, g) = torus_series(spec)?;
    let f_expr = f.to_real_expr("z");
    let g_expr = g.to_real_expr("z");
    let h_expr = spec.to_real_expr("z");
    let alpha = contact_form(ManifoldId::Torus3)?;
    let form = KForm::one_form(
        ManifoldId::Torus3,
        vec![f_expr.clone(), g_expr.clone(), Expr::zero()],
    )?
    .sub(&alpha.scale(h_expr.clone()))?;
    let h = ScalarField::new(ManifoldId::Torus3, h_expr.clone())?;
    let residual = contact_primitive_residual(&form, &h, grid)?;
    Ok(TorusPrimitive {
        f,
        g,
        f_expr,
        g_expr,
        h_expr,
        report: PrimitiveReport { form, residual },
    })
}
