//! Strictly contact fields on T³ for `α = cos z dx − sin z dy`, via Fourier modes of `H(z)`.

use serde::{Deserialize, Serialize};

use crate::calculus::{integrate_form, torus_primitives, FourierSpectrum, PRIMITIVE_TOLERANCE};
use crate::error::{Error, Result};
use crate::helicity::{HelicityResult, Method};
use crate::manifolds::{ChartGrid, ManifoldId};
use crate::quadrature::{compensated_sum, map_indices};

/// `|c₁|` at or below this counts as zero flux.
pub const EXACT_TOLERANCE: f64 = 1e-12;
/// Agreement between `∫β∧dβ` and the reduced integrand, relative with a unit floor.
pub const REDUCED_AGREEMENT: f64 = 1e-8;
/// Largest tolerated `|c_{−n} − conj c_n|`.
pub const REALITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusFlux {
    pub a1: f64,
    pub b1: f64,
    pub exact: bool,
}

/// Cohomology class of `ι_X μ` in the basis `[dy∧dz]`, `[dx∧dz]`.
pub fn torus_flux(spec: &FourierSpectrum) -> TorusFlux {
    let c1 = spec.get(1);
    TorusFlux {
        a1: 2.0 * c1.re,
        b1: -2.0 * c1.im,
        exact: c1.norm() <= EXACT_TOLERANCE && spec.get(-1).norm() <= EXACT_TOLERANCE,
    }
}

/// Mode weight `3 + 4/(n² − 1)`; at `n = 0` it is `−1`, so the constant mode enters with `+c₀²`.
pub fn weight(n: i64) -> f64 {
    let n2 = (n * n) as f64;
    3.0 + 4.0 / (n2 - 1.0)
}

fn check_spectrum(spec: &FourierSpectrum) -> Result<()> {
    let defect = spec.reality_defect();
    if defect > REALITY_TOLERANCE {
        return Err(Error::InvalidInput(format!(
            "spectrum is not real: conjugate-symmetry defect {defect:.3e}"
        )));
    }
    let flux = torus_flux(spec);
    if !flux.exact {
        let c1 = spec.get(1);
        return Err(Error::NotExact { re: c1.re, im: c1.im });
    }
    Ok(())
}

/// `−Σ_{n ≠ ±1} weight(n) |c_n|²`, the helicity per unit `κ`.
pub fn fourier_bracket(spec: &FourierSpectrum) -> Result<f64> {
    check_spectrum(spec)?;
    let n = spec.max_index() as i64;
    Ok(-compensated_sum(
        (-n..=n)
            .filter(|k| k.abs() != 1)
            .map(|k| weight(k) * spec.get(k).norm_sqr()),
    ))
}

pub fn torus_helicity_fourier(spec: &FourierSpectrum, kappa: f64) -> Result<f64> {
    Ok(kappa * fourier_bracket(spec)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusDirect {
    pub result: HelicityResult,
    /// `∫ (2H(F cos z − G sin z) − 3H²) dx dy dz`.
    pub reduced_value: f64,
}

pub fn torus_helicity_direct(spec: &FourierSpectrum, grid: &ChartGrid) -> Result<TorusDirect> {
    check_spectrum(spec)?;
    if grid.manifold != ManifoldId::Torus3 {
        return Err(crate::fields::mismatch(ManifoldId::Torus3, grid.manifold));
    }
    let prim = torus_primitives(spec, grid)?;
    prim.report.require(PRIMITIVE_TOLERANCE)?;
    let beta = &prim.report.form;
    let value = integrate_form(&beta.wedge(&beta.exterior_derivative()?)?, grid)?;
    let f = prim.f_expr.compile(&["z"])?;
    let g = prim.g_expr.compile(&["z"])?;
    let h = prim.h_expr.compile(&["z"])?;
    let reduced = map_indices(grid.len(), |i| {
        let z = grid.nodes[i][2];
        let hz = h.eval(&[z]);
        (2.0 * hz * (f.eval(&[z]) * z.cos() - g.eval(&[z]) * z.sin()) - 3.0 * hz * hz)
            * grid.weights[i]
    });
    let reduced_value = compensated_sum(reduced);
    if (value - reduced_value).abs() > REDUCED_AGREEMENT * (1.0 + value.abs()) {
        return Err(Error::Inconsistent {
            what: "torus integrand and its reduction".into(),
            left: value,
            right: reduced_value,
            tolerance: REDUCED_AGREEMENT,
        });
    }
    Ok(TorusDirect {
        result: HelicityResult {
            value,
            method: Method::DirectQuadrature,
            residual: Some(prim.report.residual),
            grid: grid.describe(),
        },
        reduced_value,
    })
}

/// `κ` as the direct helicity of `H ≡ 1` divided by its bracket `c₀² = 1`.
pub fn calibrate_kappa(grid: &ChartGrid) -> Result<f64> {
    let one = FourierSpectrum::from_positive(&[num::complex::Complex64::new(1.0, 0.0)]);
    Ok(torus_helicity_direct(&one, grid)?.result.value / fourier_bracket(&one)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::make_uniform_grid;
    use num::complex::Complex64;

    fn spec(pos: &[(f64, f64)]) -> FourierSpectrum {
        FourierSpectrum::from_positive(&pos.iter().map(|&(a, b)| Complex64::new(a, b)).collect::<Vec<_>>())
    }

    #[test]
    fn weights() {
        assert_eq!(-weight(0), 1.0);
        assert!((weight(2) - 13.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn flux_examples() {
        let f = torus_flux(&spec(&[(0.0, 0.0), (0.5, 0.0)]));
        assert_eq!((f.a1, f.b1, f.exact), (1.0, 0.0, false));
        assert!(torus_flux(&spec(&[(0.0, 0.0), (0.0, 0.0), (0.5, 0.0)])).exact);
        let f = torus_flux(&spec(&[(3.0, 0.0)]));
        assert!(f.exact && f.a1 == 0.0 && f.b1 == 0.0);
    }

    #[test]
    fn kappa_is_full_volume() {
        let g = make_uniform_grid(ManifoldId::Torus3, 8).unwrap();
        let k = calibrate_kappa(&g).unwrap();
        assert!((k - std::f64::consts::TAU.powi(3)).abs() < 1e-9 * k);
    }

    #[test]
    fn cos_two_z_matches_formula() {
        let g = make_uniform_grid(ManifoldId::Torus3, 16).unwrap();
        let k = calibrate_kappa(&g).unwrap();
        let s = spec(&[(0.0, 0.0), (0.0, 0.0), (0.5, 0.0)]);
        let d = torus_helicity_direct(&s, &g).unwrap().result.value;
        let f = torus_helicity_fourier(&s, k).unwrap();
        assert!((f + k * 13.0 / 6.0).abs() < 1e-12 * k);
        assert!((d - f).abs() < 1e-8 * f.abs(), "{d} vs {f}");
        assert_eq!(
            torus_helicity_fourier(&spec(&[(0.0, 0.0), (0.2, 0.1)]), k).unwrap_err().name(),
            "NotExact"
        );
    }
}
