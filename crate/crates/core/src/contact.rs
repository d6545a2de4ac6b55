//! Contact forms on S³ and T³, their Reeb flows, and the pointwise solve for
//! strictly contact vector fields.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::fields::{mismatch, CompiledScalar, Expr, KForm, ScalarField, VectorField};
use crate::manifolds::{ChartGrid, ManifoldId};
use crate::quadrature::map_indices;

/// Tolerance for Reeb-orbit invariance of a Hamiltonian.
pub const BASIC_TOLERANCE: f64 = 1e-9;
/// Phases sampled along each Reeb orbit.
pub const BASIC_PHASES: usize = 32;

fn unsupported(m: ManifoldId) -> Error {
    Error::Unsupported(format!("no contact structure on {m}"))
}

/// `α = (sin²η dξ₁ + cos²η dξ₂)/2π` on S³, `α = cos z dx − sin z dy` on T³.
pub fn contact_form(m: ManifoldId) -> Result<KForm> {
    let v = Expr::var;
    match m {
        ManifoldId::Sphere3 => {
            let two_pi = Expr::num(2.0) * Expr::Pi;
            KForm::one_form(
                m,
                vec![
                    Expr::zero(),
                    v("eta").sin().powi(2) / two_pi.clone(),
                    v("eta").cos().powi(2) / two_pi,
                ],
            )
        }
        ManifoldId::Torus3 => KForm::one_form(m, vec![v("z").cos(), -v("z").sin(), Expr::zero()]),
        other => Err(unsupported(other)),
    }
}

/// `α ∧ dα`.
pub fn contact_volume(m: ManifoldId) -> Result<KForm> {
    let a = contact_form(m)?;
    a.wedge(&a.exterior_derivative()?)
}

pub fn reeb_field(m: ManifoldId) -> Result<VectorField> {
    let v = Expr::var;
    match m {
        ManifoldId::Sphere3 => {
            let c = Expr::num(2.0) * Expr::Pi;
            VectorField::new(m, vec![Expr::zero(), c.clone(), c])
        }
        ManifoldId::Torus3 => VectorField::new(m, vec![v("z").cos(), -v("z").sin(), Expr::zero()]),
        other => Err(unsupported(other)),
    }
}

/// Time-`s` Reeb flow; on S³ the flow has period 1.
pub fn reeb_flow(m: ManifoldId, p: [f64; 3], s: f64) -> [f64; 3] {
    match m {
        ManifoldId::Sphere3 => [
            p[0],
            (p[1] + TAU * s).rem_euclid(TAU),
            (p[2] + TAU * s).rem_euclid(TAU),
        ],
        ManifoldId::Torus3 => [
            (p[0] + s * p[2].cos()).rem_euclid(TAU),
            (p[1] - s * p[2].sin()).rem_euclid(TAU),
            p[2],
        ],
        _ => p,
    }
}

fn orbit_span(m: ManifoldId) -> f64 {
    match m {
        ManifoldId::Torus3 => TAU,
        _ => 1.0,
    }
}

/// Largest variation of `h` along sampled Reeb orbits through a subset of nodes.
pub fn basic_deviation(h: &ScalarField, grid: &ChartGrid) -> Result<f64> {
    if h.manifold != grid.manifold {
        return Err(mismatch(h.manifold, grid.manifold));
    }
    contact_form(h.manifold)?;
    let code = h.compile()?;
    let stride = (grid.len() / 512).max(1);
    let picks: Vec<usize> = (0..grid.len()).step_by(stride).collect();
    let span = orbit_span(h.manifold);
    let devs = map_indices(picks.len(), |k| {
        let p = grid.nodes[picks[k]];
        let base = code.eval(&p, 0.0);
        (1..BASIC_PHASES)
            .map(|j| {
                let q = reeb_flow(h.manifold, p, span * j as f64 / BASIC_PHASES as f64);
                (code.eval(&q, 0.0) - base).abs()
            })
            .fold(0.0, f64::max)
    });
    Ok(devs.into_iter().fold(0.0, f64::max))
}

/// Fails with `NotBasic` unless `h` is Reeb invariant.
pub fn require_basic(h: &ScalarField, grid: &ChartGrid) -> Result<()> {
    let deviation = basic_deviation(h, grid)?;
    if deviation.is_nan() || deviation > BASIC_TOLERANCE {
        return Err(Error::NotBasic { deviation });
    }
    Ok(())
}

/// Pointwise data for the frame solve: `α`, `dα` and `H`, `dH`, compiled once.
pub struct ContactSolver {
    manifold: ManifoldId,
    h: CompiledScalar,
    dh: [CompiledScalar; 3],
}

impl ContactSolver {
    pub fn new(h: &ScalarField) -> Result<Self> {
        contact_form(h.manifold)?;
        let vars = h.manifold.variables();
        let d = |i: usize| h.derivative(vars[i]).compile();
        Ok(ContactSolver {
            manifold: h.manifold,
            h: h.compile()?,
            dh: [d(0)?, d(1)?, d(2)?],
        })
    }

    fn alpha(&self, p: &[f64; 3]) -> ([f64; 3], [f64; 3]) {
        match self.manifold {
            ManifoldId::Sphere3 => {
                let (s, c) = p[0].sin_cos();
                let s2 = (2.0 * p[0]).sin() / TAU;
                ([0.0, s * s / TAU, c * c / TAU], [s2, -s2, 0.0])
            }
            _ => {
                let (s, c) = p[2].sin_cos();
                // dα = sin z dx∧dz + cos z dy∧dz
                ([c, -s, 0.0], [0.0, s, c])
            }
        }
    }

    /// Solve `α(X) = H`, `ι_X dα = −dH` by normal equations at one point.
    pub fn solve(&self, p: &[f64; 3], node: usize) -> Result<[f64; 3]> {
        let (a, [a01, a02, a12]) = self.alpha(p);
        let h = self.h.eval(p, 0.0);
        let dh: Vec<f64> = self.dh.iter().map(|c| c.eval(p, 0.0)).collect();
        let rows = [
            ([a[0], a[1], a[2]], h),
            ([0.0, -a01, -a02], -dh[0]),
            ([a01, 0.0, -a12], -dh[1]),
            ([a02, a12, 0.0], -dh[2]),
        ];
        let mut m = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for (row, b) in rows.iter() {
            for i in 0..3 {
                rhs[i] += row[i] * b;
                for j in 0..3 {
                    m[i][j] += row[i] * row[j];
                }
            }
        }
        solve3(m, rhs).ok_or(Error::ChartDegeneracy { node })
    }

    pub fn tabulate(&self, grid: &ChartGrid) -> Result<Vec<[f64; 3]>> {
        map_indices(grid.len(), |i| self.solve(&grid.nodes[i], i))
            .into_iter()
            .collect()
    }

    /// Largest violation of `α(X) = H`, `ι_X dα = −dH` for given nodal values.
    pub fn equation_residual(&self, p: &[f64; 3], x: &[f64; 3]) -> f64 {
        let (a, [a01, a02, a12]) = self.alpha(p);
        let h = self.h.eval(p, 0.0);
        let dh: Vec<f64> = self.dh.iter().map(|c| c.eval(p, 0.0)).collect();
        let r = [
            a[0] * x[0] + a[1] * x[1] + a[2] * x[2] - h,
            -a01 * x[1] - a02 * x[2] + dh[0],
            a01 * x[0] - a12 * x[2] + dh[1],
            a02 * x[0] + a12 * x[1] + dh[2],
        ];
        r.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return None;
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-13 * scale {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let s: f64 = (i + 1..3).map(|k| m[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / m[i][i];
    }
    Some(x)
}

/// `ι_X μ` coefficients on `[dx0∧dx1, dx0∧dx2, dx1∧dx2]` for volume density `rho`.
pub fn contract_volume(rho: f64, x: &[f64; 3]) -> [f64; 3] {
    [rho * x[2], -rho * x[1], rho * x[0]]
}

/// Volume density of `α∧dα`; equals the chart density on S³ and T³.
pub fn contact_density(m: ManifoldId, p: &[f64; 3]) -> f64 {
    match m {
        ManifoldId::Sphere3 => (2.0 * p[0]).sin() / (4.0 * PI * PI),
        _ => 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifolds::make_uniform_grid;

    #[test]
    fn contact_volume_matches_chart_density() {
        for m in [ManifoldId::Sphere3, ManifoldId::Torus3] {
            let mu = contact_volume(m).unwrap();
            for p in [[0.3, 1.0, 2.0], [1.2, 4.0, 0.5]] {
                let got = mu.compile().unwrap().eval(&p, 0.0)[0];
                assert!((got - m.density(&p)).abs() < 1e-15, "{m}");
            }
        }
    }

    #[test]
    fn reeb_field_contracts_volume_to_d_alpha() {
        let m = ManifoldId::Sphere3;
        let got = contact_volume(m).unwrap().contract(&reeb_field(m).unwrap()).unwrap();
        let want = contact_form(m).unwrap().exterior_derivative().unwrap();
        let (g, w) = (got.compile().unwrap(), want.compile().unwrap());
        for p in [[0.2, 0.1, 0.4], [1.1, 3.0, 5.0]] {
            let (a, b) = (g.eval(&p, 0.0), w.eval(&p, 0.0));
            for k in 0..3 {
                assert!((a[k] - b[k]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn frame_solve_examples() {
        let cases = [
            ("1", [0.0, TAU, TAU]),
            ("cos(2*eta)", [0.0, -TAU, TAU]),
            ("cos(eta)^2", [0.0, 0.0, TAU]),
        ];
        for (text, want) in cases {
            let h = ScalarField::parse(ManifoldId::Sphere3, text).unwrap();
            let s = ContactSolver::new(&h).unwrap();
            for p in [[0.3, 0.2, 1.0], [1.0, 5.0, 2.0]] {
                let x = s.solve(&p, 0).unwrap();
                for k in 0..3 {
                    assert!((x[k] - want[k]).abs() < 1e-12, "{text}: {x:?}");
                }
            }
        }
    }

    #[test]
    fn basic_detection() {
        let g = make_uniform_grid(ManifoldId::Sphere3, 8).unwrap();
        let ok = ScalarField::parse(ManifoldId::Sphere3, "cos(2*eta)*sin(xi1-xi2)").unwrap();
        assert!(require_basic(&ok, &g).is_ok());
        let bad = ScalarField::parse(ManifoldId::Sphere3, "cos(xi1)").unwrap();
        assert_eq!(require_basic(&bad, &g).unwrap_err().name(), "NotBasic");
        let t = make_uniform_grid(ManifoldId::Torus3, 8).unwrap();
        let bad = ScalarField::parse(ManifoldId::Torus3, "sin(x)").unwrap();
        assert_eq!(require_basic(&bad, &t).unwrap_err().name(), "NotBasic");
        let ok = ScalarField::parse(ManifoldId::Torus3, "cos(3*z)").unwrap();
        assert!(require_basic(&ok, &t).is_ok());
    }
}
