//! Expressions, scalar and vector fields, and differential forms in chart coordinates.

mod expr;
mod forms;
mod parser;
mod tabulated;

use serde::{Deserialize, Serialize};

pub use expr::{bump_value, BinOp, BumpTerm, Compiled, Expr, Func, TableCall};
pub use forms::{multi_indices, CompiledForm, KForm};
pub use parser::{parse, VARIABLES};
pub use tabulated::Tabulated;

use crate::error::{Error, Result};
use crate::manifolds::{ChartGrid, ManifoldId};
use crate::quadrature::map_indices;

pub(crate) fn check_variables(manifold: ManifoldId, expr: &Expr, allow_time: bool) -> Result<()> {
    let chart = manifold.variables();
    for v in expr.variables() {
        let ok = chart.contains(&v.as_str()) || (allow_time && v == "t");
        if !ok {
            return Err(Error::ForeignVariable {
                name: v,
                manifold: manifold.to_string(),
            });
        }
    }
    Ok(())
}

/// A function on a chart, optionally depending on the time variable `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub manifold: ManifoldId,
    pub expr: Expr,
}

impl ScalarField {
    pub fn new(manifold: ManifoldId, expr: Expr) -> Result<Self> {
        check_variables(manifold, &expr, false)?;
        Ok(ScalarField { manifold, expr })
    }

    /// Like [`ScalarField::new`] but also admits `t`.
    pub fn time_dependent(manifold: ManifoldId, expr: Expr) -> Result<Self> {
        check_variables(manifold, &expr, true)?;
        Ok(ScalarField { manifold, expr })
    }

    pub fn parse(manifold: ManifoldId, text: &str) -> Result<Self> {
        Self::new(manifold, parse(text)?)
    }

    pub fn constant(manifold: ManifoldId, value: f64) -> Self {
        ScalarField {
            manifold,
            expr: Expr::num(value),
        }
    }

    pub fn compile(&self) -> Result<CompiledScalar> {
        let mut slots = self.manifold.variables();
        slots.push("t");
        Ok(CompiledScalar {
            dim: self.manifold.dim(),
            code: self.expr.compile(&slots)?,
        })
    }

    pub fn derivative(&self, var: &str) -> ScalarField {
        ScalarField {
            manifold: self.manifold,
            expr: self.expr.differentiate(var),
        }
    }

    /// Values at every grid node (time 0).
    pub fn tabulate(&self, grid: &ChartGrid) -> Result<Vec<f64>> {
        self.tabulate_at(grid, 0.0)
    }

    pub fn tabulate_at(&self, grid: &ChartGrid, t: f64) -> Result<Vec<f64>> {
        if grid.manifold != self.manifold {
            return Err(mismatch(self.manifold, grid.manifold));
        }
        let code = self.compile()?;
        Ok(map_indices(grid.len(), |i| code.eval(&grid.nodes[i], t)))
    }

    pub fn square(&self) -> ScalarField {
        ScalarField {
            manifold: self.manifold,
            expr: self.expr.clone() * self.expr.clone(),
        }
    }
}

pub(crate) fn mismatch(expected: ManifoldId, found: ManifoldId) -> Error {
    Error::ManifoldMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

/// Compiled scalar expression reading chart coordinates then `t`.
#[derive(Debug, Clone)]
pub struct CompiledScalar {
    dim: usize,
    code: Compiled,
}

impl CompiledScalar {
    pub fn eval(&self, p: &[f64; 3], t: f64) -> f64 {
        let mut slots = [0.0; 4];
        slots[..self.dim].copy_from_slice(&p[..self.dim]);
        slots[self.dim] = t;
        self.code.eval(&slots)
    }
}

/// Components along the coordinate frame `∂/∂x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub manifold: ManifoldId,
    pub components: Vec<Expr>,
}

impl VectorField {
    pub fn new(manifold: ManifoldId, components: Vec<Expr>) -> Result<Self> {
        if components.len() != manifold.dim() {
            return Err(Error::InvalidInput(format!(
                "{} needs {} components, got {}",
                manifold,
                manifold.dim(),
                components.len()
            )));
        }
        for c in &components {
            check_variables(manifold, c, true)?;
        }
        Ok(VectorField {
            manifold,
            components,
        })
    }

    pub fn parse(manifold: ManifoldId, texts: &[&str]) -> Result<Self> {
        let comps = texts.iter().map(|s| parse(s)).collect::<Result<Vec<_>>>()?;
        Self::new(manifold, comps)
    }

    /// Directional derivative `X·f`.
    pub fn apply(&self, f: &Expr) -> Expr {
        let vars = self.manifold.variables();
        self.components
            .iter()
            .zip(vars)
            .fold(Expr::zero(), |acc, (c, v)| acc + c.clone() * f.differentiate(v))
    }

    pub fn scale(&self, s: Expr) -> VectorField {
        VectorField {
            manifold: self.manifold,
            components: self.components.iter().map(|c| s.clone() * c.clone()).collect(),
        }
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        if self.manifold != other.manifold {
            return Err(mismatch(self.manifold, other.manifold));
        }
        Ok(VectorField {
            manifold: self.manifold,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    /// Component values at every grid node.
    pub fn tabulate(&self, grid: &ChartGrid) -> Result<NodalVectorField> {
        if grid.manifold != self.manifold {
            return Err(mismatch(self.manifold, grid.manifold));
        }
        let mut slots = self.manifold.variables();
        slots.push("t");
        let codes = self
            .components
            .iter()
            .map(|c| c.compile(&slots))
            .collect::<Result<Vec<_>>>()?;
        let dim = self.manifold.dim();
        let values = map_indices(grid.len(), |i| {
            let mut s = [0.0; 4];
            s[..dim].copy_from_slice(&grid.nodes[i][..dim]);
            let mut out = [0.0; 3];
            for (k, c) in codes.iter().enumerate() {
                out[k] = c.eval(&s);
            }
            out
        });
        Ok(NodalVectorField {
            manifold: self.manifold,
            values,
        })
    }
}

/// Vector field known only by its frame components at grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalVectorField {
    pub manifold: ManifoldId,
    pub values: Vec<[f64; 3]>,
}
