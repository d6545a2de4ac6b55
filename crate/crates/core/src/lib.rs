//! Helicity of divergence-free vector fields on model three-manifolds.
//!
//! Closed-form contact formulas are paired with direct quadrature of
//! `∫ β ∧ dβ`, and the Furstenberg/twist conjugacy experiments live in
//! [`conjugacy`].

pub mod calculus;
pub mod conjugacy;
pub mod contact;
pub mod error;
pub mod fields;
pub mod helicity;
pub mod manifolds;
pub mod quadrature;
pub mod suspension;
pub mod torus;

pub use error::{Error, Result};
pub use fields::{parse, Expr, KForm, ScalarField, VectorField};
pub use manifolds::{hopf_projection, make_grid, make_uniform_grid, ChartGrid, ManifoldId};
