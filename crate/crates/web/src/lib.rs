//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Every export returns plain data (a JSON string or a flat `Vec<f64>`) so the
//! same functions run unchanged in native tests.

use helicity_core::calculus::{beta_primitive_s3, FourierSpectrum, PRIMITIVE_TOLERANCE};
use helicity_core::conjugacy::{furstenberg_apply, orbit_discrepancy, FurstenbergMap, Rotation};
use helicity_core::helicity::{bounds_check, contact_vector_field, helicity_contact, helicity_direct};
use helicity_core::suspension::{suspension_helicity_direct, twist_isotopy, IsotopySpec};
use helicity_core::{make_grid, make_uniform_grid, parse, ManifoldId, Result, ScalarField};
use num::complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn report(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({"error": e.name(), "message": e.to_string()}).to_string(),
    }
}

/// Contact helicity of `H(η, ξ₁, ξ₂)` on S³, optionally cross-checked by direct quadrature.
#[wasm_bindgen]
pub fn hopf_helicity(expr: &str, n: usize, direct: bool) -> String {
    report((|| {
        let h = ScalarField::parse(ManifoldId::Sphere3, expr)?;
        let g = make_uniform_grid(ManifoldId::Sphere3, n)?;
        let r = helicity_contact(&h, &g)?;
        let b = bounds_check(&h, &g)?;
        let mut v = json!({"value": r.value, "lower": b.lower, "upper": b.upper, "grid": r.grid});
        if direct {
            let prim = beta_primitive_s3(&h, &g)?;
            let x = contact_vector_field(&h, &g)?;
            v["direct"] = json!(helicity_direct(&x, &prim.report, &g, PRIMITIVE_TOLERANCE)?.value);
        }
        Ok(v)
    })())
}

/// Suspension of the twist map with angular speed `profile(r)`, or of an arbitrary
/// Hamiltonian in `r, theta, t` when `as_hamiltonian` is set.
#[wasm_bindgen]
pub fn twist_suspension(profile: &str, support: f64, n_r: usize, as_hamiltonian: bool) -> String {
    report((|| {
        let spec = if as_hamiltonian {
            IsotopySpec::parse(profile, support)?
        } else {
            twist_isotopy(&parse(profile)?, support)?
        };
        let g = make_grid(ManifoldId::SolidTorus, &[n_r, 32, 4])?;
        let r = suspension_helicity_direct(&spec, &g)?;
        Ok(json!({"helicity": r.value, "calabi": r.calabi, "grid": r.grid}))
    })())
}

/// Orbit of `(u, v) ↦ (u + θ, v + d·u + a·cos 2πu)`, flattened as `[u₀, v₀, u₁, v₁, …]`.
/// The final element is the 8×8 discrepancy, or NaN when the orbit is too short.
#[wasm_bindgen]
pub fn furstenberg_orbit(theta: f64, d: i64, amplitude: f64, n: usize) -> Vec<f64> {
    let f = FourierSpectrum::from_positive(&[Complex64::new(0.0, 0.0), Complex64::new(amplitude / 2.0, 0.0)]);
    let Ok(m) = FurstenbergMap::new(Rotation::Float(theta), d, f) else {
        return Vec::new();
    };
    let Ok(points) = furstenberg_apply(&m, [0.0, 0.0], n) else {
        return Vec::new();
    };
    let mut out: Vec<f64> = points.iter().flat_map(|p| [p[0], p[1]]).collect();
    out.push(orbit_discrepancy(&m, [0.0, 0.0], n, 8).unwrap_or(f64::NAN));
    out
}

/// Golden-ratio rotation number, for the page's default.
#[wasm_bindgen]
pub fn golden_theta() -> f64 {
    Rotation::golden().value()
}
