use std::f64::consts::{PI, TAU};

use helicity_core::calculus::*;
use helicity_core::contact::contact_form;
use helicity_core::*;
use num::complex::Complex64;
use serde_json::Value;

fn golden() -> Value {
    serde_json::from_str(include_str!("golden/values.json")).unwrap()
}

fn s3(text: &str) -> ScalarField {
    ScalarField::parse(ManifoldId::Sphere3, text).unwrap()
}

fn s2(text: &str) -> ScalarField {
    ScalarField::parse(ManifoldId::Sphere2, text).unwrap()
}

#[test]
fn sphere_integrals() {
    let g = make_uniform_grid(ManifoldId::Sphere3, 32).unwrap();
    assert!((integrate(&s3("1"), &g).unwrap() - 1.0).abs() < 1e-10);
    assert!(integrate(&s3("cos(2*eta)"), &g).unwrap().abs() < 1e-10);
    assert!((integrate(&s3("cos(2*eta)^2"), &g).unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((l2_norm_sq(&s3("cos(2*eta)"), &g).unwrap() - 1.0 / 3.0).abs() < 1e-9);
    assert!((average(&s3("1"), &g).unwrap() - 1.0).abs() < 1e-12);
    let sg = make_grid(ManifoldId::Sphere2, &[32, 8]).unwrap();
    assert!(average(&s2("cos(phi)"), &sg).unwrap().abs() < 1e-12);
    assert_eq!(integrate(&s2("1"), &g).unwrap_err().name(), "ManifoldMismatch");
}

#[test]
fn top_forms() {
    let g = make_uniform_grid(ManifoldId::Sphere3, 16).unwrap();
    let alpha = contact_form(ManifoldId::Sphere3).unwrap();
    let vol = alpha.wedge(&alpha.exterior_derivative().unwrap()).unwrap();
    assert!((integrate_form(&vol, &g).unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(integrate_form(&alpha, &g).unwrap_err().name(), "NotTopDegree");
}

#[test]
fn fourier_examples() {
    let c = fourier_coeffs(&parse("cos(2*z)").unwrap(), "z", 4).unwrap();
    for n in -4i64..=4 {
        let want = if n.abs() == 2 { 0.5 } else { 0.0 };
        assert!((c.get(n) - Complex64::new(want, 0.0)).norm() < 1e-12, "{n}");
    }
    let c = fourier_coeffs(&parse("7").unwrap(), "z", 2).unwrap();
    assert!((c.get(0).re - 7.0).abs() < 1e-12);
    let c = fourier_coeffs(&parse("exp(cos(z))").unwrap(), "z", 16).unwrap();
    let bessel = golden()["exp_cos_bessel"]["value"].clone();
    for (n, v) in bessel.as_array().unwrap().iter().enumerate() {
        let v = v.as_f64().unwrap();
        assert!((c.get(n as i64).re - v).abs() < 1e-10, "{n}");
        assert!((c.get(-(n as i64)).re - v).abs() < 1e-10, "{n}");
    }
}

#[test]
fn fourier_oracle_agrees_with_dense_quadrature() {
    let c = fourier_coeffs(&parse("exp(cos(z))").unwrap(), "z", 16).unwrap();
    let m = 4096;
    for n in 0..=16i64 {
        let sum: f64 = (0..m)
            .map(|j| {
                let z = TAU * j as f64 / m as f64;
                z.cos().exp() * (n as f64 * z).cos()
            })
            .sum();
        assert!((c.get(n).re - sum / m as f64).abs() < 1e-10, "{n}");
    }
}

#[test]
fn plancherel() {
    let e = parse("cos(z)^3+sin(2*z)").unwrap();
    let c = fourier_coeffs(&e, "z", 8).unwrap();
    let code = e.compile(&["z"]).unwrap();
    let m = 512;
    let l2: f64 = (0..m)
        .map(|j| code.eval(&[TAU * j as f64 / m as f64]).powi(2))
        .sum::<f64>()
        / m as f64;
    assert!((c.energy() - l2).abs() < 1e-12);
}

#[test]
fn spectrum_json() {
    let s = FourierSpectrum::from_positive(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.5)]);
    let text = serde_json::to_string(&s).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["N"], 1);
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 3);
    let back: FourierSpectrum = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
}

#[test]
fn zonal_primitive_examples() {
    let g = make_grid(ManifoldId::Sphere2, &[64, 4]).unwrap();
    let z = zonal_primitive(&s2("cos(phi)"), &g).unwrap();
    for phi in [0.3f64, 1.0, 2.2, 3.0] {
        let want = phi.sin().powi(2) / (8.0 * PI);
        assert!((z.coefficient.eval(phi, 0) - want).abs() < 1e-12, "{phi}");
    }
    assert!(z.closing.abs() < 1e-12);
    assert!(z.report.residual < 1e-9);
    let c = zonal_primitive(&s2("3"), &g).unwrap();
    assert!(c.closing.abs() < 1e-15 && c.coefficient.eval(1.0, 0).abs() < 1e-15);
    let q = zonal_primitive(&s2("cos(phi)^2"), &g).unwrap();
    assert!(q.closing.abs() < 1e-12);
    let err = zonal_primitive(&s2("cos(psi)"), &g).unwrap_err();
    assert_eq!(err.name(), "NotZonal");
}

#[test]
fn sphere_primitive_examples() {
    let g = make_uniform_grid(ManifoldId::Sphere3, 16).unwrap();
    let one = beta_primitive_s3(&s3("1"), &g).unwrap();
    let alpha = contact_form(ManifoldId::Sphere3).unwrap().compile().unwrap();
    let beta = one.report.form.compile().unwrap();
    for p in g.nodes.iter().step_by(97) {
        let (a, b) = (alpha.eval(p, 0.0), beta.eval(p, 0.0));
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-12);
        }
    }
    let g48 = make_uniform_grid(ManifoldId::Sphere3, 48).unwrap();
    let cos2 = beta_primitive_s3(&s3("cos(2*eta)"), &g48).unwrap();
    assert!(cos2.report.residual < 1e-6);
    assert_eq!(beta_primitive_s3(&s3("cos(xi1-xi2)"), &g).unwrap_err().name(), "NotZonal");
}

#[test]
fn torus_primitive_examples() {
    let g = make_uniform_grid(ManifoldId::Torus3, 32).unwrap();
    let c0 = FourierSpectrum::from_positive(&[Complex64::new(1.5, 0.0)]);
    assert!(torus_primitives(&c0, &g).unwrap().report.residual < 1e-9);
    let c2 = FourierSpectrum::from_positive(&[
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.5, 0.0),
    ]);
    assert!(torus_primitives(&c2, &g).unwrap().report.residual < 1e-9);
    let bad = FourierSpectrum::from_positive(&[Complex64::new(0.0, 0.0), Complex64::new(0.3, 0.0)]);
    assert_eq!(torus_primitives(&bad, &g).unwrap_err().name(), "NotExact");
}

#[test]
fn residual_gate_aborts() {
    let g = make_uniform_grid(ManifoldId::Sphere3, 8).unwrap();
    let p = beta_primitive_s3(&s3("cos(2*eta)"), &g).unwrap();
    let forced = PrimitiveReport {
        form: p.report.form.clone(),
        residual: 1.0,
    };
    assert_eq!(forced.require(PRIMITIVE_TOLERANCE).unwrap_err().name(), "ResidualTooLarge");
}
