use std::f64::consts::{PI, TAU};

use helicity_core::calculus::{
    beta_primitive_s3, contact_primitive_residual, integrate, PrimitiveReport, PRIMITIVE_TOLERANCE,
};
use helicity_core::contact::{contact_form, ContactSolver};
use helicity_core::helicity::*;
use helicity_core::*;

fn s3(text: &str) -> ScalarField {
    ScalarField::parse(ManifoldId::Sphere3, text).unwrap()
}

fn s2(text: &str) -> ScalarField {
    ScalarField::parse(ManifoldId::Sphere2, text).unwrap()
}

fn grid(n: usize) -> ChartGrid {
    make_uniform_grid(ManifoldId::Sphere3, n).unwrap()
}

#[test]
fn hopf_contact_fields() {
    let g = grid(8);
    let cases = [
        ("1", [0.0, TAU, TAU]),
        ("cos(2*eta)", [0.0, -TAU, TAU]),
        ("cos(eta)^2", [0.0, 0.0, TAU]),
    ];
    for (h, want) in cases {
        let x = contact_vector_field(&s3(h), &g).unwrap();
        for v in &x.values {
            for k in 0..3 {
                assert!((v[k] - want[k]).abs() < 1e-12, "{h}: {v:?}");
            }
        }
    }
    assert_eq!(contact_vector_field(&s3("cos(xi1)"), &g).unwrap_err().name(), "NotBasic");
}

#[test]
fn contact_field_solves_defining_equations() {
    let g = grid(12);
    for h in ["cos(2*eta)+sin(xi1-xi2)*sin(2*eta)", "exp(cos(eta)^2)"] {
        let f = s3(h);
        let x = contact_vector_field(&f, &g).unwrap();
        let solver = ContactSolver::new(&f).unwrap();
        for (p, v) in g.nodes.iter().zip(&x.values) {
            assert!(solver.equation_residual(p, v) < 1e-8, "{h}");
        }
    }
    let t = make_uniform_grid(ManifoldId::Torus3, 8).unwrap();
    let f = ScalarField::parse(ManifoldId::Torus3, "cos(2*z)").unwrap();
    let x = contact_vector_field(&f, &t).unwrap();
    let solver = ContactSolver::new(&f).unwrap();
    for (p, v) in t.nodes.iter().zip(&x.values) {
        assert!(solver.equation_residual(p, v) < 1e-8);
    }
}

#[test]
fn hopf_helicity_values() {
    let g = grid(24);
    for (h, want) in [("1", 1.0), ("cos(2*eta)", -1.0), ("cos(eta)^2", 0.0), ("sin(eta)^2", 0.0)] {
        let r = helicity_contact(&s3(h), &g).unwrap();
        assert!((r.value - want).abs() < 1e-9, "{h}: {}", r.value);
        assert_eq!(r.method, Method::ContactFormula);
        assert_eq!(r.grid, "24x24x24");
    }
    let t = make_uniform_grid(ManifoldId::Torus3, 8).unwrap();
    let f = ScalarField::parse(ManifoldId::Torus3, "1").unwrap();
    assert_eq!(helicity_contact(&f, &t).unwrap_err().name(), "Unsupported");
    assert_eq!(helicity_contact(&s3("cos(xi2)"), &g).unwrap_err().name(), "NotBasic");
}

#[test]
fn relative_helicity_examples() {
    let g = grid(16);
    assert!(relative_helicity_contact(&s3("1"), &s3("cos(2*eta)"), &g).unwrap().abs() < 1e-12);
    let h = s3("cos(eta)^2+0.3*sin(2*eta)*cos(xi1-xi2)");
    let diag = relative_helicity_contact(&h, &h, &g).unwrap();
    assert!((diag - helicity_contact(&h, &g).unwrap().value).abs() < 1e-14);
    let k = s3("exp(cos(2*eta))");
    let r = relative_helicity_contact(&s3("1"), &k, &g).unwrap();
    assert!((r - integrate(&k, &g).unwrap()).abs() < 1e-12);
    let sym = relative_helicity_contact(&k, &h, &g).unwrap() - relative_helicity_contact(&h, &k, &g).unwrap();
    assert!(sym.abs() < 1e-14);
}

#[test]
fn direct_quadrature_examples() {
    let g = grid(48);
    let r = helicity_direct_s3(&s3("cos(2*eta)"), &g).unwrap();
    assert!((r.value + 1.0).abs() < 1e-5);
    assert_eq!(r.method, Method::DirectQuadrature);
    assert!(r.residual.unwrap() < PRIMITIVE_TOLERANCE);

    let g = grid(16);
    let one = s3("1");
    let x = contact_vector_field(&one, &g).unwrap();
    let alpha = contact_form(ManifoldId::Sphere3).unwrap();
    let report = PrimitiveReport {
        residual: contact_primitive_residual(&alpha, &one, &g).unwrap(),
        form: alpha,
    };
    let r = helicity_direct(&x, &report, &g, PRIMITIVE_TOLERANCE).unwrap();
    assert!((r.value - 1.0).abs() < 1e-8);
}

#[test]
fn direct_quadrature_is_gauge_independent() {
    let g = grid(32);
    let h = s3("cos(2*eta)");
    let x = contact_vector_field(&h, &g).unwrap();
    let beta = beta_primitive_s3(&h, &g).unwrap().report.form;
    let exact = KForm::function(ManifoldId::Sphere3, parse("sin(2*eta)*cos(xi1)+cos(xi2)").unwrap())
        .unwrap()
        .exterior_derivative()
        .unwrap();
    let shifted = beta.add(&exact).unwrap();
    let base = PrimitiveReport {
        residual: contact_primitive_residual(&beta, &h, &g).unwrap(),
        form: beta,
    };
    let other = PrimitiveReport {
        residual: contact_primitive_residual(&shifted, &h, &g).unwrap(),
        form: shifted,
    };
    let a = helicity_direct(&x, &base, &g, PRIMITIVE_TOLERANCE).unwrap().value;
    let b = helicity_direct(&x, &other, &g, PRIMITIVE_TOLERANCE).unwrap().value;
    assert!((a - b).abs() < 1e-6, "{a} {b}");
}

#[test]
fn cos_squared_direct_is_zero() {
    let g = grid(48);
    let r = helicity_direct_s3(&s3("cos(eta)^2"), &g).unwrap();
    assert!(r.value.abs() < 1e-6);
}

#[test]
fn time_dependent_examples() {
    let g = grid(16);
    let times = uniform_times(1000);
    let f = |s: &str| ScalarField::time_dependent(ManifoldId::Sphere3, parse(s).unwrap()).unwrap();
    let one = helicity_timedep(&f("1"), &g, &uniform_times(4)).unwrap();
    assert!((one.value - 1.0).abs() < 1e-12);
    assert_eq!(one.method, Method::TimeDependentFormula);
    let c = helicity_timedep(&f("cos(2*eta)"), &g, &uniform_times(4)).unwrap();
    assert!((c.value + 1.0).abs() < 1e-9);
    let lin = helicity_timedep(&f("t*cos(2*eta)"), &g, &times).unwrap();
    let oracle: f64 = {
        let n = 100_000;
        (0..n)
            .map(|i| {
                let t = (i as f64 + 0.5) / n as f64;
                -3.0 * t * t / 3.0
            })
            .sum::<f64>()
            / n as f64
    };
    assert!((lin.value - oracle).abs() < 1e-6, "{} {oracle}", lin.value);
    assert!(helicity_timedep(&f("t*cos(xi1)"), &g, &times).is_err());
}

#[test]
fn bounds_examples() {
    let g = grid(24);
    let b = bounds_check(&s3("cos(2*eta)"), &g).unwrap();
    assert!((b.lower + 1.0).abs() < 1e-9 && (b.value + 1.0).abs() < 1e-9 && (b.upper - 1.0 / 3.0).abs() < 1e-9);
    assert!(b.tight_lower && !b.tight_upper);
    let b = bounds_check(&s3("2"), &g).unwrap();
    assert!((b.lower + 12.0).abs() < 1e-9 && (b.value - 4.0).abs() < 1e-9 && (b.upper - 4.0).abs() < 1e-9);
    assert!(b.tight_upper && !b.tight_lower);
    let b = bounds_check(&s3("1+cos(2*eta)"), &g).unwrap();
    assert!(b.value.abs() < 1e-9 && (b.lower + 4.0).abs() < 1e-9 && (b.upper - 4.0 / 3.0).abs() < 1e-9);
    assert!(b.lower < b.value && b.value < b.upper && !b.tight_lower && !b.tight_upper);
}

#[test]
fn horizontal_lift_examples() {
    let g = make_grid(ManifoldId::Sphere2, &[48, 8]).unwrap();
    let c = horizontal_lift_helicity(&s2("5"), &g).unwrap();
    assert!(c.value.abs() < 1e-12 && c.constant);
    let f = horizontal_lift_helicity(&s2("cos(phi)"), &g).unwrap();
    assert!((f.value + 1.0 / 3.0).abs() < 1e-12 && !f.constant);
    let q = horizontal_lift_helicity(&s2("cos(phi)^2"), &g).unwrap();
    assert!((q.value + 4.0 / 45.0).abs() < 1e-12);
}

#[test]
fn filling_disc_examples() {
    let g = grid(24);
    for (h, want) in [("1", 1.0), ("cos(2*eta)", 0.0), ("cos(eta)^2", 0.5)] {
        let v = filling_disc_average(&s3(h), 48, 8, &g).unwrap();
        assert!((v - want).abs() < 1e-10, "{h}: {v}");
    }
}

#[test]
fn fiber_linking_examples() {
    let pts = |a: (f64, i8), b: (f64, i8)| {
        vec![
            SignedPoint { phi: a.0, psi: 0.0, sign: a.1 },
            SignedPoint { phi: b.0, psi: 1.0, sign: b.1 },
        ]
    };
    assert_eq!(fiber_linking(&s2("3"), &pts((0.2, 1), (2.0, -1))).unwrap(), 0.0);
    let v = fiber_linking(&s2("cos(phi)"), &pts((0.0, 1), (PI, -1))).unwrap();
    assert!((v + 2.0).abs() < 1e-15);
    let v = fiber_linking(&s2("cos(phi)^2"), &pts((PI / 3.0, 1), (PI / 2.0, -1))).unwrap();
    assert!((v + 0.25).abs() < 1e-15);
    let err = fiber_linking(&s2("1"), &pts((0.0, 1), (1.0, 1))).unwrap_err();
    assert_eq!(err, Error::NotNullHomologous { sum: 2 });
}

#[test]
fn limit_examples() {
    let g = grid(16);
    let constant: Vec<_> = (0..4).map(|_| s3("cos(2*eta)")).collect();
    let r = helicity_limit(&constant, &g).unwrap();
    assert!(r.values.iter().all(|v| (v + 1.0).abs() < 1e-9));
    assert_eq!(r.sup_gaps.len(), 3);
    let seq: Vec<_> = (1..=8).map(|i| s3(&format!("cos(2*eta)+1/{i}"))).collect();
    let r = helicity_limit(&seq, &g).unwrap();
    for (i, v) in r.values.iter().enumerate() {
        let e = 1.0 / (i + 1) as f64;
        let want = 4.0 * e * e - 3.0 * (1.0 / 3.0 + e * e);
        assert!((v - want).abs() < 1e-9);
    }
    assert!(r.sup_gaps.windows(2).all(|w| w[1] < w[0]));
    let seq: Vec<_> = (1..=6).map(|i| s3(&format!("1-1/{i}"))).collect();
    let r = helicity_limit(&seq, &g).unwrap();
    for (i, v) in r.values.iter().enumerate() {
        let a = 1.0 - 1.0 / (i + 1) as f64;
        assert!((v - a * a).abs() < 1e-12);
    }
}
