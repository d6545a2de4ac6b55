use std::f64::consts::{PI, TAU};

use helicity_core::calculus::FourierSpectrum;
use helicity_core::conjugacy::*;
use helicity_core::*;
use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use serde_json::Value;

fn golden() -> Value {
    serde_json::from_str(include_str!("golden/values.json")).unwrap()
}

fn spec(pos: &[(f64, f64)]) -> FourierSpectrum {
    FourierSpectrum::from_positive(&pos.iter().map(|&(a, b)| Complex64::new(a, b)).collect::<Vec<_>>())
}

fn band_limited() -> FourierSpectrum {
    spec(&[(0.05, 0.0), (0.15, 0.0), (0.0, -0.05)])
}

#[test]
fn area_preservation() {
    let m = FurstenbergMap::new(Rotation::golden(), 1, band_limited()).unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let p = [rng.gen::<f64>(), rng.gen::<f64>()];
        assert!((jacobian_det(&m, p, 1e-5) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn orbit_shape() {
    let m = FurstenbergMap::new(Rotation::golden(), 2, band_limited()).unwrap();
    let o = furstenberg_apply(&m, [1.0, 1.0], 1000).unwrap();
    assert_eq!(o.len(), 1000);
    assert!(o.iter().all(|p| (0.0..1.0).contains(&p[0]) && (0.0..1.0).contains(&p[1])));
    assert_eq!(o[0], [0.0, 0.0]);
    assert!(furstenberg_apply(&m, [0.0, 0.0], 0).is_err());
}

#[test]
fn split_constant_and_single_mode() {
    let theta = Rotation::golden();
    let c = split_function(&spec(&[(0.7, 0.0), (0.0, 0.0)]), &theta, 1).unwrap();
    assert_eq!(c.eta, 0.7);
    assert_eq!(c.residual_sup, 0.0);
    assert!(c.g_spectrum.coeffs().iter().all(|z| z.norm() == 0.0));
    let f = spec(&[(0.0, 0.0), (0.5, 0.0)]);
    let s = split_function(&f, &theta, 1).unwrap();
    let want = Complex64::new(0.5, 0.0) / (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, TAU * theta.value()));
    assert!((s.g_spectrum.get(1) - want).norm() < 1e-14);
    assert!(s.residual_sup < 1e-10);
    assert_eq!(s.g_spectrum.get(0), Complex64::new(0.0, 0.0));
    assert!(split_function(&f, &theta, 2).is_err());
}

#[test]
fn split_is_unique_up_to_constants() {
    let theta = Rotation::golden();
    let f = band_limited();
    let mut shifted = f.clone();
    shifted.set(0, f.get(0) + Complex64::new(3.0, 0.0));
    let a = split_function(&f, &theta, 2).unwrap();
    let b = split_function(&shifted, &theta, 2).unwrap();
    assert_eq!(a.g_spectrum, b.g_spectrum);
    assert!((b.eta - a.eta - 3.0).abs() < 1e-15);
}

#[test]
fn furstenberg_coefficients() {
    for (k, strict) in [(3, true), (2, true), (8, false), (12, false)] {
        let e = furstenberg_example(k, strict).unwrap();
        assert!(e.bounds_hold);
        for n in -(e.g.max_index() as i64)..=e.g.max_index() as i64 {
            let want = e
                .frequencies
                .iter()
                .position(|&m| m as i64 == n.abs())
                .map(|j| 1.0 / ((j + 1) * (j + 1)) as f64)
                .unwrap_or(0.0);
            assert_eq!(e.g.get(n), Complex64::new(want, 0.0), "{n}");
        }
        assert!(e.frequencies.iter().enumerate().all(|(j, &n)| n >= 1 << (j + 1)));
    }
    let relaxed = furstenberg_example(8, false).unwrap();
    let split = split_function(&relaxed.f, &Rotation::Float(relaxed.theta), relaxed.f.max_index()).unwrap();
    for (j, &n) in relaxed.frequencies.iter().enumerate() {
        let want = 1.0 / ((j + 1) * (j + 1)) as f64;
        assert!((split.g_spectrum.get(n as i64) - Complex64::new(want, 0.0)).norm() < 1e-9);
    }
}

#[test]
fn furstenberg_certificates() {
    let e = furstenberg_example(8, false).unwrap();
    assert!(e.c1_partial_sums.windows(2).all(|w| w[1] > w[0]));
    assert!(*e.c1_partial_sums.last().unwrap() >= 4.0);
    assert!(e.c0_partial_sums.iter().all(|s| *s <= PI * PI / 3.0));
    let strict = furstenberg_example(3, true).unwrap();
    assert!(strict.residual_sup < 1e-8);
    let want: Vec<u64> = golden()["strict_frequencies"]["value"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(strict.frequencies, want);
    assert_eq!(furstenberg_example(4, true).unwrap_err().name(), "PrecisionExhausted");
    assert_eq!(furstenberg_example(13, false).unwrap_err().name(), "PrecisionExhausted");
    let last = golden()["relaxed_c1_last"]["value"].as_f64().unwrap();
    let r12 = furstenberg_example(12, false).unwrap();
    assert!((r12.c1_partial_sums.last().unwrap() - last).abs() < 1e-12);
}

#[test]
fn strict_divisors_are_resonant() {
    let e = furstenberg_example(3, true).unwrap();
    let theta = strict_rotation(3).unwrap();
    let err = split_function(&e.f, &theta, e.f.max_index()).unwrap_err();
    assert_eq!(err.name(), "ResonantDivisor");
}

fn kodaka_error(f: &FourierSpectrum, perturb: f64) -> f64 {
    let theta = Rotation::golden();
    let split = split_function(f, &theta, f.max_index()).unwrap();
    let mut g = split.g_spectrum.clone();
    g.set(1, g.get(1) + Complex64::new(0.0, -perturb / 2.0));
    g.set(-1, g.get(-1) + Complex64::new(0.0, perturb / 2.0));
    let psi = KodakaMap::new(&theta, split.eta, &g, 0, 0, 1).unwrap();
    let a = FurstenbergMap::new(theta.clone(), 1, f.clone()).unwrap();
    let b = FurstenbergMap::new(theta, 1, FourierSpectrum::zeros(1)).unwrap();
    conjugacy_check(
        &|p| psi.apply(p),
        &|p| a.apply(p),
        &|p| b.apply(p),
        &torus_grid_points(256),
        Metric::Torus,
    )
}

#[test]
fn kodaka_conjugacy() {
    assert!(kodaka_error(&band_limited(), 0.0) < 1e-6);
    assert!(kodaka_error(&band_limited(), 0.1) > 0.01);
    let m = FurstenbergMap::new(Rotation::golden(), 1, band_limited()).unwrap();
    let id = conjugacy_check(&|p| p, &|p| m.apply(p), &|p| m.apply(p), &torus_grid_points(16), Metric::Torus);
    assert_eq!(id, 0.0);
}

const FLAT: &str = "exp(-4/(r^2*(1+15*cos(theta)^2)))";

#[test]
fn twisted_hamiltonian_is_flat() {
    let tw = TwistHomeo::new(parse("bump(r/0.9)/r").unwrap(), 0.9).unwrap();
    assert!((tw.growth - 1.0).abs() < 1e-6);
    let h = twist_conjugated_hamiltonian(&parse(FLAT).unwrap(), &tw).unwrap();
    assert_eq!(h.partials_at_origin.len(), 4);
    let r3 = h.partials_at_origin.iter().find(|p| p.radius == 1e-3).unwrap();
    assert!(r3.max_partials[0] < 1e-10);
    for p in &h.partials_at_origin[1..] {
        assert!(p.max_partials.iter().all(|v| *v < 1e-10), "{p:?}");
    }
    let ellipse = |s: f64| [0.05 * s.cos() / 4.0, 0.05 * s.sin()];
    let level = h.eval(tw.inverse(ellipse(0.0)));
    for k in 1..32 {
        let v = h.eval(tw.inverse(ellipse(TAU * k as f64 / 32.0)));
        assert!((v - level).abs() <= 1e-12 * level.abs().max(1e-300), "{v} {level}");
    }
}

#[test]
fn trivial_twist_leaves_hamiltonian() {
    let tw = TwistHomeo::new(parse("0").unwrap(), 0.9).unwrap();
    let h = twist_conjugated_hamiltonian(&parse(FLAT).unwrap(), &tw).unwrap();
    for p in [[0.2, 0.1], [-0.3, 0.4], [0.05, -0.02]] {
        assert_eq!(h.eval(p), h.eval_base(p));
    }
    let err = twist_conjugated_hamiltonian(&parse("r^2").unwrap(), &tw).err().unwrap();
    assert_eq!(err.name(), "NotFlat");
}

#[test]
fn lipschitz_sequence() {
    let tw = TwistHomeo::new(parse("r^-2").unwrap(), 0.9).unwrap();
    let rep = lipschitz_lower_bounds(&tw, 20).unwrap();
    assert_eq!(rep.pairs.len(), 20);
    assert!(rep.skipped.is_empty());
    for p in &rep.pairs {
        let base = PI / 2.0 + TAU * p.n as f64;
        assert!((p.r_n - base.powf(-0.5)).abs() < 1e-10);
        assert!((p.l_n - 0.25 * (3.0 * base.sqrt() + 1.0)).abs() < 1e-10);
        assert!(p.r_prime_n < p.r_n && p.r_n - p.r_prime_n < p.r_n * p.r_n);
    }
    assert!(rep.pairs.windows(2).all(|w| w[1].l_n > w[0].l_n));
    let l20 = golden()["lipschitz_l20"]["value"].as_f64().unwrap();
    assert!((rep.pairs[19].l_n - l20).abs() < 1e-10);
    assert!(lipschitz_lower_bounds(&tw, 0).unwrap().pairs.is_empty());
    let bounded = TwistHomeo::new(parse("20*(1-r)").unwrap(), 0.9).unwrap();
    match lipschitz_lower_bounds(&bounded, 5).unwrap_err() {
        Error::InsufficientPairs { found, wanted } => assert!(found < 5 && wanted == 5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn discrepancy_calibration() {
    let g = golden();
    let threshold = g["orbit_discrepancy_minimal"]["threshold"].as_f64().unwrap();
    let m = FurstenbergMap::new(Rotation::golden(), 1, FourierSpectrum::zeros(1)).unwrap();
    let d = orbit_discrepancy(&m, [0.0, 0.0], 100_000, 8).unwrap();
    assert!((d - g["orbit_discrepancy_minimal"]["value"].as_f64().unwrap()).abs() < 1e-9);
    assert!(d < threshold);
    let rot = FurstenbergMap::new(Rotation::golden(), 0, FourierSpectrum::zeros(1)).unwrap();
    let r = orbit_discrepancy(&rot, [0.0, 0.0], 100_000, 8).unwrap();
    assert!((r - g["orbit_discrepancy_rotation"]["value"].as_f64().unwrap()).abs() < 1e-9);
    assert!(r >= 0.1);
    assert!(orbit_discrepancy(&m, [0.0, 0.0], 63, 8).is_err());
}

#[test]
fn discrepancy_improves_with_length() {
    let m = FurstenbergMap::new(Rotation::golden(), 1, band_limited()).unwrap();
    let starts = [[0.0, 0.0], [0.3, 0.7], [0.11, 0.5], [0.9, 0.2], [0.45, 0.45]];
    let median = |n: usize| {
        let mut v: Vec<f64> = starts.iter().map(|s| orbit_discrepancy(&m, *s, n, 8).unwrap()).collect();
        v.sort_by(f64::total_cmp);
        v[2]
    };
    assert!(median(40_000) <= median(20_000));
}
