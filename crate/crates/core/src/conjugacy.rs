//! Furstenberg skew products, the splitting equation over a rotation, and
//! twist homeomorphisms of the disk.
//!
//! Torus points are pairs of angles `(u, v)` in `[0, 1)²`, standing for
//! `(e^{2πiu}, e^{2πiv})`.

use std::f64::consts::{PI, TAU};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::calculus::FourierSpectrum;
use crate::error::{Error, Result};
use crate::fields::Expr;
use crate::quadrature::{compensated_sum, map_indices};

/// Divisors `|1 − e^{2πinθ}|` below this are treated as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-12;
/// Points used to measure splitting residuals.
pub const RESIDUAL_POINTS: usize = 4096;
/// Largest number of terms for the strict frequency construction.
pub const STRICT_MAX_TERMS: usize = 3;
/// Largest number of terms in relaxed mode.
pub const RELAXED_MAX_TERMS: usize = 12;
/// Smallest radius at which a twist profile is evaluated.
pub const RADIUS_FLOOR: f64 = 1e-8;

/// A rotation number, either a double or an exact rational.
#[derive(Debug, Clone, PartialEq)]
pub enum Rotation {
    Float(f64),
    Exact(BigRational),
}

impl Rotation {
    /// `(√5 − 1)/2`.
    pub fn golden() -> Self {
        Rotation::Float((5f64.sqrt() - 1.0) / 2.0)
    }

    pub fn value(&self) -> f64 {
        match self {
            Rotation::Float(x) => *x,
            Rotation::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// `{nθ}` in `[0, 1)`; exact before rounding for rational rotations.
    pub fn frac_of_multiple(&self, n: i64) -> f64 {
        match self {
            Rotation::Float(x) => (n as f64 * x).rem_euclid(1.0),
            Rotation::Exact(q) => {
                let m = BigRational::from_integer(BigInt::from(n)) * q;
                let f = &m - m.floor();
                f.to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    /// `1 − e^{2πinθ}` without cancellation for small `{nθ}`.
    pub fn divisor(&self, n: i64) -> Complex64 {
        let phase = self.frac_of_multiple(n);
        let s = (PI * phase).sin();
        Complex64::new(2.0 * s * s, -(TAU * phase).sin())
    }
}

impl std::str::FromStr for Rotation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "golden" {
            return Ok(Rotation::golden());
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| Error::InvalidInput(format!("bad rotation `{s}`")))?;
            let q: BigInt = q.trim().parse().map_err(|_| Error::InvalidInput(format!("bad rotation `{s}`")))?;
            if q.is_zero() {
                return Err(Error::InvalidInput("zero denominator".into()));
            }
            return Ok(Rotation::Exact(BigRational::new(p, q)));
        }
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Rotation::Float)
            .ok_or_else(|| Error::InvalidInput(format!("bad rotation `{s}`")))
    }
}

/// Nonzero modes of a spectrum.
fn modes(s: &FourierSpectrum) -> Vec<(i64, Complex64)> {
    let n = s.max_index() as i64;
    (-n..=n)
        .map(|k| (k, s.get(k)))
        .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
        .collect()
}

/// Real part of `Σ c_n e^{2πinu}` over sparse modes.
fn eval_modes(modes: &[(i64, Complex64)], u: f64) -> f64 {
    compensated_sum(
        modes
            .iter()
            .map(|(n, c)| (c * Complex64::from_polar(1.0, TAU * (*n as f64 * u).rem_euclid(1.0))).re),
    )
}

/// `(u, v) ↦ (u + θ, v + d·u + f(u))` on the two-torus.
#[derive(Debug, Clone)]
pub struct FurstenbergMap {
    pub theta: Rotation,
    pub d: i64,
    pub f: FourierSpectrum,
    f_modes: Vec<(i64, Complex64)>,
}

impl FurstenbergMap {
    pub fn new(theta: Rotation, d: i64, f: FourierSpectrum) -> Result<Self> {
        let defect = f.reality_defect();
        if defect > 1e-12 {
            return Err(Error::InvalidInput(format!("f must be real (defect {defect:.3e})")));
        }
        let f_modes = modes(&f);
        Ok(FurstenbergMap {
            theta,
            d,
            f,
            f_modes,
        })
    }

    pub fn f_at(&self, u: f64) -> f64 {
        eval_modes(&self.f_modes, u)
    }

    /// One step without reduction modulo 1.
    pub fn lift(&self, p: [f64; 2]) -> [f64; 2] {
        [p[0] + self.theta.value(), p[1] + self.d as f64 * p[0] + self.f_at(p[0])]
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        let q = self.lift(p);
        [q[0].rem_euclid(1.0), q[1].rem_euclid(1.0)]
    }
}

/// The first `n` orbit points, starting with `start`.
pub fn furstenberg_apply(m: &FurstenbergMap, start: [f64; 2], n: usize) -> Result<Vec<[f64; 2]>> {
    if n == 0 {
        return Err(Error::InvalidInput("orbit length must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n);
    let mut p = [start[0].rem_euclid(1.0), start[1].rem_euclid(1.0)];
    for _ in 0..n {
        out.push(p);
        p = m.apply(p);
    }
    Ok(out)
}

/// Central-difference Jacobian determinant of the lifted map.
pub fn jacobian_det(m: &FurstenbergMap, p: [f64; 2], h: f64) -> f64 {
    let du = [m.lift([p[0] + h, p[1]]), m.lift([p[0] - h, p[1]])];
    let dv = [m.lift([p[0], p[1] + h]), m.lift([p[0], p[1] - h])];
    let a = (du[0][0] - du[1][0]) / (2.0 * h);
    let b = (dv[0][0] - dv[1][0]) / (2.0 * h);
    let c = (du[0][1] - du[1][1]) / (2.0 * h);
    let d = (dv[0][1] - dv[1][1]) / (2.0 * h);
    a * d - b * c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub g_spectrum: FourierSpectrum,
    pub eta: f64,
    pub residual_sup: f64,
    /// `Σ_{0 < |m| ≤ n} |ĝ_m|`, recorded at each `n` with `ĝ_n ≠ 0`.
    pub c0_partial_sums: Vec<f64>,
    /// `Σ_{0 < |m| ≤ n} |m ĝ_m|`, at the same `n`.
    pub c1_partial_sums: Vec<f64>,
    pub small_divisor_min: f64,
}

/// `sup_u |g(u) − g(u + θ) − f(u) + η|` on a uniform grid, with exact phases.
pub fn split_residual(f: &FourierSpectrum, g: &FourierSpectrum, eta: f64, theta: &Rotation) -> f64 {
    let g_modes = modes(g);
    let f_modes = modes(f);
    let shifts: Vec<Complex64> = g_modes
        .iter()
        .map(|(n, _)| theta.divisor(*n))
        .collect();
    let m = RESIDUAL_POINTS as i64;
    let phase = |n: i64, j: i64| Complex64::from_polar(1.0, TAU * (n * j).rem_euclid(m) as f64 / m as f64);
    let errs = map_indices(RESIDUAL_POINTS, |j| {
        let j = j as i64;
        let mut lhs = 0.0;
        for ((n, c), s) in g_modes.iter().zip(&shifts) {
            lhs += (c * phase(*n, j) * s).re;
        }
        let fv: f64 = f_modes.iter().map(|(n, c)| (c * phase(*n, j)).re).sum();
        (lhs - fv + eta).abs()
    });
    errs.into_iter().fold(0.0, f64::max)
}

fn partial_sums(g: &FourierSpectrum) -> (Vec<f64>, Vec<f64>) {
    let mut c0 = Vec::new();
    let mut c1 = Vec::new();
    let (mut s0, mut s1) = (0.0, 0.0);
    for n in 1..=g.max_index() as i64 {
        let a = g.get(n).norm() + g.get(-n).norm();
        if a == 0.0 {
            continue;
        }
        s0 += a;
        s1 += n as f64 * a;
        c0.push(s0);
        c1.push(s1);
    }
    (c0, c1)
}

/// Solve `g(u) − g(u + θ) = f(u) − η` mode by mode up to `|n| ≤ N`.
pub fn split_function(f: &FourierSpectrum, theta: &Rotation, max_index: usize) -> Result<SplitReport> {
    if max_index > f.max_index() {
        return Err(Error::InvalidInput(format!(
            "N = {max_index} exceeds the spectrum size {}",
            f.max_index()
        )));
    }
    let mut g = FourierSpectrum::zeros(max_index);
    let mut small = f64::INFINITY;
    for n in 1..=max_index as i64 {
        for k in [n, -n] {
            let div = theta.divisor(k);
            let modulus = div.norm();
            small = small.min(modulus);
            if modulus < RESONANCE_TOLERANCE {
                return Err(Error::ResonantDivisor { mode: k, modulus });
            }
            g.set(k, f.get(k) / div);
        }
    }
    let eta = f.get(0).re;
    let residual_sup = split_residual(f, &g, eta, theta);
    let (c0, c1) = partial_sums(&g);
    Ok(SplitReport {
        g_spectrum: g,
        eta,
        residual_sup,
        c0_partial_sums: c0,
        c1_partial_sums: c1,
        small_divisor_min: small,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FurstenbergExample {
    pub theta: f64,
    /// `p/q` when the rotation is an exact rational.
    pub theta_exact: Option<String>,
    pub strict: bool,
    pub frequencies: Vec<u64>,
    /// Whether every `{n_k θ}` lies in `(0, bound_k]`.
    pub bounds_hold: bool,
    pub f: FourierSpectrum,
    pub g: FourierSpectrum,
    pub residual_sup: f64,
    pub c0_partial_sums: Vec<f64>,
    pub c1_partial_sums: Vec<f64>,
}

struct ContinuedFraction {
    p: (BigInt, BigInt),
    q: (BigInt, BigInt),
}

impl ContinuedFraction {
    /// Start from `θ = [0; …]`: `p₋₁/q₋₁ = 1/0`, `p₀/q₀ = 0/1`.
    fn new() -> Self {
        ContinuedFraction {
            p: (BigInt::one(), BigInt::zero()),
            q: (BigInt::zero(), BigInt::one()),
        }
    }

    /// Append the smallest partial quotient `a ≥ 1` with `q ≥ bound`.
    fn push_at_least(&mut self, bound: &BigInt) {
        let (q_prev, q_cur) = (&self.q.0, &self.q.1);
        let mut a = if bound > q_prev {
            (bound - q_prev + q_cur - BigInt::one()) / q_cur
        } else {
            BigInt::one()
        };
        if a < BigInt::one() {
            a = BigInt::one();
        }
        let p_next = &a * &self.p.1 + &self.p.0;
        let q_next = &a * &self.q.1 + &self.q.0;
        self.p = (self.p.1.clone(), p_next);
        self.q = (self.q.1.clone(), q_next);
    }

    fn denominator(&self) -> &BigInt {
        &self.q.1
    }

    fn value(&self) -> BigRational {
        BigRational::new(self.p.1.clone(), self.q.1.clone())
    }
}

fn pow2(n: u64) -> BigInt {
    BigInt::one() << (n as usize)
}

/// Frequencies `n_k ≥ 2^k` and a rational θ with `0 < {n_k θ} ≤ 2^{−n_k}`.
fn strict_frequencies(terms: usize) -> Result<(Vec<u64>, BigRational)> {
    if terms > STRICT_MAX_TERMS {
        return Err(Error::PrecisionExhausted {
            asked: terms,
            max: STRICT_MAX_TERMS,
        });
    }
    let mut cf = ContinuedFraction::new();
    let mut freqs = Vec::with_capacity(terms);
    let mut prev = 0u64;
    for k in 1..=terms as u64 {
        cf.push_at_least(&pow2(prev));
        cf.push_at_least(&pow2(k));
        let n = cf
            .denominator()
            .to_u64()
            .ok_or(Error::PrecisionExhausted {
                asked: terms,
                max: STRICT_MAX_TERMS,
            })?;
        freqs.push(n);
        prev = n;
    }
    cf.push_at_least(&pow2(prev));
    cf.push_at_least(&BigInt::one());
    Ok((freqs, cf.value()))
}

/// Furstenberg's non-C¹ coboundary: `ĝ_{n_k} = 1/k²`, `f = g − g(· + θ)`.
///
/// Strict mode builds a rational θ from continued fractions with
/// `0 < {n_k θ} ≤ 2^{−n_k}`; relaxed mode uses `n_k = 2^k`,
/// `θ = golden · 2^{−(2K+1)}` and the weaker `0 < {n_k θ} ≤ 2^{−k}`.
pub fn furstenberg_example(terms: usize, strict: bool) -> Result<FurstenbergExample> {
    if terms == 0 {
        return Err(Error::InvalidInput("need at least one term".into()));
    }
    let (freqs, theta, bounds): (Vec<u64>, Rotation, Vec<BigRational>) = if strict {
        let (freqs, q) = strict_frequencies(terms)?;
        let bounds = freqs
            .iter()
            .map(|&n| BigRational::new(BigInt::one(), pow2(n)))
            .collect();
        (freqs, Rotation::Exact(q), bounds)
    } else {
        if terms > RELAXED_MAX_TERMS {
            return Err(Error::PrecisionExhausted {
                asked: terms,
                max: RELAXED_MAX_TERMS,
            });
        }
        let freqs: Vec<u64> = (1..=terms as u32).map(|k| 1u64 << k).collect();
        let theta = Rotation::golden().value() * 2f64.powi(-(2 * terms as i32 + 1));
        let bounds = (1..=terms)
            .map(|k| BigRational::new(BigInt::one(), pow2(k as u64)))
            .collect();
        (freqs, Rotation::Float(theta), bounds)
    };
    let bounds_hold = freqs.iter().zip(&bounds).all(|(&n, bound)| {
        let frac = match &theta {
            Rotation::Exact(q) => {
                let m = BigRational::from_integer(BigInt::from(n)) * q;
                &m - m.floor()
            }
            Rotation::Float(x) => {
                let m = BigRational::from_float(n as f64 * x).unwrap_or_else(BigRational::zero);
                &m - m.floor()
            }
        };
        frac.is_positive() && &frac <= bound
    });
    let top = *freqs.last().unwrap() as usize;
    let mut g = FourierSpectrum::zeros(top);
    let mut f = FourierSpectrum::zeros(top);
    for (k, &n) in freqs.iter().enumerate() {
        let w = 1.0 / ((k + 1) * (k + 1)) as f64;
        let n = n as i64;
        g.set(n, Complex64::new(w, 0.0));
        g.set(-n, Complex64::new(w, 0.0));
        let fk = theta.divisor(n) * w;
        f.set(n, fk);
        f.set(-n, fk.conj());
    }
    let residual_sup = split_residual(&f, &g, 0.0, &theta);
    let (c0, c1) = partial_sums(&g);
    Ok(FurstenbergExample {
        theta: theta.value(),
        theta_exact: match &theta {
            Rotation::Exact(q) => Some(format!("{}/{}", q.numer(), q.denom())),
            Rotation::Float(_) => None,
        },
        strict,
        frequencies: freqs,
        bounds_hold,
        f,
        g,
        residual_sup,
        c0_partial_sums: c0,
        c1_partial_sums: c1,
    })
}

/// Exact rotation used by a strict example.
pub fn strict_rotation(terms: usize) -> Result<Rotation> {
    Ok(Rotation::Exact(strict_frequencies(terms)?.1))
}

/// Distance on the flat torus `ℝ²/ℤ²`.
pub fn torus_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let wrap = |x: f64| {
        let r = x.rem_euclid(1.0);
        r.min(1.0 - r)
    };
    wrap(a[0] - b[0]).hypot(wrap(a[1] - b[1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    Torus,
    Euclidean,
}

/// `sup_x dist(ψ(φ_A(x)), φ_B(ψ(x)))` over the given points.
pub fn conjugacy_check(
    psi: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    phi_a: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    phi_b: &(dyn Fn([f64; 2]) -> [f64; 2] + Sync),
    points: &[[f64; 2]],
    metric: Metric,
) -> f64 {
    let errs = map_indices(points.len(), |i| {
        let x = points[i];
        let a = psi(phi_a(x));
        let b = phi_b(psi(x));
        match metric {
            Metric::Torus => torus_distance(a, b),
            Metric::Euclidean => (a[0] - b[0]).hypot(a[1] - b[1]),
        }
    });
    errs.into_iter().fold(0.0, f64::max)
}

/// `n × n` points `(i/n, j/n)`.
pub fn torus_grid_points(n: usize) -> Vec<[f64; 2]> {
    (0..n * n)
        .map(|k| [(k / n) as f64 / n as f64, (k % n) as f64 / n as f64])
        .collect()
}

/// `ψ(u, v) = (u + (mθ + η + k)/d, m·u + v + g(u))`.
#[derive(Debug, Clone)]
pub struct KodakaMap {
    shift: f64,
    m: i64,
    g_modes: Vec<(i64, Complex64)>,
}

impl KodakaMap {
    pub fn new(theta: &Rotation, eta: f64, g: &FourierSpectrum, m: i64, k: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("d must be nonzero".into()));
        }
        Ok(KodakaMap {
            shift: (m as f64 * theta.value() + eta + k as f64) / d as f64,
            m,
            g_modes: modes(g),
        })
    }

    /// `m = k = 0`, `d = 1`: `ψ(u, v) = (u + η, v + g(u))`.
    pub fn from_split(split: &SplitReport) -> Self {
        KodakaMap {
            shift: split.eta,
            m: 0,
            g_modes: modes(&split.g_spectrum),
        }
    }

    pub fn g_at(&self, u: f64) -> f64 {
        eval_modes(&self.g_modes, u)
    }

    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        [
            (p[0] + self.shift).rem_euclid(1.0),
            (self.m as f64 * p[0] + p[1] + self.g_at(p[0])).rem_euclid(1.0),
        ]
    }
}

/// Rotation of the disk by angle `ρ(r)` at radius `r`; `ρ = 0` from the cutoff on.
#[derive(Debug, Clone)]
pub struct TwistHomeo {
    pub profile: Expr,
    pub cutoff: f64,
    /// Exponent `a` with `ρ(r)·r^a` bounded near 0, estimated from the profile.
    pub growth: f64,
    code: crate::fields::Compiled,
}

impl TwistHomeo {
    pub fn new(profile: Expr, cutoff: f64) -> Result<Self> {
        if let Some(v) = profile.variables().into_iter().find(|v| v != "r") {
            return Err(Error::InvalidInput(format!("twist profile must depend on r only, found `{v}`")));
        }
        if !(cutoff > RADIUS_FLOOR && cutoff <= 1.0) {
            return Err(Error::InvalidInput(format!("cutoff must lie in (0, 1], got {cutoff}")));
        }
        let code = profile.compile(&["r"])?;
        let (r0, r1) = (1e-6f64, 1e-5f64);
        let (a, b) = (code.eval(&[r0]).abs(), code.eval(&[r1]).abs());
        let growth = if a > 0.0 && b > 0.0 {
            -(b.ln() - a.ln()) / (r1.ln() - r0.ln())
        } else {
            0.0
        };
        Ok(TwistHomeo {
            profile,
            cutoff,
            growth,
            code,
        })
    }

    pub fn rho(&self, r: f64) -> f64 {
        if r >= self.cutoff {
            0.0
        } else {
            self.code.eval(&[r.max(RADIUS_FLOOR)])
        }
    }

    /// `(x, y) ↦` rotation of the point by `ρ(|p|)`; fixes the origin.
    pub fn apply(&self, p: [f64; 2]) -> [f64; 2] {
        self.rotate(p, 1.0)
    }

    pub fn inverse(&self, p: [f64; 2]) -> [f64; 2] {
        self.rotate(p, -1.0)
    }

    fn rotate(&self, p: [f64; 2], sign: f64) -> [f64; 2] {
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return p;
        }
        let (s, c) = (sign * self.rho(r)).sin_cos();
        [c * p[0] - s * p[1], s * p[0] + c * p[1]]
    }
}

/// `exp(−DECAY/r²)` bounds `|F|` on the sampled circles of a flat function.
pub const FLAT_DECAY: f64 = 0.1;
pub const FLAT_RADII: [f64; 3] = [0.2, 0.1, 0.05];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialsRecord {
    pub radius: f64,
    /// Largest finite-difference partial of each order 1, 2, 3 on the circle.
    pub max_partials: [f64; 3],
}

/// `H = F ∘ φ_ρ` in Cartesian coordinates.
pub struct TwistedHamiltonian {
    f: crate::fields::Compiled,
    twist: TwistHomeo,
    pub partials_at_origin: Vec<PartialsRecord>,
}

impl TwistedHamiltonian {
    pub fn eval(&self, p: [f64; 2]) -> f64 {
        let q = self.twist.apply(p);
        eval_polar(&self.f, q)
    }

    /// `F` itself, for comparison.
    pub fn eval_base(&self, p: [f64; 2]) -> f64 {
        eval_polar(&self.f, p)
    }
}

fn eval_polar(f: &crate::fields::Compiled, p: [f64; 2]) -> f64 {
    let r = p[0].hypot(p[1]);
    if r == 0.0 {
        return 0.0;
    }
    f.eval(&[r, p[1].atan2(p[0])])
}

/// Mixed partial `∂^{i}_x ∂^{j}_y` by nested central differences.
fn fd_partial(h: &dyn Fn([f64; 2]) -> f64, p: [f64; 2], i: u32, j: u32, step: f64) -> f64 {
    if i > 0 {
        let f = |q: [f64; 2]| fd_partial(h, q, i - 1, j, step);
        return (f([p[0] + step, p[1]]) - f([p[0] - step, p[1]])) / (2.0 * step);
    }
    if j > 0 {
        let f = |q: [f64; 2]| fd_partial(h, q, 0, j - 1, step);
        return (f([p[0], p[1] + step]) - f([p[0], p[1] - step])) / (2.0 * step);
    }
    h(p)
}

pub fn twist_conjugated_hamiltonian(f: &Expr, twist: &TwistHomeo) -> Result<TwistedHamiltonian> {
    if let Some(v) = f.variables().into_iter().find(|v| v != "r" && v != "theta") {
        return Err(Error::InvalidInput(format!("F must depend on r, theta only, found `{v}`")));
    }
    let code = f.compile(&["r", "theta"])?;
    for &r in &FLAT_RADII {
        let bound = (-FLAT_DECAY / (r * r)).exp();
        for j in 0..64 {
            let th = TAU * j as f64 / 64.0;
            let v = code.eval(&[r, th]).abs();
            if v.is_nan() || v > bound {
                return Err(Error::NotFlat { radius: r, value: v });
            }
        }
    }
    let mut h = TwistedHamiltonian {
        f: code,
        twist: twist.clone(),
        partials_at_origin: Vec::new(),
    };
    let mut records = Vec::new();
    for e in 1..=4 {
        let radius = 10f64.powi(-e);
        let step = radius * 1e-2;
        let eval = |p: [f64; 2]| h.eval(p);
        let mut max = [0.0f64; 3];
        for k in 0..16 {
            let th = TAU * k as f64 / 16.0;
            let p = [radius * th.cos(), radius * th.sin()];
            for order in 1..=3u32 {
                for i in 0..=order {
                    let v = fd_partial(&eval, p, i, order - i, step).abs();
                    max[order as usize - 1] = max[order as usize - 1].max(v);
                }
            }
        }
        records.push(PartialsRecord {
            radius,
            max_partials: max,
        });
    }
    h.partials_at_origin = records;
    Ok(h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzPair {
    pub n: u64,
    pub r_n: f64,
    pub r_prime_n: f64,
    pub l_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub pairs: Vec<LipschitzPair>,
    /// Indices whose pair violated `r_n − r'_n < r_n²`.
    pub skipped: Vec<u64>,
}

/// Radius in `[RADIUS_FLOOR, cutoff)` where the decreasing profile equals `target`.
fn solve_radius(tw: &TwistHomeo, target: f64) -> Option<f64> {
    let mut lo = RADIUS_FLOOR;
    let mut hi = tw.cutoff;
    if tw.rho(lo) < target {
        return None;
    }
    let below = tw.rho(hi * (1.0 - 1e-15));
    if below > target {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tw.rho(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Pairs `ρ(r_n) = π/2 + 2πn`, `ρ(r'_n) = π + 2πn` and bounds `L_n = (3/r_n + 1)/4`.
pub fn lipschitz_lower_bounds(tw: &TwistHomeo, n_max: usize) -> Result<LipschitzReport> {
    let mut pairs = Vec::with_capacity(n_max);
    let mut skipped = Vec::new();
    if n_max == 0 {
        return Ok(LipschitzReport { pairs, skipped });
    }
    let samples: Vec<f64> = (0..=64)
        .map(|i| {
            let s = i as f64 / 64.0;
            tw.rho(RADIUS_FLOOR.powf(1.0 - s) * (tw.cutoff * (1.0 - 1e-9)).powf(s))
        })
        .collect();
    if samples.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("profile must decrease strictly on its support".into()));
    }
    let mut n = 1u64;
    while pairs.len() < n_max {
        let base = TAU * n as f64;
        let (Some(r), Some(rp)) = (solve_radius(tw, PI / 2.0 + base), solve_radius(tw, PI + base)) else {
            if tw.rho(RADIUS_FLOOR) < PI + base {
                return Err(Error::InsufficientPairs {
                    found: pairs.len(),
                    wanted: n_max,
                });
            }
            skipped.push(n);
            n += 1;
            continue;
        };
        if rp < r && r - rp < r * r {
            pairs.push(LipschitzPair {
                n,
                r_n: r,
                r_prime_n: rp,
                l_n: 0.25 * (3.0 / r + 1.0),
            });
        } else {
            skipped.push(n);
        }
        n += 1;
    }
    Ok(LipschitzReport { pairs, skipped })
}

/// `max_cell |count/n − 1/k²|` for the orbit of `start`.
pub fn orbit_discrepancy(m: &FurstenbergMap, start: [f64; 2], n: usize, k: usize) -> Result<f64> {
    if k == 0 || n < k * k {
        return Err(Error::InvalidInput(format!("need n ≥ k² (n = {n}, k = {k})")));
    }
    let mut counts = vec![0usize; k * k];
    let mut p = [start[0].rem_euclid(1.0), start[1].rem_euclid(1.0)];
    for _ in 0..n {
        let i = ((p[0] * k as f64) as usize).min(k - 1);
        let j = ((p[1] * k as f64) as usize).min(k - 1);
        counts[i * k + j] += 1;
        p = m.apply(p);
    }
    let expected = 1.0 / (k * k) as f64;
    Ok(counts
        .iter()
        .map(|&c| (c as f64 / n as f64 - expected).abs())
        .fold(0.0, f64::max))
}
