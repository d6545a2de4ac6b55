use crate::quadrature::gauss_legendre;

/// Cubic Hermite interpolant on a uniform grid with exact nodal slopes.
///
/// Used for coefficients that are antiderivatives without a closed form.
#[derive(Debug, Clone)]
pub struct Tabulated {
    name: String,
    start: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl Tabulated {
    /// Tabulate from known values and derivatives at `n + 1` uniform nodes of `[a, b]`.
    pub fn from_fn(
        name: &str,
        a: f64,
        b: f64,
        n: usize,
        value: impl Fn(f64) -> f64,
        slope: impl Fn(f64) -> f64,
    ) -> Tabulated {
        let n = n.max(1);
        let step = (b - a) / n as f64;
        let xs: Vec<f64> = (0..=n).map(|i| a + step * i as f64).collect();
        Tabulated {
            name: name.to_string(),
            start: a,
            step,
            values: xs.iter().map(|&x| value(x)).collect(),
            slopes: xs.iter().map(|&x| slope(x)).collect(),
        }
    }

    /// `x ↦ offset + ∫_a^x integrand`, accumulated with an 8-point Gauss rule per cell.
    pub fn antiderivative(
        name: &str,
        a: f64,
        b: f64,
        n: usize,
        offset: f64,
        integrand: impl Fn(f64) -> f64,
    ) -> Tabulated {
        let n = n.max(1);
        let step = (b - a) / n as f64;
        let (gx, gw) = gauss_legendre(8);
        let mut values = Vec::with_capacity(n + 1);
        let mut slopes = Vec::with_capacity(n + 1);
        let mut acc = offset;
        for i in 0..=n {
            let x = a + step * i as f64;
            values.push(acc);
            slopes.push(integrand(x));
            if i < n {
                let mid = x + 0.5 * step;
                let cell: f64 = gx
                    .iter()
                    .zip(&gw)
                    .map(|(s, w)| w * integrand(mid + 0.5 * step * s))
                    .sum();
                acc += 0.5 * step * cell;
            }
        }
        Tabulated {
            name: name.to_string(),
            start: a,
            step,
            values,
            slopes,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> (f64, f64) {
        let n = self.values.len() - 1;
        (self.start, self.start + self.step * n as f64)
    }

    pub fn last_value(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Derivative of the given order (0 is the value); orders above 3 vanish.
    pub fn eval(&self, x: f64, order: u8) -> f64 {
        let cells = self.values.len() - 1;
        let u = (x - self.start) / self.step;
        let i = (u.floor().max(0.0) as usize).min(cells - 1);
        let t = u - i as f64;
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        match order {
            0 => {
                (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                    + (t3 - 2.0 * t2 + t) * m0
                    + (-2.0 * t3 + 3.0 * t2) * y1
                    + (t3 - t2) * m1
            }
            1 => {
                ((6.0 * t2 - 6.0 * t) * y0
                    + (3.0 * t2 - 4.0 * t + 1.0) * m0
                    + (-6.0 * t2 + 6.0 * t) * y1
                    + (3.0 * t2 - 2.0 * t) * m1)
                    / h
            }
            2 => {
                ((12.0 * t - 6.0) * y0
                    + (6.0 * t - 4.0) * m0
                    + (-12.0 * t + 6.0) * y1
                    + (6.0 * t - 2.0) * m1)
                    / (h * h)
            }
            3 => (12.0 * y0 + 6.0 * m0 - 12.0 * y1 + 6.0 * m1) / (h * h * h),
            _ => 0.0,
        }
    }
}
