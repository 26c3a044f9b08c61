//! Cubic spline interpolation of sampled scalar functions of arc length.
//!
//! All curve data (curvature, torsion, twist angle) is supplied as samples on
//! a strictly increasing grid and evaluated through a natural cubic spline.
//! The spline is the single fixed interpolation rule of the crate: every
//! consumer (frame integration, metric evaluation, assembly quadrature) sees
//! the same underlying function.

use crate::{Error, Result};

/// Natural cubic spline through `(x_i, y_i)` with exact piecewise-polynomial
/// evaluation of value, derivative and antiderivative.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots (natural: zero at both ends).
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch(format!(
                "spline knots {} vs values {}",
                x.len(),
                y.len()
            )));
        }
        if x.is_empty() {
            return Err(Error::InvalidInput("empty spline data".into()));
        }
        for w in x.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidInput(format!(
                    "grid not strictly increasing at x = {}",
                    w[0]
                )));
            }
        }
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for the interior second derivatives,
            // solved by the Thomas algorithm.
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            let mut upper = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 2..n - 1 {
                let h0 = x[i] - x[i - 1];
                let w = h0 / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            for i in (1..n - 1).rev() {
                m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            }
        }
        Ok(Self {
            x: x.to_vec(),
            y: y.to_vec(),
            m,
        })
    }

    /// Spline through a single constant value on a trivial one-point grid.
    pub fn constant(x0: f64, value: f64) -> Self {
        Self {
            x: vec![x0],
            y: vec![value],
            m: vec![0.0],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    fn segment(&self, s: f64) -> usize {
        // Clamped lookup; evaluation outside the grid extends the end cubics.
        let n = self.x.len();
        if n < 2 || s <= self.x[0] {
            return 0;
        }
        if s >= self.x[n - 1] {
            return n - 2;
        }
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&s).expect("finite knot"))
        {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        if self.x.len() == 1 {
            return self.y[0];
        }
        let i = self.segment(s);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - s) / h;
        let b = (s - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn deriv(&self, s: f64) -> f64 {
        if self.x.len() == 1 {
            return 0.0;
        }
        let i = self.segment(s);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - s) / h;
        let b = (s - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((3.0 * b * b - 1.0) * self.m[i + 1] - (3.0 * a * a - 1.0) * self.m[i]) * h / 6.0
    }

    /// Exact integral of the spline over `[x[0], s]` (piecewise quartic
    /// antiderivative, no quadrature error).
    pub fn integral_from_start(&self, s: f64) -> f64 {
        if self.x.len() == 1 {
            return self.y[0] * (s - self.x[0]);
        }
        let seg = self.segment(s);
        let mut acc = 0.0;
        for i in 0..=seg {
            let upper = if i == seg { s } else { self.x[i + 1] };
            acc += self.segment_integral(i, self.x[i], upper);
        }
        acc
    }

    fn segment_integral(&self, i: usize, lo: f64, hi: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let prim = |s: f64| {
            let a = (self.x[i + 1] - s) / h;
            let b = (s - self.x[i]) / h;
            // Antiderivative of the Hermite form in the local variables.
            h * (-a * a / 2.0 * self.y[i] + b * b / 2.0 * self.y[i + 1])
                + h * h * h / 6.0
                    * (-(a * a * a * a / 4.0 - a * a / 2.0) * self.m[i]
                        + (b * b * b * b / 4.0 - b * b / 2.0) * self.m[i + 1])
        };
        prim(hi) - prim(lo)
    }

    /// Maximum absolute sampled value (sup norm proxy on the knots plus
    /// mid-segment probes, which is exact enough for hypothesis checks).
    pub fn sup_norm_estimate(&self) -> f64 {
        let mut sup = 0.0f64;
        for i in 0..self.x.len() {
            sup = sup.max(self.y[i].abs());
            if i + 1 < self.x.len() {
                for k in 1..4 {
                    let s = self.x[i] + (self.x[i + 1] - self.x[i]) * k as f64 / 4.0;
                    sup = sup.max(self.eval(s).abs());
                }
            }
        }
        sup
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid(n: usize, a: f64, b: f64) -> Vec<f64> {
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn reproduces_linear_data_exactly() {
        let x = grid(11, -2.0, 3.0);
        let y: Vec<f64> = x.iter().map(|s| 2.0 * s - 1.0).collect();
        let sp = CubicSpline::new(&x, &y).unwrap();
        for s in [-2.0, -1.37, 0.0, 0.5, 2.9, 3.0] {
            assert_relative_eq!(sp.eval(s), 2.0 * s - 1.0, epsilon = 1e-12);
            assert_relative_eq!(sp.deriv(s), 2.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn interpolates_smooth_function() {
        let x = grid(81, 0.0, std::f64::consts::PI);
        let y: Vec<f64> = x.iter().map(|s| s.sin()).collect();
        let sp = CubicSpline::new(&x, &y).unwrap();
        for k in 0..200 {
            let s = std::f64::consts::PI * k as f64 / 199.0;
            assert!((sp.eval(s) - s.sin()).abs() < 2e-6);
            assert!((sp.deriv(s) - s.cos()).abs() < 5e-4);
        }
    }

    #[test]
    fn integral_of_sin_over_half_period() {
        let x = grid(161, 0.0, std::f64::consts::PI);
        let y: Vec<f64> = x.iter().map(|s| s.sin()).collect();
        let sp = CubicSpline::new(&x, &y).unwrap();
        // The exact integral of the spline must be within interpolation error
        // of the true value 2.
        assert!((sp.integral_from_start(std::f64::consts::PI) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn integral_is_exact_for_the_spline_itself() {
        // Differentiating the reported antiderivative numerically must give
        // back the spline value; this checks the quartic primitive.
        let x = grid(13, 0.0, 4.0);
        let y: Vec<f64> = x.iter().map(|s| (s * 1.3).cos() + 0.2 * s).collect();
        let sp = CubicSpline::new(&x, &y).unwrap();
        let d = 1e-6;
        for s in [0.3, 1.0, 1.7, 2.9, 3.99] {
            let fd =
                (sp.integral_from_start(s + d) - sp.integral_from_start(s - d)) / (2.0 * d);
            assert_relative_eq!(fd, sp.eval(s), epsilon = 1e-7);
        }
    }

    #[test]
    fn rejects_non_increasing_grid() {
        assert!(CubicSpline::new(&[0.0, 0.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
        assert!(CubicSpline::new(&[0.0, 1.0], &[1.0]).is_err());
    }
}
