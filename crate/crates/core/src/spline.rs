//! Natural cubic spline interpolation on non-uniform knots.

use crate::error::{Error, Result};

/// A natural cubic spline (second derivative zero at both ends).
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Second derivatives at the knots.
    m2: Vec<f64>,
}

impl CubicSpline {
    /// Fit a natural spline through `(xs[i], ys[i])`. Knots must be strictly
    /// increasing and at least two.
    pub fn natural(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::InvalidArgument(format!(
                "knot count mismatch: {} vs {}",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < 2 {
            return Err(Error::InvalidArgument(
                "spline needs at least 2 knots".into(),
            ));
        }
        for i in 1..xs.len() {
            if xs[i] <= xs[i - 1] {
                return Err(Error::InvalidArgument(format!(
                    "knots must be strictly increasing at index {i}"
                )));
            }
        }

        let n = xs.len();
        let mut m2 = vec![0.0; n];
        if n > 2 {
            // Tridiagonal solve for interior second derivatives,
            // m2[0] = m2[n-1] = 0.
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                diag[i] = 2.0 * (h0 + h1);
                rhs[i] = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
            }
            // forward elimination
            for i in 2..n - 1 {
                let h = xs[i] - xs[i - 1];
                let factor = h / diag[i - 1];
                diag[i] -= factor * h;
                rhs[i] -= factor * rhs[i - 1];
            }
            // back substitution
            m2[n - 2] = rhs[n - 2] / diag[n - 2];
            for i in (1..n - 2).rev() {
                let h = xs[i + 1] - xs[i];
                m2[i] = (rhs[i] - h * m2[i + 1]) / diag[i];
            }
        }
        Ok(Self { xs, ys, m2 })
    }

    /// Evaluate at `x`; outside the knot range the boundary polynomial
    /// extrapolates.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let mut lo = 0;
        let mut hi = n - 1;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if self.xs[mid] > x {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let h = self.xs[hi] - self.xs[lo];
        let a = (self.xs[hi] - x) / h;
        let b = (x - self.xs[lo]) / h;
        a * self.ys[lo]
            + b * self.ys[hi]
            + ((a * a * a - a) * self.m2[lo] + (b * b * b - b) * self.m2[hi]) * h * h / 6.0
    }
}
