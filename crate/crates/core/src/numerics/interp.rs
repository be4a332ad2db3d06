//! Shape-preserving piecewise cubic Hermite interpolation (Fritsch–Carlson slopes).

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() || m0 == 0.0 {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

impl MonotoneCubic {
    /// Needs at least two nodes with strictly increasing `x`.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return domain("monotone cubic needs at least two (x, y) pairs of equal length");
        }
        if x.windows(2).any(|w| !(w[0] < w[1])) || y.iter().any(|v| !v.is_finite()) {
            return domain("monotone cubic nodes must be finite with strictly increasing x");
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let m: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = m[0];
            d[1] = m[0];
        } else {
            for k in 1..n - 1 {
                if m[k - 1] * m[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / m[k - 1] + w2 / m[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], m[0], m[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], m[n - 2], m[n - 3]);
        }
        Ok(MonotoneCubic { x, y, d })
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.x, &self.y)
    }

    pub fn x_range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn locate(&self, x: f64) -> usize {
        let k = self.x.partition_point(|&v| v <= x);
        k.clamp(1, self.x.len() - 1) - 1
    }

    /// Clamped to the end values outside the node range.
    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range();
        if x <= lo {
            return self.y[0];
        }
        if x >= hi {
            return self.y[self.y.len() - 1];
        }
        let k = self.locate(x);
        let h = self.x[k + 1] - self.x[k];
        let t = (x - self.x[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.y[k] + h10 * h * self.d[k] + h01 * self.y[k + 1] + h11 * h * self.d[k + 1]
    }

    /// Zero outside the node range.
    pub fn derivative(&self, x: f64) -> f64 {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return 0.0;
        }
        let k = self.locate(x);
        let h = self.x[k + 1] - self.x[k];
        let t = (x - self.x[k]) / h;
        let t2 = t * t;
        let dy = self.y[k + 1] - self.y[k];
        (6.0 * t - 6.0 * t2) * dy / h + (3.0 * t2 - 4.0 * t + 1.0) * self.d[k] + (3.0 * t2 - 2.0 * t) * self.d[k + 1]
    }

    /// `x` with `eval(x) = y` for non-decreasing data, by bisection inside the bracketing node pair.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        let n = self.y.len();
        if self.y.windows(2).any(|w| w[1] < w[0]) {
            return domain("inverse needs non-decreasing node values");
        }
        if !(y >= self.y[0] && y <= self.y[n - 1]) {
            return domain(format!("value {y} outside the interpolated range"));
        }
        let k = self.y.partition_point(|&v| v < y).clamp(1, n - 1) - 1;
        let (mut a, mut b) = (self.x[k], self.x[k + 1]);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if self.eval(mid) < y {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(0.5 * (a + b))
    }
}
