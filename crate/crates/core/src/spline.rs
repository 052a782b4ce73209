use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Natural cubic spline through samples on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CubicTable {
    x0: f64,
    h: f64,
    y: Vec<f64>,
    m: Vec<f64>,
    // Antiderivative at each knot, anchored at x0.
    cumulative: Vec<f64>,
}

impl CubicTable {
    pub fn new(x0: f64, h: f64, y: Vec<f64>) -> Result<Self> {
        if y.len() < 3 {
            return Err(invalid("table", "needs at least three samples"));
        }
        if !(h > 0.0 && h.is_finite() && x0.is_finite()) {
            return Err(invalid("table", "grid spacing must be positive and finite"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(invalid("table", "samples must be finite"));
        }
        let n = y.len();
        // Thomas algorithm for the natural-spline moments.
        let mut m = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        for i in 1..n - 1 {
            let rhs = 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h);
            let denom = 4.0 - c[i - 1];
            c[i] = 1.0 / denom;
            d[i] = (rhs - d[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d[i] - c[i] * m[i + 1];
        }
        let mut cumulative = vec![0.0; n];
        for i in 1..n {
            let seg = h * (y[i - 1] + y[i]) / 2.0 - h * h * h * (m[i - 1] + m[i]) / 24.0;
            cumulative[i] = cumulative[i - 1] + seg;
        }
        Ok(Self { x0, h, y, m, cumulative })
    }

    pub fn lo(&self) -> f64 {
        self.x0
    }

    pub fn hi(&self) -> f64 {
        self.x0 + self.h * (self.y.len() - 1) as f64
    }

    pub fn first(&self) -> f64 {
        self.y[0]
    }

    pub fn last(&self) -> f64 {
        self.y[self.y.len() - 1]
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo() && x <= self.hi()
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.y.len();
        let t = (x - self.x0) / self.h;
        let i = (t.max(0.0) as usize).min(n - 2);
        (i, x - (self.x0 + i as f64 * self.h))
    }

    /// Value at `x`; caller guarantees `x` is inside the table.
    pub fn value(&self, x: f64) -> f64 {
        let (i, u) = self.locate(x);
        let h = self.h;
        let w = h - u;
        (self.m[i] * w * w * w + self.m[i + 1] * u * u * u) / (6.0 * h)
            + (self.y[i] / h - self.m[i] * h / 6.0) * w
            + (self.y[i + 1] / h - self.m[i + 1] * h / 6.0) * u
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (i, u) = self.locate(x);
        let h = self.h;
        let w = h - u;
        (-self.m[i] * w * w + self.m[i + 1] * u * u) / (2.0 * h) + (self.y[i + 1] - self.y[i]) / h
            - (self.m[i + 1] - self.m[i]) * h / 6.0
    }

    /// Integral of the spline from the table start to `x`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let (i, u) = self.locate(x);
        let h = self.h;
        let w = h - u;
        let a = self.y[i] / h - self.m[i] * h / 6.0;
        let b = self.y[i + 1] / h - self.m[i + 1] * h / 6.0;
        let partial = (self.m[i] * (h.powi(4) - w.powi(4)) + self.m[i + 1] * u.powi(4)) / (24.0 * h)
            + a * (h * h - w * w) / 2.0
            + b * u * u / 2.0;
        self.cumulative[i] + partial
    }
}
