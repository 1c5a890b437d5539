//! Elastic limit penalty: zero inside `lambda * limit`, cubic up to the limit,
//! quadratic beyond it, twice continuously differentiable throughout.

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jfs {
    lambda: f64,
    a: f64,
    b: f64,
    c: f64,
}

impl Jfs {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "elastic coefficient must lie in (0, 1], got {lambda}"
            )));
        }
        let r = 1.0 - lambda;
        let a = 3.0 * r;
        let b = 3.0 * r * r - 6.0 * r;
        let c = r * r * r - a - b;
        Ok(Self { lambda, a, b, c })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Quadratic-branch coefficients for `x >= 1`.
    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.a, self.b, self.c)
    }

    /// Value, first and second derivative of the even shape in the
    /// normalized variable `x`.
    pub fn shape(&self, x: f64) -> (f64, f64, f64) {
        let s = if x < 0.0 { -1.0 } else { 1.0 };
        let y = x.abs();
        let (f, d1, d2) = if y <= self.lambda {
            (0.0, 0.0, 0.0)
        } else if y < 1.0 {
            let e = y - self.lambda;
            (e * e * e, 3.0 * e * e, 6.0 * e)
        } else {
            (
                self.a * y * y + self.b * y + self.c,
                2.0 * self.a * y + self.b,
                2.0 * self.a,
            )
        };
        (f, s * d1, d2)
    }

    /// Penalty of `c` against `c_max` (used when `c >= 0`) or `c_min`
    /// (used when `c < 0`), with its derivative in `c`.
    pub fn eval(&self, c: f64, c_max: f64, c_min: f64) -> (f64, f64) {
        let c_m = if c >= 0.0 { c_max } else { c_min };
        if c_m == 0.0 {
            return (0.0, 0.0);
        }
        let x = c / c_m;
        let (f, d1, _) = self.shape(x);
        (f, d1 / c_m)
    }
}

/// One-shot evaluation; prefer [`Jfs`] when the coefficient is reused.
pub fn jfs(c: f64, c_max: f64, c_min: f64, lambda: f64) -> Result<(f64, f64)> {
    Ok(Jfs::new(lambda)?.eval(c, c_max, c_min))
}
