//! Floating comparisons with an absolute tolerance scaled by magnitude.

use serde::{Deserialize, Serialize};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Absolute tolerance applied as `tol * max(1, |a|, |b|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance(pub f64);

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance(DEFAULT_TOL)
    }
}

impl Tolerance {
    pub fn le(self, a: f64, b: f64) -> bool {
        approx_le(a, b, self.0)
    }

    pub fn eq(self, a: f64, b: f64) -> bool {
        approx_eq(a, b, self.0)
    }

    pub fn slack(self, a: f64, b: f64) -> f64 {
        scaled(a, b, self.0)
    }
}

pub fn scaled(a: f64, b: f64, tol: f64) -> f64 {
    tol * 1f64.max(a.abs()).max(b.abs())
}

pub fn approx_le(a: f64, b: f64, tol: f64) -> bool {
    if b == f64::INFINITY {
        return true;
    }
    if a == f64::INFINITY {
        return false;
    }
    a <= b + scaled(a, b, tol)
}

pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= scaled(a, b, tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_scales_with_magnitude() {
        assert!(approx_eq(1e6, 1e6 + 1e-4, 1e-9));
        assert!(!approx_eq(1.0, 1.0 + 1e-6, 1e-9));
        assert!(approx_le(1.0 + 5e-10, 1.0, 1e-9));
        assert!(approx_le(3.0, f64::INFINITY, 1e-9));
        assert!(!approx_le(f64::INFINITY, 3.0, 1e-9));
    }
}
