//! Nonnegative reals extended with `+inf`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A value in `[0, +inf]`.
///
/// Addition absorbs `+inf`; scaling by `0` gives `0` even for `+inf`, which
/// is the convention needed for `0 * A` on operators with infinite norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinite,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Builds a finite value, clamping tiny negative round-off to zero.
    ///
    /// Panics on NaN or on values below `-1e-12`.
    pub fn finite(v: f64) -> Self {
        assert!(!v.is_nan(), "ExtReal from NaN");
        if v == f64::INFINITY {
            return ExtReal::Infinite;
        }
        assert!(v >= -1e-12, "ExtReal must be nonnegative, got {v}");
        ExtReal::Finite(v.max(0.0))
    }

    /// Like [`ExtReal::finite`] but clamps any negative value to zero.
    pub fn clamped(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::Infinite
        } else {
            ExtReal::Finite(v.max(0.0))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::Infinite => None,
        }
    }

    /// `f64` view, with `+inf` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::Infinite => f64::INFINITY,
        }
    }

    /// Scales by `alpha >= 0` with `0 * inf = 0`.
    pub fn scale(self, alpha: f64) -> Self {
        assert!(alpha >= 0.0, "ExtReal scale must be nonnegative");
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(alpha * v),
            ExtReal::Infinite if alpha == 0.0 => ExtReal::ZERO,
            ExtReal::Infinite => ExtReal::Infinite,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// `self <= other` up to `tol` scaled by the finite magnitudes involved.
    pub fn approx_le(self, other: Self, tol: f64) -> bool {
        match (self, other) {
            (_, ExtReal::Infinite) => true,
            (ExtReal::Infinite, ExtReal::Finite(_)) => false,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => crate::tol::approx_le(a, b, tol),
        }
    }

    /// Equality where both infinite counts as equal.
    pub fn approx_eq(self, other: Self, tol: f64) -> bool {
        match (self, other) {
            (ExtReal::Infinite, ExtReal::Infinite) => true,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => crate::tol::approx_eq(a, b, tol),
            _ => false,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::Infinite,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Infinite, ExtReal::Infinite) => Some(Ordering::Equal),
            (ExtReal::Infinite, _) => Some(Ordering::Greater),
            (_, ExtReal::Infinite) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::finite(v)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::Infinite => f.write_str("+inf"),
        }
    }
}

// JSON has no infinity literal: finite values are numbers, +inf is the string "+inf".
impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::Infinite => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct ExtVisitor;

        impl Visitor<'_> for ExtVisitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or \"+inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtReal, E> {
                if v.is_nan() || v < 0.0 {
                    return Err(E::custom("ExtReal must be nonnegative"));
                }
                Ok(ExtReal::finite(v))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtReal, E> {
                Ok(ExtReal::Finite(v as f64))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtReal, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtReal, E> {
                match v {
                    "+inf" | "inf" => Ok(ExtReal::Infinite),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        d.deserialize_any(ExtVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_addition() {
        assert_eq!(ExtReal::Infinite + ExtReal::Finite(3.0), ExtReal::Infinite);
        assert_eq!(ExtReal::Finite(1.0) + ExtReal::Finite(2.0), ExtReal::Finite(3.0));
    }

    #[test]
    fn zero_times_infinity_is_zero() {
        assert_eq!(ExtReal::Infinite.scale(0.0), ExtReal::ZERO);
        assert_eq!(ExtReal::Infinite.scale(2.0), ExtReal::Infinite);
    }

    #[test]
    fn ordering_puts_infinity_on_top() {
        assert!(ExtReal::Infinite > ExtReal::Finite(1e300));
        assert!(ExtReal::Finite(1.0) < ExtReal::Finite(2.0));
        assert!(ExtReal::Finite(5.0).approx_le(ExtReal::Infinite, 1e-9));
        assert!(!ExtReal::Infinite.approx_le(ExtReal::Finite(5.0), 1e-9));
    }

    #[test]
    fn json_encoding() {
        let v = vec![ExtReal::Finite(1.5), ExtReal::Infinite];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[1.5,"+inf"]"#);
        let back: Vec<ExtReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
