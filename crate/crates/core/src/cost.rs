//! Nonnegative costs extended with `+∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

/// A nonnegative real or `+∞`. Serializes `+∞` as the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedCost {
    Finite(f64),
    Infinite,
}

impl ExtendedCost {
    pub const ZERO: ExtendedCost = ExtendedCost::Finite(0.0);

    /// Wraps a finite nonnegative value. `+∞` maps to [`ExtendedCost::Infinite`].
    ///
    /// Panics on negative or NaN input.
    pub fn new(value: f64) -> Self {
        assert!(value >= 0.0, "cost must be nonnegative, got {value}");
        if value.is_infinite() {
            ExtendedCost::Infinite
        } else {
            ExtendedCost::Finite(value)
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedCost::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            ExtendedCost::Finite(v) => Some(v),
            ExtendedCost::Infinite => None,
        }
    }

    /// The value as an `f64`, with `+∞` for [`ExtendedCost::Infinite`].
    pub fn to_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Scales by a nonnegative weight, with `0 · ∞ = 0`.
    pub fn weighted(&self, w: f64) -> ExtendedCost {
        match *self {
            _ if w == 0.0 => ExtendedCost::ZERO,
            ExtendedCost::Finite(v) => ExtendedCost::new(v * w),
            ExtendedCost::Infinite => ExtendedCost::Infinite,
        }
    }

    pub fn min(self, other: ExtendedCost) -> ExtendedCost {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Add for ExtendedCost {
    type Output = ExtendedCost;
    fn add(self, rhs: ExtendedCost) -> ExtendedCost {
        match (self, rhs) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => ExtendedCost::Finite(a + b),
            _ => ExtendedCost::Infinite,
        }
    }
}

impl PartialOrd for ExtendedCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtendedCost::Finite(a), ExtendedCost::Finite(b)) => a.partial_cmp(b),
            (ExtendedCost::Finite(_), ExtendedCost::Infinite) => Some(Ordering::Less),
            (ExtendedCost::Infinite, ExtendedCost::Finite(_)) => Some(Ordering::Greater),
            (ExtendedCost::Infinite, ExtendedCost::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtendedCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedCost::Finite(v) => write!(f, "{v}"),
            ExtendedCost::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedCost {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedCost::Finite(v) => s.serialize_f64(*v),
            ExtendedCost::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedCost {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct CostVisitor;
        impl Visitor<'_> for CostVisitor {
            type Value = ExtendedCost;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or the string \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<ExtendedCost, E> {
                if v >= 0.0 && v.is_finite() {
                    Ok(ExtendedCost::Finite(v))
                } else {
                    Err(E::custom(format!("invalid cost {v}")))
                }
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ExtendedCost, E> {
                Ok(ExtendedCost::Finite(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ExtendedCost, E> {
                self.visit_f64(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ExtendedCost, E> {
                if v == "inf" {
                    Ok(ExtendedCost::Infinite)
                } else {
                    Err(E::custom(format!("unexpected string {v:?}")))
                }
            }
        }
        d.deserialize_any(CostVisitor)
    }
}
