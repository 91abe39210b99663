//! Exact fixed-point money and the infinity-aware cost type.
//!
//! All costs in this crate are nonnegative fixed-point numbers with six decimal
//! digits, stored as integer micro-units in a `u64`. Cost accounting is therefore
//! exact: sums of purchases never accumulate floating-point error, and equality
//! comparisons in tests are meaningful. Probabilities and multiplicative weights
//! stay in `f64` (see the algorithm modules); only *spend* is fixed-point.
//!
//! "Unavailable" (an element no set covers, a client/facility pair that cannot be
//! connected) is represented by [`Cost::Infinite`], a dedicated sentinel. Infinity
//! never participates in arithmetic as a large finite number; adding anything to
//! it yields infinity, and minimization skips it explicitly.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of micro-units per whole money unit.
pub const MONEY_SCALE: u64 = 1_000_000;

/// Largest micro-unit count that converts to `f64` and back without loss (2^53).
const MAX_EXACT_MICROS: u64 = 1 << 53;

/// Exact nonnegative fixed-point money: `micros / 1_000_000` whole units.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Money(u64);

impl Money {
    pub const ZERO: Money = Money(0);

    /// One micro-unit: the smallest representable positive amount.
    pub const EPSILON: Money = Money(1);

    /// Construct from whole units (e.g. `from_units(3)` is 3.0).
    pub fn from_units(units: u64) -> Money {
        Money(
            units
                .checked_mul(MONEY_SCALE)
                .expect("money overflow: units out of range"),
        )
    }

    /// Construct from raw micro-units.
    pub const fn from_micros(micros: u64) -> Money {
        Money(micros)
    }

    /// Raw micro-unit count.
    pub const fn micros(self) -> u64 {
        self.0
    }

    /// Convert a real number to money, rounding to the nearest micro-unit.
    ///
    /// Rejects negatives, non-finite values, and values too large to round-trip
    /// exactly through `f64`.
    pub fn from_f64(value: f64) -> Result<Money> {
        if !value.is_finite() {
            return Err(Error::Money(format!("{value} is not finite")));
        }
        if value < 0.0 {
            return Err(Error::Money(format!("{value} is negative")));
        }
        let micros = (value * MONEY_SCALE as f64).round();
        if micros > MAX_EXACT_MICROS as f64 {
            return Err(Error::Money(format!("{value} exceeds the exact range")));
        }
        Ok(Money(micros as u64))
    }

    /// The value as a real number (exact for amounts below ~9e9 whole units).
    pub fn as_f64(self) -> f64 {
        self.0 as f64 / MONEY_SCALE as f64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn checked_add(self, rhs: Money) -> Option<Money> {
        self.0.checked_add(rhs.0).map(Money)
    }

    /// Subtraction clamped at zero.
    pub fn saturating_sub(self, rhs: Money) -> Money {
        Money(self.0.saturating_sub(rhs.0))
    }

    /// Multiply by a small integer count (e.g. a stage-2 markup factor).
    pub fn scaled(self, count: u32) -> Money {
        Money(
            self.0
                .checked_mul(count as u64)
                .expect("money overflow: scaled amount out of range"),
        )
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(
            self.0
                .checked_add(rhs.0)
                .expect("money overflow in addition"),
        )
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        *self = *self + rhs;
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(
            self.0
                .checked_sub(rhs.0)
                .expect("money underflow in subtraction"),
        )
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        iter.fold(Money::ZERO, |acc, x| acc + x)
    }
}

impl fmt::Display for Money {
    /// Canonical decimal rendering: no trailing zeros, no trailing dot.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let units = self.0 / MONEY_SCALE;
        let frac = self.0 % MONEY_SCALE;
        if frac == 0 {
            write!(f, "{units}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{units}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl fmt::Debug for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Money({self})")
    }
}

impl Serialize for Money {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.as_f64())
    }
}

impl<'de> Deserialize<'de> for Money {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Money, D::Error> {
        let value = f64::deserialize(deserializer)?;
        Money::from_f64(value).map_err(de::Error::custom)
    }
}

/// A cost that may be unavailable. `Finite(_) < Infinite` under `Ord`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Cost {
    Finite(Money),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(Money::ZERO);

    pub fn is_finite(self) -> bool {
        matches!(self, Cost::Finite(_))
    }

    /// The finite amount, or `None` for infinity.
    pub fn finite(self) -> Option<Money> {
        match self {
            Cost::Finite(m) => Some(m),
            Cost::Infinite => None,
        }
    }

    /// The finite amount; panics on infinity (use only where finiteness is guaranteed).
    pub fn expect_finite(self, context: &str) -> Money {
        match self {
            Cost::Finite(m) => m,
            Cost::Infinite => panic!("unexpected infinite cost: {context}"),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Cost::Finite(m) => m.as_f64(),
            Cost::Infinite => f64::INFINITY,
        }
    }
}

impl From<Money> for Cost {
    fn from(m: Money) -> Cost {
        Cost::Finite(m)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Add<Money> for Cost {
    type Output = Cost;
    fn add(self, rhs: Money) -> Cost {
        self + Cost::Finite(rhs)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(m) => write!(f, "{m}"),
            Cost::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Cost {
    /// Finite costs serialize as numbers; infinity as the literal string `"inf"`.
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cost::Finite(m) => m.serialize(serializer),
            Cost::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Cost, D::Error> {
        struct CostVisitor;

        impl Visitor<'_> for CostVisitor {
            type Value = Cost;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or the string \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Cost, E> {
                Money::from_f64(v).map(Cost::Finite).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Cost, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Cost, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Cost, E> {
                if v == "inf" {
                    Ok(Cost::Infinite)
                } else {
                    Err(E::custom(format!(
                        "expected a number or \"inf\", found string {v:?}"
                    )))
                }
            }
        }

        deserializer.deserialize_any(CostVisitor)
    }
}
