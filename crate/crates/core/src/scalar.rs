//! Nonnegative scalars of the max-times semiring.
//!
//! A [`MaxScalar`] stores a value `m * 2^e` with `m` in `[1, 2)` and an
//! unbounded `i64` binary exponent, i.e. its base-2 logarithm split into an
//! integer and a fractional part. Products never overflow or underflow, so
//! factors like `2^(-2^20)` are carried exactly, and conversion from `f64`
//! is lossless.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

const MANT_MASK: u64 = (1u64 << 52) - 1;
const ZERO_EXP: i64 = i64::MIN;

#[derive(Clone, Copy, PartialEq)]
pub struct MaxScalar {
    mant: f64,
    exp: i64,
}

/// Splits a positive finite `x` into `(m, e)` with `m` in `[1, 2)`.
fn frexp(x: f64) -> (f64, i64) {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let biased = ((bits >> 52) & 0x7ff) as i64;
    if biased == 0 {
        // subnormal: rescale exactly into the normal range
        let (m, e) = frexp(x * f64::from_bits((1023 + 64) << 52));
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & MANT_MASK) | (1023u64 << 52));
    (m, biased - 1023)
}

/// `2^e` for `e` in the normal exponent range.
fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

#[allow(clippy::should_implement_trait)]
impl MaxScalar {
    pub const ZERO: MaxScalar = MaxScalar { mant: 0.0, exp: ZERO_EXP };
    pub const ONE: MaxScalar = MaxScalar { mant: 1.0, exp: 0 };

    /// Returns `None` for negative, NaN or infinite input.
    pub fn new(x: f64) -> Option<Self> {
        if !x.is_finite() || x < 0.0 {
            return None;
        }
        if x == 0.0 {
            return Some(Self::ZERO);
        }
        let (mant, exp) = frexp(x);
        Some(MaxScalar { mant, exp })
    }

    /// Panics on invalid input; for literals and values known to be valid.
    pub fn from_f64(x: f64) -> Self {
        Self::new(x).unwrap_or_else(|| panic!("not a nonnegative finite value: {x}"))
    }

    /// `2^l`; `l = -inf` gives zero.
    pub fn from_log2(l: f64) -> Self {
        if l == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        assert!(l.is_finite(), "log2 value must be finite or -inf, got {l}");
        let e = l.floor();
        let mut mant = (l - e).exp2();
        let mut exp = e as i64;
        if mant >= 2.0 {
            mant *= 0.5;
            exp += 1;
        }
        MaxScalar { mant, exp }
    }

    /// `2^e` exactly.
    pub fn pow2(e: i64) -> Self {
        MaxScalar { mant: 1.0, exp: e }
    }

    pub fn is_zero(self) -> bool {
        self.exp == ZERO_EXP
    }

    /// Nearest `f64`; saturates to `inf` or flushes to `0` outside its range.
    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            0.0
        } else if self.exp > 1023 {
            f64::INFINITY
        } else if self.exp >= -1022 {
            self.mant * pow2(self.exp)
        } else if self.exp >= -1200 {
            // the first product is exact, the second rounds once into the subnormals
            self.mant * pow2(self.exp + 200) * pow2(-200)
        } else {
            0.0
        }
    }

    pub fn log2(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.exp as f64 + self.mant.log2()
        }
    }

    pub fn ln(self) -> f64 {
        self.log2() * std::f64::consts::LN_2
    }

    pub fn mantissa(self) -> f64 {
        self.mant
    }

    pub fn exponent(self) -> i64 {
        self.exp
    }

    pub fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::ZERO;
        }
        let mut mant = self.mant * rhs.mant;
        let mut exp = self.exp + rhs.exp;
        if mant >= 2.0 {
            mant *= 0.5;
            exp += 1;
        }
        MaxScalar { mant, exp }
    }

    /// Division; `rhs` must be nonzero.
    pub fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "division by zero in max algebra");
        if self.is_zero() {
            return Self::ZERO;
        }
        let mut mant = self.mant / rhs.mant;
        let mut exp = self.exp - rhs.exp;
        if mant < 1.0 {
            mant *= 2.0;
            exp -= 1;
        }
        MaxScalar { mant, exp }
    }

    /// The ⊕ of the semiring.
    pub fn max(self, rhs: Self) -> Self {
        if rhs > self {
            rhs
        } else {
            self
        }
    }

    pub fn min(self, rhs: Self) -> Self {
        if rhs < self {
            rhs
        } else {
            self
        }
    }

    pub fn powi(self, k: u64) -> Self {
        let mut base = self;
        let mut acc = Self::ONE;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            k >>= 1;
        }
        acc
    }

    /// `self^p` for real `p > 0`, through the logarithm.
    pub fn powf(self, p: f64) -> Self {
        assert!(p > 0.0, "exponent must be positive");
        if self.is_zero() {
            return Self::ZERO;
        }
        if self.mant == 1.0 && p == 1.0 {
            return self;
        }
        Self::from_log2(self.exp as f64 * p + self.mant.log2() * p)
    }

    /// k-th root.
    pub fn root(self, k: usize) -> Self {
        assert!(k >= 1, "root index must be positive");
        if k == 1 {
            self
        } else {
            self.powf(1.0 / k as f64)
        }
    }

    fn from_parts(mant: f64, exp: i64) -> Self {
        if mant == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = frexp(mant);
        MaxScalar { mant: m, exp: exp + e }
    }

    /// `|self - rhs|` in ordinary arithmetic, without leaving the scaled representation.
    pub fn abs_diff(self, rhs: Self) -> Self {
        let (hi, lo) = if self >= rhs { (self, rhs) } else { (rhs, self) };
        if lo.is_zero() {
            return hi;
        }
        let shift = hi.exp - lo.exp;
        if shift > 1100 {
            return hi;
        }
        let lo_scaled = if shift <= 1000 {
            lo.mant * f64::from_bits(((1023 - shift) as u64) << 52)
        } else {
            0.0
        };
        Self::from_parts(hi.mant - lo_scaled, hi.exp)
    }

    /// Ordinary sum.
    pub fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self >= rhs { (self, rhs) } else { (rhs, self) };
        if lo.is_zero() {
            return hi;
        }
        let shift = hi.exp - lo.exp;
        if shift > 1000 {
            return hi;
        }
        let lo_scaled = lo.mant * f64::from_bits(((1023 - shift) as u64) << 52);
        Self::from_parts(hi.mant + lo_scaled, hi.exp)
    }

    /// Ordinary product with a nonnegative real.
    pub fn scale(self, c: f64) -> Self {
        self.mul(Self::from_f64(c))
    }

    /// Relative distance `|a - b| / max(a, b)`, zero when both vanish.
    pub fn rel_diff(self, rhs: Self) -> f64 {
        let hi = self.max(rhs);
        if hi.is_zero() {
            return 0.0;
        }
        self.abs_diff(rhs).div(hi).to_f64()
    }
}

impl Default for MaxScalar {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Eq for MaxScalar {}

impl Ord for MaxScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exp
            .cmp(&other.exp)
            .then_with(|| self.mant.total_cmp(&other.mant))
    }
}

impl PartialOrd for MaxScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MaxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0")
        } else if (-1000..=1000).contains(&self.exp) {
            write!(f, "{}", self.to_f64())
        } else {
            write!(f, "{}*2^{}", self.mant, self.exp)
        }
    }
}

impl fmt::Display for MaxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl From<MaxScalar> for f64 {
    fn from(s: MaxScalar) -> f64 {
        s.to_f64()
    }
}

impl Serialize for MaxScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

impl<'de> Deserialize<'de> for MaxScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let x = f64::deserialize(d)?;
        MaxScalar::new(x).ok_or_else(|| serde::de::Error::custom(format!("invalid max scalar {x}")))
    }
}
