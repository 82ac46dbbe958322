//! Fixed-point circle arithmetic and Sturmian codings.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};

/// A point of the circle ℝ/ℤ stored as `value / 2^128`.
///
/// Addition wraps, so rotation orbits never leave the unit interval and
/// accumulate no drift.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircleFraction(pub u128);

/// Smallest denominator a rotation parameter's close rational approximants
/// may have.
pub const MIN_GUARD_DENOMINATOR: u64 = 1 << 24;

impl CircleFraction {
    pub const ZERO: CircleFraction = CircleFraction(0);
    pub const HALF: CircleFraction = CircleFraction(1 << 127);

    /// `(√5 − 1)/2`.
    pub fn golden() -> Self {
        let two128 = BigUint::one() << 128u32;
        let root = (BigUint::from(5u32) << 256u32).sqrt();
        CircleFraction(to_u128((root - two128) >> 1u32))
    }

    /// `√2 − 1`.
    pub fn sqrt2_minus_one() -> Self {
        let root = (BigUint::from(2u32) << 256u32).sqrt();
        CircleFraction(to_u128(root - (BigUint::one() << 128u32)))
    }

    /// `⌊p · 2^128 / q⌋` for `p < q`.
    pub fn from_ratio(p: u64, q: u64) -> Result<Self> {
        if q == 0 || p >= q {
            return Err(invalid(format!("{p}/{q} is not in [0, 1)")));
        }
        Ok(CircleFraction(to_u128((BigUint::from(p) << 128u32) / q)))
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2f64.powi(128)
    }

    pub fn wrapping_add(self, other: Self) -> Self {
        CircleFraction(self.0.wrapping_add(other.0))
    }

    pub fn wrapping_sub(self, other: Self) -> Self {
        CircleFraction(self.0.wrapping_sub(other.0))
    }

    /// `frac(n · self)`.
    pub fn times(self, n: u64) -> Self {
        CircleFraction(self.0.wrapping_mul(n as u128))
    }

    /// `1 − self` (and `0` for `0`).
    pub fn negate(self) -> Self {
        CircleFraction(self.0.wrapping_neg())
    }

    /// Wrap-around distance `min(|t|, 1 − |t|)` as a fraction of the circle.
    pub fn circle_distance(self, other: Self) -> Self {
        let d = self.0.wrapping_sub(other.0);
        CircleFraction(d.min(d.wrapping_neg()))
    }

    /// Denominator of the first continued-fraction convergent within 2^-64
    /// of `self`.
    pub fn guard_denominator(self) -> BigUint {
        let one = BigUint::one();
        let scale = BigUint::one() << 128u32;
        let (mut num, mut den) = (BigUint::from(self.0), scale.clone());
        let (mut q_prev, mut q) = (BigUint::zero(), one.clone());
        let (mut p_prev, mut p) = (one.clone(), BigUint::zero());
        let tolerance = BigUint::one() << 64u32;
        loop {
            // |α − p/q| < 2^-64  ⇔  |α·2^128·q − p·2^128| · 2^64 < 2^128 · q
            let a_scaled = BigUint::from(self.0) * &q;
            let p_scaled = &p << 128u32;
            let diff = if a_scaled > p_scaled { a_scaled - p_scaled } else { p_scaled - a_scaled };
            if diff * &tolerance < &scale * &q || num.is_zero() {
                return q;
            }
            let (a, r) = den.div_rem(&num);
            den = num;
            num = r;
            let p_next = &a * &p + &p_prev;
            let q_next = &a * &q + &q_prev;
            p_prev = std::mem::replace(&mut p, p_next);
            q_prev = std::mem::replace(&mut q, q_next);
        }
    }

    /// Rejects parameters that sit too close to a rational with small
    /// denominator for a coding of length 10^7 to look aperiodic.
    pub fn check_irrational(self) -> Result<()> {
        if self.0 == 0 {
            return Err(Error::RationalRotation { denominator: "1".into() });
        }
        let q = self.guard_denominator();
        if q <= BigUint::from(MIN_GUARD_DENOMINATOR) {
            return Err(Error::RationalRotation { denominator: q.to_string() });
        }
        Ok(())
    }
}

fn to_u128(v: BigUint) -> u128 {
    v.to_u128().expect("value below 2^128")
}

impl FromStr for CircleFraction {
    type Err = Error;

    /// Accepts `golden`, `sqrt2`, `p/q`, decimals such as `0.0123`, and
    /// `0x…` raw fixed-point values.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "golden" => return Ok(CircleFraction::golden()),
            "sqrt2" => return Ok(CircleFraction::sqrt2_minus_one()),
            _ => {}
        }
        if let Some(hex) = s.strip_prefix("0x") {
            return u128::from_str_radix(hex, 16)
                .map(CircleFraction)
                .map_err(|e| invalid(format!("bad fraction `{s}`: {e}")));
        }
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse().map_err(|_| invalid(format!("bad fraction `{s}`")))?;
            let q = q.trim().parse().map_err(|_| invalid(format!("bad fraction `{s}`")))?;
            return CircleFraction::from_ratio(p, q);
        }
        let digits = s
            .strip_prefix("0.")
            .or_else(|| s.strip_prefix('.'))
            .or(if s == "0" { Some("") } else { None })
            .ok_or_else(|| invalid(format!("bad fraction `{s}`")))?;
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid(format!("bad fraction `{s}`")));
        }
        let numer = if digits.is_empty() { BigUint::zero() } else { digits.parse::<BigUint>().expect("digits") };
        let denom = BigUint::from(10u32).pow(digits.len() as u32);
        Ok(CircleFraction(to_u128((numer << 128u32) / denom)))
    }
}

impl fmt::Display for CircleFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0x{:032x}", self.0)
    }
}

impl Serialize for CircleFraction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CircleFraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Symbol `i` of the coding: 1 iff `frac(β + iα) ∈ [1 − α, 1)`.
pub fn sturmian_symbol(alpha: CircleFraction, beta: CircleFraction, i: u64) -> u8 {
    let v = beta.wrapping_add(alpha.times(i));
    u8::from(v.0 >= alpha.negate().0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_value() {
        let g = CircleFraction::golden();
        assert!((g.to_f64() - 0.618_033_988_749_895).abs() < 1e-15);
        // g satisfies g² + g = 1 to within the fixed-point resolution
        let gb = BigUint::from(g.0);
        let lhs = &gb * &gb + (&gb << 128u32);
        let one = BigUint::one() << 256u32;
        let err = if lhs > one { lhs - &one } else { one - lhs };
        assert!(err < BigUint::one() << 130u32);
    }

    #[test]
    fn parsing() {
        assert_eq!("1/2".parse::<CircleFraction>().unwrap(), CircleFraction::HALF);
        assert_eq!("0.5".parse::<CircleFraction>().unwrap(), CircleFraction::HALF);
        assert_eq!("0".parse::<CircleFraction>().unwrap(), CircleFraction::ZERO);
        let g = CircleFraction::golden();
        assert_eq!(g.to_string().parse::<CircleFraction>().unwrap(), g);
        assert!("1.5".parse::<CircleFraction>().is_err());
        assert!("3/2".parse::<CircleFraction>().is_err());
    }

    #[test]
    fn guard_rejects_small_denominators() {
        assert!(CircleFraction::from_ratio(2, 7).unwrap().check_irrational().is_err());
        assert!(CircleFraction::from_ratio(1, 1000).unwrap().check_irrational().is_err());
        assert!(CircleFraction::golden().check_irrational().is_ok());
        assert!(CircleFraction::sqrt2_minus_one().check_irrational().is_ok());
        assert!(CircleFraction::ZERO.check_irrational().is_err());
    }

    #[test]
    fn golden_guard_denominator_is_a_fibonacci_number() {
        let q = CircleFraction::golden().guard_denominator().to_u64().unwrap();
        let (mut a, mut b) = (1u64, 1u64);
        while b < q {
            (a, b) = (b, a + b);
        }
        assert_eq!(b, q);
        assert!(q > MIN_GUARD_DENOMINATOR);
    }

    #[test]
    fn first_symbol_with_zero_phase() {
        assert_eq!(sturmian_symbol(CircleFraction::golden(), CircleFraction::ZERO, 0), 0);
    }

    #[test]
    fn circle_distance_wraps() {
        let a = CircleFraction::from_ratio(1, 10).unwrap();
        let b = CircleFraction::from_ratio(9, 10).unwrap();
        let d = a.circle_distance(b).to_f64();
        assert!((d - 0.2).abs() < 1e-12);
        assert_eq!(a.circle_distance(a), CircleFraction::ZERO);
    }
}
