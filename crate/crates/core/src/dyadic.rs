//! Exact dyadic rationals `mantissa * 2^exponent`.
//!
//! Level starts, bump widths and cube corners of the extremal construction
//! are all dyadic, so they are carried exactly and converted to `f64` only
//! at evaluation time. An `i128` mantissa covers every corner of levels
//! `n <= 10`; beyond that the checked operations return `None`.

use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: i128,
    exponent: i32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic {
        mantissa: 0,
        exponent: 0,
    };

    pub fn new(mantissa: i128, exponent: i32) -> Self {
        Dyadic { mantissa, exponent }.normalized()
    }

    pub fn from_int(v: i128) -> Self {
        Dyadic::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i32) -> Self {
        Dyadic {
            mantissa: 1,
            exponent: e,
        }
    }

    pub fn mantissa(&self) -> i128 {
        self.mantissa
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    fn normalized(mut self) -> Self {
        if self.mantissa == 0 {
            return Dyadic::ZERO;
        }
        let tz = self.mantissa.trailing_zeros() as i32;
        self.mantissa >>= tz;
        self.exponent += tz;
        self
    }

    /// Both mantissas rescaled to the smaller exponent.
    fn aligned(self, other: Dyadic) -> Option<(i128, i128, i32)> {
        let e = self.exponent.min(other.exponent);
        let a = shl_checked(self.mantissa, (self.exponent - e) as u32)?;
        let b = shl_checked(other.mantissa, (other.exponent - e) as u32)?;
        Some((a, b, e))
    }

    pub fn checked_add(self, other: Dyadic) -> Option<Dyadic> {
        if self.mantissa == 0 {
            return Some(other);
        }
        if other.mantissa == 0 {
            return Some(self);
        }
        let (a, b, e) = self.aligned(other)?;
        Some(Dyadic::new(a.checked_add(b)?, e))
    }

    pub fn checked_sub(self, other: Dyadic) -> Option<Dyadic> {
        self.checked_add(Dyadic {
            mantissa: other.mantissa.checked_neg()?,
            exponent: other.exponent,
        })
    }

    pub fn checked_mul_int(self, k: i128) -> Option<Dyadic> {
        Some(Dyadic::new(self.mantissa.checked_mul(k)?, self.exponent))
    }

    /// Significant bits of the mantissa.
    pub fn bits(&self) -> u32 {
        128 - self.mantissa.unsigned_abs().leading_zeros()
    }

    /// True when the value converts to `f64` without rounding.
    pub fn is_exact_f64(&self) -> bool {
        self.bits() <= 53 && {
            let top = self.exponent + self.bits() as i32;
            // normal range only; subnormals are not produced by the construction
            top <= 1024 && self.exponent >= -1074 && top > -1021
        } || self.mantissa == 0
    }

    pub fn to_f64(&self) -> f64 {
        if self.mantissa == 0 {
            return 0.0;
        }
        // split the scaling so 2^exponent never overflows on its own
        let m = self.mantissa as f64;
        let e = self.exponent;
        let half = e / 2;
        m * 2f64.powi(half) * 2f64.powi(e - half)
    }
}

fn shl_checked(v: i128, s: u32) -> Option<i128> {
    if v == 0 {
        return Some(0);
    }
    if s >= 127 {
        return None;
    }
    let r = v.checked_shl(s)?;
    if (r >> s) != v {
        return None;
    }
    Some(r)
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.aligned(*other) {
            Some((a, b, _)) => a.cmp(&b),
            None => {
                // Exponents too far apart to align: the sign and magnitude of
                // the larger-exponent operand decide.
                let sa = self.mantissa.signum();
                let sb = other.mantissa.signum();
                if sa != sb {
                    return sa.cmp(&sb);
                }
                let top_a = self.exponent + self.bits() as i32;
                let top_b = other.exponent + other.bits() as i32;
                if sa >= 0 {
                    top_a.cmp(&top_b)
                } else {
                    top_b.cmp(&top_a)
                }
            }
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exponent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_trailing_zeros() {
        let d = Dyadic::new(12, -4);
        assert_eq!(d.mantissa(), 3);
        assert_eq!(d.exponent(), -2);
        assert_eq!(d.to_f64(), 0.75);
    }

    #[test]
    fn add_and_sub_are_exact() {
        let a = Dyadic::pow2(-1);
        let b = Dyadic::pow2(-60);
        let s = a.checked_add(b).unwrap();
        assert_eq!(s.checked_sub(b).unwrap(), a);
        assert_eq!(s.bits(), 60);
        assert!(!s.is_exact_f64());
        assert!(a.is_exact_f64());
    }

    #[test]
    fn ordering_across_scales() {
        assert!(Dyadic::pow2(-3) < Dyadic::pow2(-2));
        assert!(Dyadic::from_int(-1) < Dyadic::pow2(-200));
        assert!(Dyadic::pow2(-200) < Dyadic::pow2(100));
        assert!(Dyadic::new(5, -3) > Dyadic::new(9, -4));
    }

    #[test]
    fn overflow_is_reported() {
        let big = Dyadic::pow2(0);
        let tiny = Dyadic::pow2(-200);
        assert!(big.checked_add(tiny).is_none());
        assert!(Dyadic::from_int(i128::MAX).checked_mul_int(2).is_none());
    }
}
