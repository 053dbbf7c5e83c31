//! Exact rationals with an `i64` fast path.
//!
//! Values are always kept normalized: a value whose numerator and
//! denominator fit in `i64` is stored in the small representation, so
//! structural equality and hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

#[derive(Clone)]
enum Repr {
    Small(Ratio<i64>),
    Big(BigRational),
}

/// An arbitrary-precision rational number.
#[derive(Clone)]
pub struct Rational(Repr);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational(Repr::Small(Ratio::new(num, den))).normalized()
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small(Ratio::from_integer(n)))
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    pub fn from_big(value: BigRational) -> Self {
        Rational(Repr::Big(value)).normalized()
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(r) => Ratio::new_raw(BigInt::from(*r.numer()), BigInt::from(*r.denom())),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.numer()),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(r) => BigInt::from(*r.denom()),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_zero(),
            Repr::Big(r) => r.is_zero(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(r) => r.is_negative(),
            Repr::Big(r) => r.is_negative(),
        }
    }

    /// Fractional part in `[0, 1)`.
    pub fn fract_turn(&self) -> Rational {
        match &self.0 {
            Repr::Small(r) => {
                let den = *r.denom();
                let num = r.numer().rem_euclid(den);
                Rational(Repr::Small(Ratio::new_raw(num, den)))
            }
            Repr::Big(r) => {
                let den = r.denom().clone();
                let num = r.numer().mod_floor(&den);
                Rational::from_big(Ratio::new_raw(num, den))
            }
        }
    }

    /// Lossy conversion, for display and heuristics only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(r) => *r.numer() as f64 / *r.denom() as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    fn normalized(self) -> Self {
        match self.0 {
            Repr::Small(_) => self,
            Repr::Big(r) => match (r.numer().to_i64(), r.denom().to_i64()) {
                (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => {
                    Rational(Repr::Small(Ratio::new_raw(n, d)))
                }
                _ => Rational(Repr::Big(r)),
            },
        }
    }

    fn binary(
        &self,
        other: &Self,
        small: impl Fn(&Ratio<i64>, &Ratio<i64>) -> Option<Ratio<i64>>,
        big: impl Fn(&BigRational, &BigRational) -> BigRational,
    ) -> Self {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &other.0) {
            if let Some(r) = small(a, b).filter(|r| !small_overflows(r)) {
                return Rational(Repr::Small(r));
            }
        }
        Rational::from_big(big(&self.to_big(), &other.to_big()))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a.checked_add(b), |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a.checked_sub(b), |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.binary(other, |a, b| a.checked_mul(b), |a, b| a * b)
    }

    pub fn div(&self, other: &Self) -> Self {
        assert!(!other.is_zero(), "division by zero");
        let inv = match &other.0 {
            Repr::Small(r) => Rational(Repr::Small(r.recip())),
            Repr::Big(r) => Rational(Repr::Big(r.recip())),
        };
        self.mul(&inv)
    }
}

fn small_overflows(r: &Ratio<i64>) -> bool {
    // i64::MIN is never stored: Ratio<i64> gcd and negation overflow on it.
    *r.numer() == i64::MIN || *r.denom() == i64::MIN
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a == b,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            // normalized values of different representations are never equal
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(r) => {
                0u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => {
                // cross-multiply in i128; denominators are positive
                let lhs = *a.numer() as i128 * *b.denom() as i128;
                let rhs = *b.numer() as i128 * *a.denom() as i128;
                lhs.cmp(&rhs)
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}: expected \"num/den\"")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| err())?;
        let den: BigInt = den.parse().map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_arithmetic_reduces() {
        let a = Rational::new(1, 4);
        let b = Rational::new(1, 4);
        assert_eq!(a.add(&b), Rational::new(1, 2));
        assert_eq!(Rational::new(2, 8), Rational::new(1, 4));
        assert_eq!(Rational::new(3, 4).sub(&Rational::new(1, 4)), Rational::new(1, 2));
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let p = 4_294_967_311i64; // prime > 2^32
        let q = 4_294_967_357i64;
        let a = Rational::new(1, p);
        let b = Rational::new(1, q);
        let s = a.add(&b);
        assert!(matches!(s.0, Repr::Big(_)));
        let back = s.sub(&b);
        assert!(matches!(back.0, Repr::Small(_)));
        assert_eq!(back, a);
    }

    #[test]
    fn mixed_ordering() {
        let p = 4_294_967_311i64;
        let q = 4_294_967_357i64;
        let big = Rational::new(1, p).mul(&Rational::new(1, q));
        assert!(big < Rational::new(1, i64::MAX));
        assert!(big > Rational::zero());
    }

    #[test]
    fn parse_and_display() {
        let r: Rational = "6/8".parse().unwrap();
        assert_eq!(r.to_string(), "3/4");
        assert_eq!("0".parse::<Rational>().unwrap().to_string(), "0/1");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/2".parse::<Rational>().is_err());
        let huge: Rational = "1/123456789012345678901234567890".parse().unwrap();
        assert_eq!(huge.to_string(), "1/123456789012345678901234567890");
    }

    #[test]
    fn fract_turn_wraps() {
        assert_eq!(Rational::new(9, 8).fract_turn(), Rational::new(1, 8));
        assert_eq!(Rational::new(-1, 8).fract_turn(), Rational::new(7, 8));
        assert_eq!(Rational::one().fract_turn(), Rational::zero());
    }
}
