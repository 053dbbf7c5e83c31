//! Exact angular arithmetic on the unit circle.
//!
//! Every quantity is a rational fraction of a full turn: a half turn is
//! `1/2`, a quarter turn `1/4`. Increasing position value is the clockwise
//! direction. Nothing here touches floating point, so antipodality and
//! interval membership are equality tests.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::exact::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AngleError {
    #[error("{0} is outside [0, 1]")]
    AngleOutOfRange(Rational),
    #[error("{0} is outside [0, 1)")]
    PositionOutOfRange(Rational),
    #[error(transparent)]
    Parse(#[from] crate::exact::ParseRationalError),
    #[error("{x} is antipodal to {r}: neither left nor right")]
    Antipodal { r: Position, x: Position },
    #[error("{x} coincides with {r}")]
    Coincident { r: Position, x: Position },
}

/// An angular extent, as a fraction of a full turn in `[0, 1]`.
///
/// The closed upper end admits the single gap of a one-point configuration.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Angle(Rational);

/// A point on the circle, as a fraction of a full turn in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Rational);

impl Angle {
    pub fn new(num: i64, den: i64) -> Result<Self, AngleError> {
        Self::from_rational(Rational::new(num, den))
    }

    pub fn from_rational(value: Rational) -> Result<Self, AngleError> {
        if value.is_negative() || value > Rational::one() {
            return Err(AngleError::AngleOutOfRange(value));
        }
        Ok(Angle(value))
    }

    /// Shorthand for literals known to be in range.
    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("angle literal out of range")
    }

    pub fn zero() -> Self {
        Angle(Rational::zero())
    }

    pub fn full() -> Self {
        Angle(Rational::one())
    }

    pub fn half() -> Self {
        Angle(Rational::new(1, 2))
    }

    pub fn quarter() -> Self {
        Angle(Rational::new(1, 4))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn checked_add(&self, other: &Angle) -> Option<Angle> {
        Angle::from_rational(self.0.add(&other.0)).ok()
    }

    pub fn checked_sub(&self, other: &Angle) -> Option<Angle> {
        Angle::from_rational(self.0.sub(&other.0)).ok()
    }

    /// `self * num / den`, if the result stays within a full turn.
    pub fn scaled(&self, num: i64, den: i64) -> Option<Angle> {
        Angle::from_rational(self.0.mul(&Rational::new(num, den))).ok()
    }

    /// `1 - self`.
    pub fn complement(&self) -> Angle {
        Angle(Rational::one().sub(&self.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl Position {
    pub fn new(num: i64, den: i64) -> Result<Self, AngleError> {
        Self::from_rational(Rational::new(num, den))
    }

    pub fn from_rational(value: Rational) -> Result<Self, AngleError> {
        if value.is_negative() || value >= Rational::one() {
            return Err(AngleError::PositionOutOfRange(value));
        }
        Ok(Position(value))
    }

    /// Reduces any rational modulo one full turn.
    pub fn wrapped(value: &Rational) -> Self {
        Position(value.fract_turn())
    }

    pub fn frac(num: i64, den: i64) -> Self {
        Self::new(num, den).expect("position literal out of range")
    }

    pub fn zero() -> Self {
        Position(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// The point reached by travelling `angle` clockwise.
    pub fn cw(&self, angle: &Angle) -> Position {
        Position::wrapped(&self.0.add(&angle.0))
    }

    /// The point reached by travelling `angle` counterclockwise.
    pub fn ccw(&self, angle: &Angle) -> Position {
        Position::wrapped(&self.0.sub(&angle.0))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

/// Clockwise angular distance from `a` to `b`, in `[0, 1)`.
pub fn alpha_cw(a: &Position, b: &Position) -> Angle {
    Angle(b.0.sub(&a.0).fract_turn())
}

/// Counterclockwise angular distance from `a` to `b`; zero when `a == b`.
pub fn alpha_ccw(a: &Position, b: &Position) -> Angle {
    if a == b {
        Angle::zero()
    } else {
        alpha_cw(a, b).complement()
    }
}

pub fn antipode(p: &Position) -> Position {
    p.cw(&Angle::half())
}

pub fn is_antipodal(a: &Position, b: &Position) -> bool {
    alpha_cw(a, b) == Angle::half()
}

/// Membership in the closed clockwise arc `[r, s]`.
///
/// A degenerate arc `r == s` is the singleton `{r}`.
pub fn in_interval_closed(x: &Position, r: &Position, s: &Position) -> bool {
    alpha_cw(r, x) <= alpha_cw(r, s)
}

/// Membership in the half-open clockwise arc `[r, s)`; empty when `r == s`.
pub fn in_interval_cw_half_open(x: &Position, r: &Position, s: &Position) -> bool {
    alpha_cw(r, x) < alpha_cw(r, s)
}

/// Membership in the open clockwise arc `(r, s)`.
pub fn in_interval_open(x: &Position, r: &Position, s: &Position) -> bool {
    let d = alpha_cw(r, x);
    !d.is_zero() && d < alpha_cw(r, s)
}

fn side_check(r: &Position, x: &Position) -> Result<Angle, AngleError> {
    if r == x {
        return Err(AngleError::Coincident { r: r.clone(), x: x.clone() });
    }
    let d = alpha_cw(r, x);
    if d == Angle::half() {
        return Err(AngleError::Antipodal { r: r.clone(), x: x.clone() });
    }
    Ok(d)
}

/// `x` lies left of `r` when the clockwise distance from `r` exceeds a half turn.
pub fn is_left_of(r: &Position, x: &Position) -> Result<bool, AngleError> {
    side_check(r, x).map(|d| d > Angle::half())
}

pub fn is_right_of(r: &Position, x: &Position) -> Result<bool, AngleError> {
    side_check(r, x).map(|d| d < Angle::half())
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

impl FromStr for Angle {
    type Err = AngleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Angle::from_rational(s.parse()?)
    }
}

impl FromStr for Position {
    type Err = AngleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Position::from_rational(s.parse()?)
    }
}

macro_rules! string_serde {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let s = String::deserialize(deserializer)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Angle);
string_serde!(Position);
