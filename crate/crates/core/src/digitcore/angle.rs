use std::fmt;

use num_complex::Complex;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::{unit_turns, Scalar};

/// Largest denominator accepted when constructing a rational angle.
///
/// With user-facing denominators capped at 2^31, any lcm of two of them fits
/// in a u64 and numerator sums over a common denominator fit comfortably in
/// u128 intermediates, so derived angles never lose exactness.
pub const MAX_DENOMINATOR: u64 = 1 << 31;

/// Circle distance below which angles with a floating part compare equal.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// An angle measured in turns and reduced to `[0, 1)`: the value `x` denotes
/// the unit complex number `e(x) = exp(2πi·x)`.
///
/// Rational turns are kept as reduced fractions and all arithmetic on them
/// is exact. Angles built from arbitrary floats carry an `f64` turn; any
/// operation mixing the two falls back to floating arithmetic.
#[derive(Clone, Copy, Debug)]
pub enum Angle {
    /// `num / den` turns with `0 <= num < den` and `gcd(num, den) = 1`.
    Rational { num: u64, den: u64 },
    /// A floating turn in `[0, 1)`.
    Float(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::Rational { num: 0, den: 1 };
    pub const HALF: Angle = Angle::Rational { num: 1, den: 2 };

    /// Reduced rational angle `num/den` turns, taken mod 1.
    ///
    /// Fails when `den == 0` or the reduced denominator exceeds
    /// [`MAX_DENOMINATOR`].
    pub fn rational(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::invalid("angle denominator must be nonzero"));
        }
        let (mut n, mut d) = (num as i128, den as i128);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let n = n.rem_euclid(d);
        let g = n.gcd(&d);
        let (n, d) = ((n / g) as u64, (d / g) as u64);
        if d > MAX_DENOMINATOR {
            return Err(Error::too_large(format!(
                "angle denominator {d} exceeds {MAX_DENOMINATOR}"
            )));
        }
        Ok(Angle::Rational { num: n, den: d })
    }

    /// Floating angle from a turn count; the value is taken mod 1.
    pub fn from_turns(turns: f64) -> Result<Self> {
        if !turns.is_finite() {
            return Err(Error::invalid("angle must be finite"));
        }
        let mut x = turns.rem_euclid(1.0);
        if x >= 1.0 {
            x = 0.0;
        }
        Ok(Angle::Float(x))
    }

    /// Parse `"a/b"`, an integer, or a decimal turn count.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            let num: i64 = a
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad angle numerator in {text:?}")))?;
            let den: i64 = b
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad angle denominator in {text:?}")))?;
            return Angle::rational(num, den);
        }
        if let Ok(k) = text.parse::<i64>() {
            return Angle::rational(k, 1);
        }
        let x: f64 = text
            .parse()
            .map_err(|_| Error::invalid(format!("cannot parse angle {text:?}")))?;
        Angle::from_turns(x)
    }

    /// Internal constructor from nonnegative `num/den`, `den > 0`, already
    /// taken mod 1. Falls back to a float turn if the reduced denominator
    /// no longer fits in a u64.
    fn reduced_u128(num: u128, den: u128) -> Self {
        debug_assert!(den > 0 && num < den);
        let g = num.gcd(&den);
        let (n, d) = (num / g, den / g);
        if d <= u64::MAX as u128 {
            Angle::Rational {
                num: n as u64,
                den: d as u64,
            }
        } else {
            Angle::Float((n as f64 / d as f64).clamp(0.0, 1.0 - f64::EPSILON))
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Angle::Rational { .. })
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Angle::Rational { num, .. } => num == 0,
            Angle::Float(x) => x == 0.0,
        }
    }

    /// Turn count in `[0, 1)` as an `f64`.
    pub fn turns(&self) -> f64 {
        match *self {
            Angle::Rational { num, den } => num as f64 / den as f64,
            Angle::Float(x) => x,
        }
    }

    /// `k` times the angle, mod 1; exact in the rational case.
    pub fn mul_int(self, k: u64) -> Angle {
        match self {
            Angle::Rational { num, den } => {
                let a = num as u128 * k as u128 % den as u128;
                Angle::reduced_u128(a, den as u128)
            }
            Angle::Float(x) => {
                Angle::Float(crate::scalar::reduce_turns(x * k as f64))
            }
        }
    }

    /// The unit complex number `e(self)`.
    pub fn unit<T: Scalar>(&self) -> Complex<T> {
        unit_turns(T::of_f64(self.turns()))
    }

    /// Distance on the circle, in turns, in `[0, 1/2]`.
    pub fn circle_distance(&self, other: &Angle) -> f64 {
        let d = (self.turns() - other.turns()).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    /// Equality up to `tol` on the circle; exact when both are rational.
    pub fn approx_eq(&self, other: &Angle, tol: f64) -> bool {
        match (self, other) {
            (Angle::Rational { num: n1, den: d1 }, Angle::Rational { num: n2, den: d2 }) => {
                n1 == n2 && d1 == d2
            }
            _ => self.circle_distance(other) <= tol,
        }
    }
}

impl std::ops::Add for Angle {
    type Output = Angle;

    /// Sum mod 1; exact when both sides are rational.
    fn add(self, rhs: Angle) -> Angle {
        match (self, rhs) {
            (Angle::Rational { num: n1, den: d1 }, Angle::Rational { num: n2, den: d2 }) => {
                let g = d1.gcd(&d2);
                let l = (d1 / g) as u128 * d2 as u128;
                let a = n1 as u128 * (l / d1 as u128) + n2 as u128 * (l / d2 as u128);
                Angle::reduced_u128(a % l, l)
            }
            _ => Angle::Float(crate::scalar::reduce_turns(self.turns() + rhs.turns())),
        }
    }
}

impl std::ops::Sub for Angle {
    type Output = Angle;

    /// Difference mod 1; exact when both sides are rational.
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl std::ops::Neg for Angle {
    type Output = Angle;

    /// Negation mod 1.
    fn neg(self) -> Angle {
        match self {
            Angle::Rational { num: 0, .. } => Angle::ZERO,
            Angle::Rational { num, den } => Angle::Rational {
                num: den - num,
                den,
            },
            Angle::Float(0.0) => Angle::Float(0.0),
            Angle::Float(x) => Angle::Float(1.0 - x),
        }
    }
}

/// Exact on rational pairs; circle distance below [`FLOAT_TOLERANCE`]
/// otherwise.
impl PartialEq for Angle {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, FLOAT_TOLERANCE)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Angle::Rational { num, den: 1 } => write!(f, "{num}"),
            Angle::Rational { num, den } => write!(f, "{num}/{den}"),
            Angle::Float(x) => write!(f, "{x}"),
        }
    }
}
