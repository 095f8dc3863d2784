//! Exact rational arithmetic for density thresholds.
//!
//! Every density comparison in the cover theorems is a strict inequality, so
//! all threshold logic is done on reduced integer fractions, never on floats.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

/// A rational in [0, 1]; densities |A|/|G| are always of this form.
pub type RationalDensity = Rational;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "zero denominator");
        let sign = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn density(num: i64, den: i64) -> Result<Rational> {
        let r = Rational::new(num, den);
        if r.num < 0 || r.num > r.den {
            return Err(Error::Domain(format!(
                "{} is not a density in [0, 1]",
                r
            )));
        }
        Ok(r)
    }

    pub fn zero() -> Rational {
        Rational { num: 0, den: 1 }
    }

    pub fn from_integer(n: i64) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn add(&self, o: &Rational) -> Rational {
        Rational::new(
            i128_to_i64(self.num as i128 * o.den as i128 + o.num as i128 * self.den as i128),
            i128_to_i64(self.den as i128 * o.den as i128),
        )
    }

    pub fn sub(&self, o: &Rational) -> Rational {
        self.add(&Rational::new(-o.num, o.den))
    }

    pub fn mul(&self, o: &Rational) -> Rational {
        Rational::new(
            i128_to_i64(self.num as i128 * o.num as i128),
            i128_to_i64(self.den as i128 * o.den as i128),
        )
    }

    pub fn div(&self, o: &Rational) -> Rational {
        assert!(o.num != 0, "division by zero rational");
        Rational::new(
            i128_to_i64(self.num as i128 * o.den as i128),
            i128_to_i64(self.den as i128 * o.num as i128),
        )
    }

    pub fn recip(&self) -> Rational {
        Rational::new(self.den, self.num)
    }

    /// ceil(self * y) for y >= 0, computed in integers.
    pub fn ceil_mul(&self, y: u64) -> i64 {
        let p = self.num as i128 * y as i128;
        let d = self.den as i128;
        // ceil(p/d) with d > 0
        let q = p.div_euclid(d) + if p.rem_euclid(d) != 0 { 1 } else { 0 };
        i128_to_i64(q)
    }

    /// floor(self * y) for y >= 0.
    pub fn floor_mul(&self, y: u64) -> i64 {
        i128_to_i64((self.num as i128 * y as i128).div_euclid(self.den as i128))
    }

    pub fn floor(&self) -> i64 {
        self.floor_mul(1)
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }
}

fn i128_to_i64(x: i128) -> i64 {
    i64::try_from(x).expect("rational arithmetic overflow")
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Parse "num/den" or a bare integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let parse =
        |t: &str| -> Result<i64> { t.trim().parse().map_err(|_| Error::Domain(format!("bad rational `{s}`"))) };
    match s.split_once('/') {
        Some((n, d)) => {
            let den = parse(d)?;
            if den == 0 {
                return Err(Error::Domain(format!("bad rational `{s}`: zero denominator")));
            }
            Ok(Rational::new(parse(n)?, den))
        }
        None => Ok(Rational::from_integer(parse(s)?)),
    }
}
