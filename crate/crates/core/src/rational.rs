//! Exact rational numbers for exponent arithmetic.
//!
//! [`Rat`] wraps a reduced `i128` ratio. Parsing accepts `"num/den"`,
//! plain integers and finite decimals (`"0.75"` parses to `3/4`), so that
//! exponents typed on the command line keep their exact value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(Ratio<i128>);

impl Rat {
    pub const ZERO: Rat = Rat(Ratio::new_raw(0, 1));
    pub const ONE: Rat = Rat(Ratio::new_raw(1, 1));

    /// Panics when `den == 0`; use [`Rat::checked_new`] for untrusted input.
    pub fn new(num: i128, den: i128) -> Self {
        Rat(Ratio::new(num, den))
    }

    pub fn checked_new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero("rational literal"));
        }
        Ok(Rat(Ratio::new(num, den)))
    }

    pub fn int(v: i128) -> Self {
        Rat(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn checked_div(self, rhs: Rat) -> Result<Rat> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero("rational division"));
        }
        Ok(self / rhs)
    }

    pub fn recip(self) -> Result<Rat> {
        Rat::ONE.checked_div(self)
    }

    pub fn min(self, other: Rat) -> Rat {
        std::cmp::min(self, other)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::ZERO
    }
}

impl From<i64> for Rat {
    fn from(v: i64) -> Self {
        Rat::int(v as i128)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, rhs: Rat) -> Rat {
                Rat(self.0.$m(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Rat {
    type Output = Rat;
    /// Panics on division by zero; fallible callers use [`Rat::checked_div`].
    fn div(self, rhs: Rat) -> Rat {
        Rat(self.0 / rhs.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom() == 1 {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::MalformedRational(s.to_string());
        let t = s.trim();
        if t.is_empty() {
            return Err(bad());
        }
        if let Some((n, d)) = t.split_once('/') {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            return Rat::checked_new(n, d).map_err(|_| bad());
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        let digits_ok = |p: &str| p.chars().all(|c| c.is_ascii_digit());
        if !digits_ok(int_part) || !digits_ok(frac_part) || frac_part.len() > 18 {
            return Err(bad());
        }
        let i: i128 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
        let scale = 10i128.pow(frac_part.len() as u32);
        let f: i128 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
        let num = i.checked_mul(scale).and_then(|v| v.checked_add(f)).ok_or_else(bad)?;
        let r = Rat::new(num, scale);
        Ok(if neg { -r } else { r })
    }
}

/// Ordering relation used in admissibility reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
}

impl Relation {
    pub fn holds(self, lhs: Rat, rhs: Rat) -> bool {
        matches!((self, lhs.cmp(&rhs)), (_, Ordering::Less) | (Relation::Le, Ordering::Equal))
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!("3/4".parse::<Rat>().unwrap(), Rat::new(3, 4));
        assert_eq!("-6/8".parse::<Rat>().unwrap(), Rat::new(-3, 4));
        assert_eq!("0.75".parse::<Rat>().unwrap(), Rat::new(3, 4));
        assert_eq!("-1.5".parse::<Rat>().unwrap(), Rat::new(-3, 2));
        assert_eq!("2".parse::<Rat>().unwrap(), Rat::int(2));
        assert_eq!(".5".parse::<Rat>().unwrap(), Rat::new(1, 2));
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["abc", "", "1/0", "1.2.3", "1e3", "/", "-"] {
            assert!(s.parse::<Rat>().is_err(), "{s}");
        }
    }

    #[test]
    fn lowest_terms_and_sign() {
        let r = Rat::new(4, -6);
        assert_eq!((r.numer(), r.denom()), (-2, 3));
        assert_eq!(r.to_string(), "-2/3");
        assert_eq!(Rat::new(6, 3).to_string(), "2");
    }

    #[test]
    fn relation_strictness() {
        let h = Rat::new(1, 2);
        assert!(!Relation::Lt.holds(h, h));
        assert!(Relation::Le.holds(h, h));
        assert!(Relation::Lt.holds(Rat::ZERO, h));
    }
}
