//! Exact scalars: rationals, optionally extended to Gaussian rationals `a + bi`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// An element of the Gaussian rationals. The imaginary part is zero for
/// ordinary rationals.
#[derive(Clone, Debug)]
pub struct Scalar {
    re: BigRational,
    im: BigRational,
}

fn ratio_eq(a: &BigRational, b: &BigRational) -> bool {
    // Ratios are kept reduced, so structural equality is value equality.
    a.numer() == b.numer() && a.denom() == b.denom()
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn from_int(n: i64) -> Self {
        Scalar { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    /// The rational `n / d`. Panics when `d` is zero.
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Scalar { re: BigRational::new(BigInt::from(n), BigInt::from(d)), im: BigRational::zero() }
    }

    pub fn from_rational(re: BigRational) -> Self {
        Scalar { re, im: BigRational::zero() }
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        Scalar { re, im }
    }

    pub fn re(&self) -> &BigRational {
        &self.re
    }

    pub fn im(&self) -> &BigRational {
        &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        if self.im.is_zero() {
            return self.clone();
        }
        Scalar { re: self.re.clone(), im: -&self.im }
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(Scalar { re: self.re.recip(), im: BigRational::zero() });
        }
        let norm = &self.re * &self.re + &self.im * &self.im;
        Some(Scalar { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        ratio_eq(&self.re, &other.re) && ratio_eq(&self.im, &other.im)
    }
}

impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.re.numer().hash(state);
        self.re.denom().hash(state);
        self.im.numer().hash(state);
        self.im.denom().hash(state);
    }
}

/// Lexicographic on (real, imaginary). Only a tie-breaking order, not a field order.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

fn fmt_ratio(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_ratio(&self.re, f)?;
        if !self.im.is_zero() {
            if self.im.is_negative() {
                write!(f, "-")?;
            } else {
                write!(f, "+")?;
            }
            fmt_ratio(&self.im.abs(), f)?;
            write!(f, "i")?;
        }
        Ok(())
    }
}

fn parse_ratio(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("malformed scalar component {s:?}"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
    }
}

impl FromStr for Scalar {
    type Err = Error;

    /// Accepts `p`, `p/q`, `p/q+r/si`, `p/q-r/si` and a bare imaginary `r/si`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let Some(body) = s.strip_suffix('i') else {
            return Ok(Scalar::from_rational(parse_ratio(s)?));
        };
        let split = body
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .last();
        let (re, im) = match split {
            Some(i) => (parse_ratio(&body[..i])?, &body[i..]),
            None => (BigRational::zero(), body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            other => parse_ratio(other.strip_prefix('+').unwrap_or(other))?,
        };
        Ok(Scalar::gaussian(re, im))
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let im = if self.im.is_zero() && rhs.im.is_zero() {
            BigRational::zero()
        } else {
            &self.im + &rhs.im
        };
        Scalar { re: &self.re + &rhs.re, im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        let im = if self.im.is_zero() && rhs.im.is_zero() {
            BigRational::zero()
        } else {
            &self.im - &rhs.im
        };
        Scalar { re: &self.re - &rhs.re, im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Scalar { re: &self.re * &rhs.re, im: BigRational::zero() };
        }
        Scalar {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &Scalar) -> Scalar {
        self * &rhs.inv().expect("division by zero scalar")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -&self.re, im: -&self.im }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                (&self).$f(&rhs)
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $f(self, rhs: &Scalar) -> Scalar {
                (&self).$f(rhs)
            }
        }
        impl<'a> $tr<Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $f(self, rhs: Scalar) -> Scalar {
                self.$f(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        self.re += &rhs.re;
        if !rhs.im.is_zero() {
            self.im += &rhs.im;
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        self.re -= &rhs.re;
        if !rhs.im.is_zero() {
            self.im -= &rhs.im;
        }
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        if self.im.is_zero() && rhs.im.is_zero() {
            self.re *= &rhs.re;
        } else {
            *self = &*self * rhs;
        }
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |mut acc, x| {
            acc *= &x;
            acc
        })
    }
}

impl serde::Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for Scalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Scalar::from_int(n)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        for text in ["3", "-3/7", "1/2+2/3i", "1/2-2/3i", "0+1i"] {
            assert_eq!(s(text).to_string(), text);
        }
        assert_eq!(s("4/6"), Scalar::ratio(2, 3));
        assert_eq!(s("2i"), Scalar::gaussian(BigRational::zero(), BigRational::from_integer(2.into())));
        assert_eq!(s("1-i").to_string(), "1-1i");
        assert!("1/0".parse::<Scalar>().is_err());
        assert!("abc".parse::<Scalar>().is_err());
    }

    #[test]
    fn field_arithmetic() {
        assert_eq!(s("1/2") + s("1/3"), s("5/6"));
        assert_eq!(s("1+2i") * s("1-2i"), s("5"));
        assert_eq!(s("1+2i") / s("1+2i"), Scalar::one());
        assert_eq!(s("1+2i").conj(), s("1-2i"));
        assert_eq!(s("3/4").conj(), s("3/4"));
        assert_eq!(s("2").pow(10), s("1024"));
        assert_eq!(s("0").pow(0), Scalar::one());
        assert!(Scalar::zero().inv().is_none());
    }
}
