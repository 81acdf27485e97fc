use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
pub type Q = BigRational;

/// Coefficient ring of a [`SparsePoly`](super::SparsePoly).
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_rational(q: Q) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_rational(Q::from_integer(BigInt::from(v)))
    }
}

impl Coefficient for Q {
    fn from_rational(q: Q) -> Self {
        q
    }
}

pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or_else(|| {
        // Ratio of huge integers: fall back to a scaled division.
        let n = v.numer().bits() as i64;
        let d = v.denom().bits() as i64;
        let shift = n.max(d) - 60;
        if shift <= 0 {
            return f64::NAN;
        }
        let num = (v.numer() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        let den = (v.denom() >> shift as usize).to_f64().unwrap_or(f64::NAN);
        num / den
    })
}

/// Exact conversion of a finite double into a rational.
pub fn q_from_f64(v: f64) -> Result<Q> {
    Q::from_float(v).ok_or_else(|| Error::domain(format!("non-finite value {v}")))
}

/// Parses `"3"`, `"-7/4"`, `"0.125"` or `"1e-3"` exactly.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        let d = BigInt::from_str(d.trim()).map_err(|e| Error::Parse(format!("{s}: {e}")))?;
        if d.is_zero() {
            return Err(Error::Parse(format!("{s}: zero denominator")));
        }
        return Ok(Q::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..]
                .parse()
                .map_err(|e| Error::Parse(format!("{s}: {e}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    let negative = int_part.starts_with('-');
    let digits = format!("{}{}", int_part.trim_start_matches(['-', '+']), frac_part);
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid number {s:?}")));
    }
    let mut value = Q::from_integer(BigInt::from_str(&digits).unwrap());
    let scale = exp - frac_part.len() as i64;
    let ten = Q::from_integer(BigInt::from(10));
    if scale >= 0 {
        value = value * num_traits::pow(ten, scale as usize);
    } else {
        value = value / num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

pub fn format_q(v: &Q) -> String {
    if v.denom().is_one() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussQ {
    pub re: Q,
    pub im: Q,
}

impl GaussQ {
    pub fn new(re: Q, im: Q) -> Self {
        GaussQ { re, im }
    }

    pub fn i() -> Self {
        GaussQ::new(Q::zero(), Q::one())
    }

    pub fn conj(&self) -> Self {
        GaussQ::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl fmt::Debug for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", format_q(&self.re), format_q(&self.im))
    }
}

impl Zero for GaussQ {
    fn zero() -> Self {
        GaussQ::new(Q::zero(), Q::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussQ {
    fn one() -> Self {
        GaussQ::new(Q::one(), Q::zero())
    }
}

impl Add for GaussQ {
    type Output = GaussQ;
    fn add(self, o: GaussQ) -> GaussQ {
        GaussQ::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for GaussQ {
    type Output = GaussQ;
    fn sub(self, o: GaussQ) -> GaussQ {
        GaussQ::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for GaussQ {
    type Output = GaussQ;
    fn mul(self, o: GaussQ) -> GaussQ {
        GaussQ::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl Neg for GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ::new(-self.re, -self.im)
    }
}

impl Coefficient for GaussQ {
    fn from_rational(q: Q) -> Self {
        GaussQ::new(q, Q::zero())
    }
}

pub(crate) fn sign_of(v: &Q) -> i32 {
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_rational_spellings() {
        assert_eq!(parse_q("3").unwrap(), qi(3));
        assert_eq!(parse_q("-7/4").unwrap(), q(-7, 4));
        assert_eq!(parse_q("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_q("-1.5e-1").unwrap(), q(-3, 20));
        assert_eq!(parse_q("2e3").unwrap(), qi(2000));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("abc").is_err());
    }

    #[test]
    fn gaussian_product() {
        let a = GaussQ::new(qi(1), qi(2));
        let b = GaussQ::new(qi(3), qi(-1));
        assert_eq!(a.clone() * b, GaussQ::new(qi(5), qi(5)));
        assert_eq!(GaussQ::i() * GaussQ::i(), -GaussQ::one());
        assert_eq!(a.norm_sqr(), qi(5));
    }
}
