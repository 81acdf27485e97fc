//! Dense univariate polynomials over `Q` and over prime fields, used for
//! exact gcds, square-free decomposition and Sturm root counting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::coeff::{sign_of, Q};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Ascending dense coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly {
    coeffs: Vec<Q>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_poly(p: &Poly) -> Self {
        if p.is_zero() {
            return UniPoly::new(vec![]);
        }
        UniPoly::new(p.univariate_coeffs())
    }

    pub fn to_poly(&self) -> Poly {
        Poly::univariate(self.coeffs.iter().cloned())
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn lead(&self) -> &Q {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().clone();
        UniPoly::new(self.coeffs.iter().map(|c| c / &l).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_default()
                        - other.coeffs.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UniPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_default()
                        + other.coeffs.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn scale(&self, f: &Q) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c * f).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::new(vec![]);
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (UniPoly::new(vec![]), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        let lead = d.lead().clone();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (UniPoly::new(quot), UniPoly::new(rem))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Square-free factorisation (Yun): returns `(q_i, i)` with `self = c·Π q_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(UniPoly, usize)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let a = b.gcd(&d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Sturm sequence of a square-free polynomial.
    fn sturm_chain(&self) -> Vec<UniPoly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(UniPoly::new(r.coeffs.iter().map(|c| -c).collect()));
        }
        chain
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        if self.degree().unwrap_or(0) == 0 {
            return 0;
        }
        let sf = self.div_rem(&self.gcd(&self.derivative())).0;
        let chain = sf.sturm_chain();
        let at = |plus: bool| -> usize {
            let signs: Vec<i32> = chain
                .iter()
                .map(|p| {
                    let s = sign_of(p.lead());
                    let odd = p.degree().unwrap_or(0) % 2 == 1;
                    if !plus && odd {
                        -s
                    } else {
                        s
                    }
                })
                .filter(|s| *s != 0)
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        at(false) - at(true)
    }

    /// Number of distinct real roots of odd multiplicity, i.e. the points
    /// where the polynomial changes sign.
    pub fn count_sign_changes_on_line(&self) -> usize {
        self.squarefree_decomposition()
            .into_iter()
            .filter(|(_, m)| m % 2 == 1)
            .map(|(f, _)| f.count_real_roots())
            .sum()
    }
}

/// Dense polynomial over the prime field `F_p`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPolyFp {
    p: u64,
    coeffs: Vec<u64>,
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl UniPolyFp {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % p).collect();
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        UniPolyFp { p, coeffs }
    }

    /// Reduces rational coefficients modulo `p`; fails if a denominator vanishes.
    pub fn from_rational(p: u64, coeffs: &[Q]) -> Result<Self> {
        let pb = BigInt::from(p);
        let mut out = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            let num = c.numer().mod_floor(&pb).to_u64().unwrap();
            let den = c.denom().mod_floor(&pb).to_u64().unwrap();
            if den == 0 {
                return Err(Error::domain(format!(
                    "coefficient {c} has a denominator divisible by {p}"
                )));
            }
            let inv = mod_pow(den, p - 2, p);
            out.push(((num as u128 * inv as u128) % p as u128) as u64);
        }
        Ok(UniPolyFp::new(p, out))
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn derivative(&self) -> UniPolyFp {
        let p = self.p;
        UniPolyFp::new(
            p,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| ((c as u128 * (i as u64 % p) as u128) % p as u128) as u64)
                .collect(),
        )
    }

    fn rem(&self, d: &UniPolyFp) -> UniPolyFp {
        let p = self.p as u128;
        let dd = d.coeffs.len() - 1;
        let inv = mod_pow(*d.coeffs.last().unwrap(), self.p - 2, self.p) as u128;
        let mut r: Vec<u128> = self.coeffs.iter().map(|&c| c as u128).collect();
        while r.len() > dd {
            let k = r.len() - 1 - dd;
            let c = (r[r.len() - 1] * inv) % p;
            for (j, &dc) in d.coeffs.iter().enumerate() {
                r[k + j] = (r[k + j] + p * p - (c * dc as u128) % p) % p;
            }
            r.pop();
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        UniPolyFp::new(self.p, r.into_iter().map(|v| v as u64).collect())
    }

    pub fn monic(&self) -> UniPolyFp {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&l) => {
                let inv = mod_pow(l, self.p - 2, self.p) as u128;
                let p = self.p as u128;
                UniPolyFp::new(self.p, self.coeffs.iter().map(|&c| ((c as u128 * inv) % p) as u64).collect())
            }
        }
    }

    pub fn gcd(&self, other: &UniPolyFp) -> UniPolyFp {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::qi;

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&v| qi(v)).collect())
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (x-1)(x-2) and (x-1)(x+3)
        let a = up(&[2, -3, 1]);
        let b = up(&[-3, 2, 1]);
        assert_eq!(a.gcd(&b), up(&[-1, 1]));
    }

    #[test]
    fn sturm_counts_distinct_real_roots() {
        // (x-1)^2 (x+2) (x^2+1)
        let p = up(&[1, -2, 1]).mul(&up(&[2, 1])).mul(&up(&[1, 0, 1]));
        assert_eq!(p.count_real_roots(), 2);
        // Only x = -2 has odd multiplicity.
        assert_eq!(p.count_sign_changes_on_line(), 1);
        assert_eq!(up(&[1, 0, 1]).count_real_roots(), 0);
    }

    #[test]
    fn squarefree_decomposition_recovers_multiplicities() {
        let p = up(&[-1, 1]).mul(&up(&[-1, 1])).mul(&up(&[-1, 1])).mul(&up(&[3, 1]));
        let dec = p.squarefree_decomposition();
        assert_eq!(dec, vec![(up(&[3, 1]), 1), (up(&[-1, 1]), 3)]);
    }

    #[test]
    fn prime_field_gcd() {
        // x^2 (x^2 + 1) over F_5 and its derivative share x.
        let p = UniPolyFp::new(5, vec![0, 0, 1, 0, 1]);
        let g = p.gcd(&p.derivative());
        assert_eq!(g.degree(), Some(1));
        assert!(is_prime(5) && !is_prime(9) && !is_prime(1));
    }
}
