use std::fmt;

use num_traits::Zero;

use super::coeff::Q;
use super::poly::Poly;
use super::univariate::UniPoly;
use crate::error::{Error, Result};

/// Quotient of two polynomials. Never simplified implicitly; call
/// [`RationalFn::normalize`] to cancel common univariate factors.
#[derive(Clone, PartialEq)]
pub struct RationalFn {
    num: Poly,
    den: Poly,
}

impl RationalFn {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::domain("rational function with zero denominator"));
        }
        let n = num.nvars().max(den.nvars());
        Ok(RationalFn {
            num: num.extend_vars(n),
            den: den.extend_vars(n),
        })
    }

    pub fn from_poly(p: Poly) -> Self {
        let n = p.nvars();
        RationalFn { num: p, den: Poly::one(n) }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFn) -> RationalFn {
        if self.den == o.den {
            return RationalFn { num: &self.num + &o.num, den: self.den.clone() };
        }
        RationalFn {
            num: &self.num * &o.den + &o.num * &self.den,
            den: &self.den * &o.den,
        }
    }

    pub fn neg(&self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }

    pub fn sub(&self, o: &RationalFn) -> RationalFn {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFn) -> RationalFn {
        RationalFn { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    pub fn mul_poly(&self, p: &Poly) -> RationalFn {
        RationalFn { num: &self.num * p, den: self.den.clone() }
    }

    /// Quotient rule: (N'D - ND') / D².
    pub fn derivative(&self, var: usize) -> RationalFn {
        if self.den.is_constant() {
            return RationalFn { num: self.num.derivative(var), den: self.den.clone() };
        }
        RationalFn {
            num: &self.num.derivative(var) * &self.den - &self.num * &self.den.derivative(var),
            den: &self.den * &self.den,
        }
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.num.eval_f64(point) / self.den.eval_f64(point)
    }

    pub fn eval_exact(&self, point: &[Q]) -> Result<Q> {
        let d = self.den.eval_exact(point);
        if d.is_zero() {
            return Err(Error::domain("denominator vanishes at evaluation point"));
        }
        Ok(self.num.eval_exact(point) / d)
    }

    /// Cancels common factors: monomial content always, and the full gcd when
    /// both parts depend on the same single variable. Constant denominators
    /// are folded into the numerator.
    pub fn normalize(&self) -> RationalFn {
        let n = self.nvars();
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        if !num.is_zero() {
            let cn = num.monomial_content();
            let cd = den.monomial_content();
            let common: Vec<u32> = cn.iter().zip(&cd).map(|(a, b)| *a.min(b)).collect();
            num = num.div_monomial(&common).unwrap();
            den = den.div_monomial(&common).unwrap();
        }
        let uv = |p: &Poly| p.used_vars();
        let (un, ud) = (uv(&num), uv(&den));
        if ud.len() == 1 && (un.is_empty() || un == ud) && !num.is_zero() {
            let v = ud[0];
            let proj = |p: &Poly| {
                let mut coeffs = vec![Q::zero(); p.degree_in(v).unwrap_or(0) as usize + 1];
                for (m, c) in p.terms() {
                    coeffs[m.exps()[v] as usize] = c.clone();
                }
                UniPoly::new(coeffs)
            };
            let embed = |u: &UniPoly| {
                Poly::from_terms(
                    n,
                    u.coeffs().iter().enumerate().map(|(i, c)| {
                        let mut e = vec![0; n];
                        e[v] = i as u32;
                        (e, c.clone())
                    }),
                )
            };
            let (pn, pd) = (proj(&num), proj(&den));
            let g = pn.gcd(&pd);
            if g.degree().unwrap_or(0) > 0 {
                num = embed(&pn.div_rem(&g).0);
                den = embed(&pd.div_rem(&g).0);
            }
        }
        if num.is_zero() {
            return RationalFn { num, den: Poly::one(n) };
        }
        if den.is_constant() {
            let c = den.constant_term();
            num = num.scale(&(Q::from_integer(1.into()) / c));
            den = Poly::one(n);
        }
        RationalFn { num, den }
    }

    /// Exact equality as functions: N₁D₂ = N₂D₁.
    pub fn equals(&self, o: &RationalFn) -> bool {
        &self.num * &o.den == &o.num * &self.den
    }
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() && self.den.constant_term() == Q::from_integer(1.into()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{c2, x2};

    #[test]
    fn zero_denominator_rejected() {
        assert!(RationalFn::new(x2(), Poly::zero(2)).is_err());
    }

    #[test]
    fn normalize_cancels_univariate_gcd() {
        // (x^2 - 1)/(x - 1) -> x + 1
        let num = &(&x2() * &x2()) - &c2(1);
        let den = &x2() - &c2(1);
        let r = RationalFn::new(num, den).unwrap().normalize();
        assert!(r.is_polynomial());
        assert_eq!(r.num(), &(&x2() + &c2(1)));
    }

    #[test]
    fn no_implicit_cancellation() {
        let r = RationalFn::new(x2(), x2()).unwrap();
        assert!(!r.is_polynomial());
        assert!(r.equals(&RationalFn::from_poly(c2(1))));
    }
}
