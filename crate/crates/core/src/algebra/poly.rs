use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::coeff::{format_q, q_to_f64, qi, Coefficient, GaussQ, Q};

/// Exponent vector ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn quotient(&self, divisor: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&divisor.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial with exact coefficients.
///
/// Zero coefficients are never stored and every exponent vector has
/// length `nvars`. Terms iterate in ascending graded-lex order.
#[derive(Clone, PartialEq)]
pub struct SparsePoly<C: Coefficient = Q> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type Poly = SparsePoly<Q>;
pub type GaussPoly = SparsePoly<GaussQ>;

impl<C: Coefficient> SparsePoly<C> {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    /// The variable `x_i` in a ring with `nvars` variables.
    pub fn var(i: usize, nvars: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, C::one())
    }

    pub fn monomial(exps: Vec<u32>, c: C) -> Self {
        let nvars = exps.len();
        let mut p = Self::zero(nvars);
        p.add_term(Monomial(exps), c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, C)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Univariate polynomial from ascending coefficients.
    pub fn univariate(coeffs: impl IntoIterator<Item = C>) -> Self {
        Self::from_terms(1, coeffs.into_iter().enumerate().map(|(i, c)| (vec![i as u32], c)))
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of monomials with nonzero coefficient.
    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(C::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn is_constant(&self) -> bool {
        self.degree().unwrap_or(0) == 0
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn mul_monomial(&self, exps: &[u32]) -> Self {
        let mm = Monomial(exps.to_vec());
        let mut out = Self::zero(self.nvars);
        for (m, v) in &self.terms {
            out.terms.insert(m.mul(&mm), v.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Partial derivative with respect to variable `var`.
    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut nm = m.clone();
            nm.0[var] -= 1;
            out.add_term(nm, c.clone() * C::from_i64(e as i64));
        }
        out
    }

    pub fn nth_derivative(&self, var: usize, n: u32) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative(var))
    }

    /// Antiderivative in `var` with zero constant of integration.
    pub fn antiderivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut nm = m.clone();
            nm.0[var] += 1;
            let k = nm.0[var] as i64;
            out.add_term(nm, c.clone() * C::from_rational(Q::new(1.into(), k.into())));
        }
        out
    }

    /// Exact integral over the unit cube `[0,1]^nvars`.
    pub fn integrate_unit_cube(&self) -> C {
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let den: i64 = m.0.iter().map(|&e| e as i64 + 1).product();
            acc = acc + c.clone() * C::from_rational(Q::new(1.into(), den.into()));
        }
        acc
    }

    /// Homogeneous component of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if m.degree() == d {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    pub fn map_coeffs<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> SparsePoly<D> {
        let mut out = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    /// Substitutes polynomials (all in a common ring) for every variable.
    pub fn substitute(&self, values: &[SparsePoly<C>]) -> SparsePoly<C> {
        assert_eq!(values.len(), self.nvars);
        let target = values.first().map(|v| v.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<SparsePoly<C>>> = values.iter().map(|v| vec![SparsePoly::one(v.nvars), v.clone()]).collect();
        let mut out = SparsePoly::zero(target);
        for (m, c) in &self.terms {
            let mut term = SparsePoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap() * &values[i];
                    cache[i].push(next);
                }
                term = &term * &cache[i][e as usize];
            }
            out = &out + &term;
        }
        out
    }

    /// Embeds into a ring with more variables (existing variables keep their index).
    pub fn extend_vars(&self, nvars: usize) -> Self {
        assert!(nvars >= self.nvars);
        let mut out = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.resize(nvars, 0);
            out.terms.insert(Monomial(e), c.clone());
        }
        out
    }

    /// Variables that actually occur with positive exponent.
    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|m| m.0[v] > 0))
            .collect()
    }

    /// Greatest monomial dividing every term (all zeros for the zero polynomial).
    pub fn monomial_content(&self) -> Vec<u32> {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else {
            return vec![0; self.nvars];
        };
        it.fold(first.0.clone(), |acc, m| acc.iter().zip(&m.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn div_monomial(&self, exps: &[u32]) -> Option<Self> {
        let d = Monomial(exps.to_vec());
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            if !d.divides(m) {
                return None;
            }
            out.terms.insert(m.quotient(&d), c.clone());
        }
        Some(out)
    }
}

impl Poly {
    pub fn from_f64_terms(nvars: usize, terms: &[(Vec<u32>, f64)]) -> Self {
        Self::from_terms(
            nvars,
            terms.iter().map(|(e, c)| (e.clone(), Q::from_float(*c).expect("finite coefficient"))),
        )
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.nvars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .zip(point)
                    .fold(q_to_f64(c), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    pub fn eval_exact(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (&e, x) in m.0.iter().zip(point) {
                t *= num_traits::pow(x.clone(), e as usize);
            }
            acc += t;
        }
        acc
    }

    /// Ascending coefficient list of a univariate polynomial.
    pub fn univariate_coeffs(&self) -> Vec<Q> {
        assert_eq!(self.nvars, 1, "univariate polynomial expected");
        let deg = self.degree().unwrap_or(0) as usize;
        let mut out = vec![Q::zero(); deg + 1];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        out
    }

    /// Exact division by `divisor` in graded-lex order.
    ///
    /// Returns the quotient when the remainder vanishes. With a single
    /// divisor the remainder is zero iff `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading_term()?;
        let (lm, lc) = (lm.clone(), lc.clone());
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        loop {
            // Largest term of the remainder divisible by the leading monomial.
            let pick = rem
                .terms
                .iter()
                .rev()
                .find(|(m, _)| lm.divides(m))
                .map(|(m, c)| (m.clone(), c.clone()));
            match pick {
                None => break,
                Some((m, c)) => {
                    let qm = m.quotient(&lm);
                    let qc = c / &lc;
                    let step = Poly::monomial(qm.0.clone(), qc.clone());
                    rem = &rem - &(&step * divisor);
                    quot.add_term(qm, qc);
                }
            }
        }
        rem.is_zero().then_some(quot)
    }
}

impl GaussPoly {
    pub fn re(&self) -> Poly {
        self.map_coeffs(|c| c.re.clone())
    }

    pub fn im(&self) -> Poly {
        self.map_coeffs(|c| c.im.clone())
    }

    pub fn from_real(p: &Poly) -> Self {
        p.map_coeffs(|c| GaussQ::new(c.clone(), Q::zero()))
    }
}

impl<'a, C: Coefficient> Add<&'a SparsePoly<C>> for &'a SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn add(self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, C: Coefficient> Sub<&'a SparsePoly<C>> for &'a SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn sub(self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, C: Coefficient> Mul<&'a SparsePoly<C>> for &'a SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn mul(self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = SparsePoly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<C: Coefficient> Neg for &SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn neg(self) -> SparsePoly<C> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl<C: Coefficient> $tr<SparsePoly<C>> for SparsePoly<C> {
            type Output = SparsePoly<C>;
            fn $f(self, rhs: SparsePoly<C>) -> SparsePoly<C> {
                (&self).$f(&rhs)
            }
        }
        impl<'a, C: Coefficient> $tr<&'a SparsePoly<C>> for SparsePoly<C> {
            type Output = SparsePoly<C>;
            fn $f(self, rhs: &SparsePoly<C>) -> SparsePoly<C> {
                (&self).$f(rhs)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<C: Coefficient> Neg for SparsePoly<C> {
    type Output = SparsePoly<C>;
    fn neg(self) -> SparsePoly<C> {
        -&self
    }
}

const VAR_NAMES: [&str; 4] = ["x", "y", "z", "w"];

fn var_name(i: usize, n: usize) -> String {
    if n <= VAR_NAMES.len() {
        VAR_NAMES[i].to_string()
    } else {
        format!("x{i}")
    }
}

impl fmt::Debug for SparsePoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for SparsePoly<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let neg = c < &Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let mono: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let v = var_name(i, self.nvars);
                    if e == 1 {
                        v
                    } else {
                        format!("{v}^{e}")
                    }
                })
                .collect();
            if mono.is_empty() {
                write!(f, "{}", format_q(&abs))?;
            } else if abs == Q::one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{}*{}", format_q(&abs), mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly<GaussQ> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "re: {} | im: {}", self.re(), self.im())
    }
}

/// Convenience constructors for the common two-variable ring.
pub fn x2() -> Poly {
    Poly::var(0, 2)
}

pub fn y2() -> Poly {
    Poly::var(1, 2)
}

pub fn c2(v: i64) -> Poly {
    Poly::constant(2, qi(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::coeff::q;

    #[test]
    fn graded_lex_order_puts_total_degree_first() {
        let a = Monomial(vec![0, 3]);
        let b = Monomial(vec![2, 0]);
        let c = Monomial(vec![3, 0]);
        assert!(b < a);
        assert!(a < c);
    }

    #[test]
    fn arithmetic_and_display() {
        let x = x2();
        let y = y2();
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.to_string(), "x^2 - y^2");
        assert_eq!(p.nterms(), 2);
        assert_eq!(p.degree(), Some(2));
        let zero = &p - &p;
        assert!(zero.is_zero());
        assert_eq!(zero.degree(), None);
    }

    #[test]
    fn derivative_and_antiderivative() {
        let x = x2();
        let y = y2();
        let p = &(&x.pow(3) * &y) + &c2(5);
        assert_eq!(p.derivative(0), &x.pow(2) * &(&y * &c2(3)));
        assert_eq!(p.derivative(0).antiderivative(0), &p - &c2(5));
        assert_eq!(p.integrate_unit_cube(), q(1, 8) + qi(5));
    }

    #[test]
    fn exact_division() {
        let x = x2();
        let y = y2();
        let a = &(&x * &x) + &(&y * &c2(3));
        let b = &x - &y;
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        assert!((&prod + &c2(1)).div_exact(&b).is_none());
    }

    #[test]
    fn substitution_composes() {
        let x = Poly::var(0, 1);
        let p = &x.pow(2) + &Poly::constant(1, qi(1));
        let shifted = p.substitute(&[&x + &Poly::constant(1, qi(1))]);
        assert_eq!(shifted.univariate_coeffs(), vec![qi(2), qi(2), qi(1)]);
    }
}
