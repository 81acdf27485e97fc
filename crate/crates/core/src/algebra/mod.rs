//! Exact polynomial and rational-function arithmetic.

mod coeff;
pub mod json;
mod loewner;
mod poly;
mod rational_fn;
mod univariate;

pub use coeff::{format_q, parse_q, q, q_from_f64, q_to_f64, qi, Coefficient, GaussQ, Q};
pub use loewner::{loewner_field, LoewnerField};
pub use poly::{c2, x2, y2, GaussPoly, Monomial, Poly, SparsePoly};
pub use rational_fn::RationalFn;
pub use univariate::{is_prime, UniPoly, UniPolyFp};

pub(crate) use coeff::sign_of;

use crate::error::{Error, Result};

/// Default cap on `m_max · deg f` for [`moments`].
pub const MOMENT_DEGREE_CAP: u32 = 200;

/// Sign changes in the ascending nonzero coefficient sequence.
pub fn descartes_bound(p: &Poly) -> Result<usize> {
    if p.is_zero() {
        return Err(Error::domain("Descartes bound of the zero polynomial"));
    }
    if p.used_vars().len() > 1 {
        return Err(Error::domain("Descartes bound needs a univariate polynomial"));
    }
    let signs: Vec<i32> = p.terms().map(|(_, c)| sign_of(c)).collect();
    Ok(signs.windows(2).filter(|w| w[0] != w[1]).count())
}

/// Exact moments `M_m = ∫_{[0,1]^n} f^m`, m = 1..=m_max.
pub fn moments(f: &Poly, m_max: u32, cap: u32) -> Result<Vec<Q>> {
    if f.nvars() > 2 {
        return Err(Error::domain("moments support at most two variables"));
    }
    let deg = f.degree().unwrap_or(0);
    if m_max.saturating_mul(deg) > cap {
        return Err(Error::Resource(format!(
            "moment degree {} exceeds cap {cap}",
            m_max.saturating_mul(deg)
        )));
    }
    let mut out = Vec::with_capacity(m_max as usize);
    let mut pw = Poly::one(f.nvars());
    for _ in 0..m_max {
        pw = &pw * f;
        out.push(pw.integrate_unit_cube());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CasasVerdict {
    /// One gcd per k = 1..deg-1 (monic, ascending coefficients as strings).
    Shares(Vec<Vec<String>>),
    FailsAt(usize),
}

/// Decides whether `p` shares a root with each of `p', …, p^{(deg-1)}`.
pub fn casas_alvero(p: &Poly, modulus: Option<u64>) -> Result<CasasVerdict> {
    if p.used_vars().len() > 1 {
        return Err(Error::domain("Casas-Alvero needs a univariate polynomial"));
    }
    let u = UniPoly::from_poly(p);
    let deg = u.degree().unwrap_or(0);
    if deg < 2 {
        return Err(Error::domain("Casas-Alvero needs degree at least 2"));
    }
    let mut witnesses = Vec::new();
    match modulus {
        None => {
            let mut d = u.clone();
            for k in 1..deg {
                d = d.derivative();
                let g = u.gcd(&d);
                if g.degree().unwrap_or(0) == 0 {
                    return Ok(CasasVerdict::FailsAt(k));
                }
                witnesses.push(g.coeffs().iter().map(format_q).collect());
            }
        }
        Some(m) => {
            if !is_prime(m) {
                return Err(Error::domain(format!("modulus {m} is not prime")));
            }
            let up = UniPolyFp::from_rational(m, u.coeffs())?;
            if up.degree() != Some(deg) {
                return Err(Error::domain(format!("leading coefficient vanishes modulo {m}")));
            }
            let mut d = up.clone();
            for k in 1..deg {
                d = d.derivative();
                // A vanishing derivative shares every root.
                let g = if d.is_zero() { up.monic() } else { up.gcd(&d) };
                if g.degree().unwrap_or(0) == 0 {
                    return Ok(CasasVerdict::FailsAt(k));
                }
                witnesses.push(g.coeffs().iter().map(u64::to_string).collect());
            }
        }
    }
    Ok(CasasVerdict::Shares(witnesses))
}

/// Chebyshev polynomial of the first kind.
pub fn chebyshev_t(n: u32) -> Poly {
    let x = Poly::var(0, 1);
    let two_x = x.scale(&qi(2));
    let (mut a, mut b) = (Poly::one(1), x);
    if n == 0 {
        return a;
    }
    for _ in 1..n {
        let c = &(&two_x * &b) - &a;
        a = b;
        b = c;
    }
    b
}

#[derive(Clone, Debug)]
pub struct FieldCalculus {
    pub divergence: RationalFn,
    /// `[[P_x, P_y], [Q_x, Q_y]]`
    pub jacobian: [[RationalFn; 2]; 2],
}

pub fn vf_calculus(p: &RationalFn, q: &RationalFn) -> Result<FieldCalculus> {
    if p.nvars() > 2 || q.nvars() > 2 {
        return Err(Error::domain("vector-field calculus is planar"));
    }
    let ext = |r: &RationalFn| RationalFn::new(r.num().extend_vars(2), r.den().extend_vars(2));
    let (p, q) = (ext(p)?, ext(q)?);
    let jacobian = [
        [p.derivative(0), p.derivative(1)],
        [q.derivative(0), q.derivative(1)],
    ];
    let divergence = jacobian[0][0].add(&jacobian[1][1]);
    Ok(FieldCalculus { divergence, jacobian })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn up(c: &[i64]) -> Poly {
        Poly::univariate(c.iter().map(|&v| qi(v)))
    }

    #[test]
    fn descartes_examples() {
        assert_eq!(descartes_bound(&up(&[-1, 0, 1])).unwrap(), 1);
        assert_eq!(descartes_bound(&up(&[1, 0, 1])).unwrap(), 0);
        let p = Poly::univariate([qi(0), qi(-1), qi(0), q(61, 43), qi(0), qi(0), qi(1)]);
        assert_eq!(descartes_bound(&p).unwrap(), 1);
        assert!(descartes_bound(&Poly::zero(1)).is_err());
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moments(&Poly::zero(1), 3, 200).unwrap(), vec![qi(0); 3]);
        assert_eq!(moments(&up(&[0, 1]), 3, 200).unwrap(), vec![q(1, 2), q(1, 3), q(1, 4)]);
        assert_eq!(moments(&up(&[-1, 2]), 3, 200).unwrap(), vec![qi(0), q(1, 3), qi(0)]);
        let err = moments(&up(&[0, 0, 0, 0, 1]), 60, 200).unwrap_err();
        assert!(matches!(err, Error::Resource(ref m) if m.contains("240")));
    }

    #[test]
    fn casas_alvero_examples() {
        let p = up(&[-2, 1]).pow(5);
        assert!(matches!(casas_alvero(&p, None).unwrap(), CasasVerdict::Shares(w) if w.len() == 4));
        let p = up(&[0, 0, 1, 0, 1]);
        assert!(matches!(casas_alvero(&p, Some(5)).unwrap(), CasasVerdict::Shares(_)));
        assert_eq!(casas_alvero(&p, None).unwrap(), CasasVerdict::FailsAt(2));
        assert_eq!(casas_alvero(&up(&[0, 0, -1, 1]), None).unwrap(), CasasVerdict::FailsAt(2));
        assert!(casas_alvero(&p, Some(6)).is_err());
        assert!(casas_alvero(&up(&[1, 1]), None).is_err());
    }

    #[test]
    fn chebyshev_examples() {
        assert_eq!(chebyshev_t(0), up(&[1]));
        assert_eq!(chebyshev_t(2), up(&[-1, 0, 2]));
        assert_eq!(chebyshev_t(3), up(&[0, -3, 0, 4]));
    }

    #[test]
    fn vf_calculus_examples() {
        let f = |p: Poly| RationalFn::from_poly(p);
        let c = vf_calculus(&f(-y2()), &f(x2())).unwrap();
        assert!(c.divergence.is_zero());
        let c = vf_calculus(&f(&x2() * &x2()), &f(y2().pow(3))).unwrap();
        assert!(c.divergence.equals(&f(&x2().scale(&qi(2)) + &(&y2() * &y2()).scale(&qi(3)))));
        let p = RationalFn::new(x2(), &c2(1) + &(&x2() * &x2())).unwrap();
        let c = vf_calculus(&p, &f(Poly::zero(2))).unwrap();
        let one_x2 = &c2(1) + &(&x2() * &x2());
        let expect = RationalFn::new(&c2(1) - &(&x2() * &x2()), &one_x2 * &one_x2).unwrap();
        assert!(c.divergence.equals(&expect));
    }
}
