use num_traits::Zero;

use super::coeff::{qi, Coefficient, GaussQ, Q};
use super::poly::{GaussPoly, Poly};
use crate::error::{Error, Result};

/// Planar field obtained from a real polynomial through the ∂ⁿ/∂z̄ⁿ operator.
#[derive(Clone, Debug, PartialEq)]
pub struct LoewnerField {
    pub f: Poly,
    pub n: u32,
    pub p: Poly,
    pub q: Poly,
    /// Set when `n ≥ deg f`: the field is constant and the origin is not an
    /// isolated zero.
    pub degenerate: bool,
}

fn gq(re: i64, im: i64) -> GaussQ {
    GaussQ::new(qi(re), qi(im))
}

pub fn loewner_field(f: &Poly, n: u32) -> Result<LoewnerField> {
    if n == 0 {
        return Err(Error::domain("derivative order must be at least 1"));
    }
    if f.nvars() != 2 {
        return Err(Error::domain("loewner field needs a bivariate polynomial"));
    }
    if !f.constant_term().is_zero() {
        return Err(Error::domain("f(0,0) must vanish"));
    }
    let half = GaussQ::new(Q::new(1.into(), 2.into()), Q::zero());
    let z = GaussPoly::var(0, 2);
    let w = GaussPoly::var(1, 2);
    // x = (z + w)/2, y = -i (z - w)/2
    let x = (&z + &w).scale(&half);
    let y = (&z - &w).scale(&(gq(0, -1) * half.clone()));
    let fz = GaussPoly::from_real(f).substitute(&[x, y]);
    let d = fz.nth_derivative(1, n).scale(&GaussQ::from_rational(qi(1 << n.min(62))));
    let zx = &GaussPoly::var(0, 2) + &GaussPoly::var(1, 2).scale(&GaussQ::i());
    let wx = &GaussPoly::var(0, 2) - &GaussPoly::var(1, 2).scale(&GaussQ::i());
    let g = d.substitute(&[zx, wx]);
    let deg = f.degree().unwrap_or(0);
    Ok(LoewnerField {
        f: f.clone(),
        n,
        p: g.re(),
        q: g.im(),
        degenerate: n >= deg,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::poly::{c2, x2, y2};

    fn partials_oracle(f: &Poly) -> (Poly, Poly) {
        let fxx = f.nth_derivative(0, 2);
        let fyy = f.nth_derivative(1, 2);
        let fxy = f.derivative(0).derivative(1);
        (&fxx - &fyy, fxy.scale(&qi(2)))
    }

    #[test]
    fn gradient_case() {
        let f = &(&x2() * &x2()) + &(&y2() * &y2());
        let l = loewner_field(&f, 1).unwrap();
        assert_eq!(l.p, x2().scale(&qi(2)));
        assert_eq!(l.q, y2().scale(&qi(2)));
        assert!(!l.degenerate);
    }

    #[test]
    fn second_order_matches_partials() {
        let r2 = &(&x2() * &x2()) + &(&y2() * &y2());
        let f = &r2 * &r2;
        let l = loewner_field(&f, 2).unwrap();
        let (p, q) = partials_oracle(&f);
        assert_eq!((l.p.clone(), l.q.clone()), (p, q));
        assert_eq!(l.p, &(&x2() * &x2()).scale(&qi(8)) - &(&y2() * &y2()).scale(&qi(8)));
    }

    #[test]
    fn degenerate_flagged() {
        let f = &(&x2() * &x2()) - &(&y2() * &y2());
        let l = loewner_field(&f, 2).unwrap();
        assert!(l.degenerate);
        assert_eq!(l.p, c2(4));
        assert!(l.q.is_zero());
    }

    #[test]
    fn nonzero_constant_rejected() {
        assert!(loewner_field(&(&x2() + &c2(1)), 1).is_err());
    }
}
