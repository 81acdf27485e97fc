//! Bendixson–Dulac certificates: exact M_s = V_x P + V_y Q + s·div(P,Q)·V
//! and interval certification of its sign.

use std::f64::consts::TAU;

use num_traits::Signed;
use serde::Serialize;

use crate::algebra::{format_q, q_to_f64, Poly, RationalFn, Q};
use crate::error::{Error, Result};
use crate::interval::{certify_sign, eval_box, IBox, Interval};

/// Dulac candidate V. Polynomials and rational functions are
/// representable; anything else (e.g. exponentials) is carried as a
/// description and yields `Unknown`.
#[derive(Clone, Debug)]
pub enum DulacFunction {
    Rational(RationalFn),
    Unsupported(String),
}

/// M_s = factor · cofactor with `factor` an even monomial (≥ 0, vanishing
/// on coordinate axes only).
#[derive(Clone, Debug)]
pub struct FactorHint {
    pub factor: Poly,
    pub cofactor: RationalFn,
}

#[derive(Clone, Debug)]
pub struct DulacInstance {
    pub v: DulacFunction,
    pub p: RationalFn,
    pub q: RationalFn,
    pub s: Q,
    pub hint: Option<FactorHint>,
}

impl DulacInstance {
    pub fn new(v: Poly, p: RationalFn, q: RationalFn, s: Q) -> Self {
        DulacInstance::new_rational(RationalFn::from_poly(v), p, q, s)
    }

    pub fn new_rational(v: RationalFn, p: RationalFn, q: RationalFn, s: Q) -> Self {
        DulacInstance { v: DulacFunction::Rational(v), p, q, s, hint: None }
    }

    pub fn with_hint(mut self, factor: Poly, cofactor: RationalFn) -> Self {
        self.hint = Some(FactorHint { factor, cofactor });
        self
    }
}

/// Liénard system ẋ = y − F(x), ẏ = −x for F given in the variable x of a
/// two-variable ring.
pub fn lienard(f: &RationalFn) -> (RationalFn, RationalFn) {
    let y = RationalFn::from_poly(Poly::var(1, 2));
    let p = y.sub(f);
    let q = RationalFn::from_poly(-Poly::var(0, 2));
    (p, q)
}

pub fn m_s(inst: &DulacInstance) -> Result<RationalFn> {
    let DulacFunction::Rational(vr) = &inst.v else {
        return Err(Error::domain("only polynomial or rational Dulac functions are representable"));
    };
    if vr.nvars() != 2 || inst.p.nvars() != 2 || inst.q.nvars() != 2 {
        return Err(Error::domain("V, P and Q must share the variables (x, y)"));
    }
    let div = inst.p.derivative(0).add(&inst.q.derivative(1));
    let s = RationalFn::from_poly(Poly::constant(2, inst.s.clone()));
    let m = vr
        .derivative(0)
        .mul(&inst.p)
        .add(&vr.derivative(1).mul(&inst.q))
        .add(&s.mul(&div).mul(&vr));
    Ok(m.normalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DulacVerdict {
    AtMostOneCycle,
    NoCycles,
    Unknown,
}

/// Outcome of the sign check of a polynomial outside the certified box.
#[derive(Clone, Debug, Serialize)]
pub struct LeadingFormCheck {
    pub polynomial: String,
    /// Sign of the top-degree form on the unit sphere of the used variables.
    pub sign: i32,
    /// Beyond this radius the polynomial has the sign of its leading form.
    pub radius: Option<f64>,
    pub covered_by_box: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DulacEvidence {
    pub m_s: String,
    pub hint_verified: Option<bool>,
    pub cofactor_sign: i32,
    pub bounds: Vec<(f64, f64)>,
    pub depth: u32,
    pub leading_form: Vec<LeadingFormCheck>,
    /// dis_y(V) when V is quadratic in y.
    pub discriminant: Option<String>,
    pub warnings: Vec<String>,
    pub explanation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DulacReport {
    pub verdict: DulacVerdict,
    pub evidence: DulacEvidence,
}

fn interval_cos(a: f64, b: f64) -> Interval {
    let (ca, cb) = (a.cos(), b.cos());
    let mut lo = ca.min(cb) - 1e-15;
    let mut hi = ca.max(cb) + 1e-15;
    let k0 = (a / TAU).floor() as i64 - 1;
    for k in k0..=k0 + 3 {
        let t = k as f64 * std::f64::consts::PI;
        if a <= t && t <= b {
            if k % 2 == 0 {
                hi = 1.0;
            } else {
                lo = -1.0;
            }
        }
    }
    Interval::new(lo.max(-1.0), hi.min(1.0))
}

fn interval_sin(a: f64, b: f64) -> Interval {
    let h = std::f64::consts::FRAC_PI_2;
    interval_cos(a - h, b - h)
}

/// Lower bound of |p_d| on the unit circle, with its sign, by adaptive
/// subdivision of the angle.
fn circle_minimum(pd: &Poly, max_depth: u32) -> Option<(i32, f64)> {
    let mut stack = vec![(0.0, TAU, 0u32)];
    let mut sign = 0;
    let mut m = f64::INFINITY;
    while let Some((a, b, d)) = stack.pop() {
        let v = eval_box(pd, &IBox::new(vec![interval_cos(a, b), interval_sin(a, b)]));
        let s = if v.lo > 0.0 {
            1
        } else if v.hi < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if sign != 0 && s != sign {
                return None;
            }
            sign = s;
            m = m.min(if s > 0 { v.lo } else { -v.hi });
            continue;
        }
        if d >= max_depth {
            return None;
        }
        let mid = 0.5 * (a + b);
        stack.push((a, mid, d + 1));
        stack.push((mid, b, d + 1));
    }
    Some((sign, m))
}

/// Sign of `p` outside a ball: if the top form has strict sign with lower
/// bound m on the unit sphere and C_j bounds the degree-j part, p has that
/// sign for |z| ≥ max(1, ΣC_j / m).
fn leading_form_check(p: &Poly, b: &IBox, max_depth: u32) -> LeadingFormCheck {
    let d = p.degree().unwrap_or(0);
    let used = p.used_vars();
    let mut out = LeadingFormCheck { polynomial: p.to_string(), sign: 0, radius: None, covered_by_box: false };
    if d == 0 {
        out.sign = crate::algebra::q_to_f64(&p.constant_term()).signum() as i32;
        if p.constant_term() == Q::from_integer(0.into()) {
            out.sign = 0;
        }
        out.radius = Some(0.0);
        out.covered_by_box = true;
        return out;
    }
    let top = p.homogeneous_part(d);
    let found = match used.as_slice() {
        // the unit sphere in one variable is {−1, 1}
        [_] if d % 2 == 1 => None,
        [_] => {
            let lead = q_to_f64(top.terms().next().unwrap().1);
            Some((lead.signum() as i32, lead.abs()))
        }
        _ => circle_minimum(&top, max_depth),
    };
    let Some((sign, m)) = found else { return out };
    let lower: f64 = (0..d)
        .map(|j| p.homogeneous_part(j).terms().map(|(_, c)| q_to_f64(c).abs()).sum::<f64>())
        .sum();
    // round the radius up a little to absorb the float bound
    let r = (lower / m).max(1.0) * (1.0 + 1e-12);
    out.sign = sign;
    out.radius = Some(r);
    out.covered_by_box = used.iter().all(|&v| b.0[v].lo <= -r && b.0[v].hi >= r);
    out
}

/// Strict global sign of a polynomial: certified on `b`, and outside `b`
/// through its leading form.
fn global_sign(p: &Poly, b: &IBox, depth: u32, checks: &mut Vec<LeadingFormCheck>) -> i32 {
    let local = certify_sign(p, b, depth).as_i32();
    let lf = leading_form_check(p, b, depth);
    let ok = local != 0 && lf.covered_by_box && lf.sign == local;
    checks.push(lf);
    if ok {
        local
    } else {
        0
    }
}

fn is_even_monomial(p: &Poly) -> bool {
    p.nterms() == 1 && {
        let (m, c) = p.terms().next().unwrap();
        c.is_positive() && m.exps().iter().all(|e| e % 2 == 0)
    }
}

/// dis_y(V) = B² − 4AC for V = A y² + B y + C with A a positive constant
/// and B, C rational in x alone.
pub fn discriminant_in_y(v: &RationalFn) -> Option<RationalFn> {
    let (num, den) = (v.num(), v.den());
    if num.degree_in(1) != Some(2) || den.degree_in(1).unwrap_or(0) > 0 {
        return None;
    }
    let coeff = |k: u32| {
        let p = Poly::from_terms(
            2,
            num.terms()
                .filter(|(m, _)| m.exps()[1] == k)
                .map(|(m, c)| (vec![m.exps()[0], 0], c.clone())),
        );
        RationalFn::new(p, den.clone()).expect("nonzero denominator").normalize()
    };
    let (a, b, c) = (coeff(2), coeff(1), coeff(0));
    if !a.is_polynomial() || !a.num().is_constant() || !a.num().constant_term().is_positive() {
        return None;
    }
    let four = RationalFn::from_poly(Poly::constant(2, Q::from_integer(4.into())));
    Some(b.mul(&b).sub(&four.mul(&a).mul(&c)).normalize())
}

/// Checks the hypotheses of the Bendixson–Dulac criterion on `bounds`
/// (plus a leading-form argument outside) and returns the verdict.
pub fn certify_dulac(inst: &DulacInstance, bounds: &[(f64, f64); 2], depth: u32) -> DulacReport {
    let b = IBox::from_bounds(bounds);
    let mut ev = DulacEvidence {
        m_s: String::new(),
        hint_verified: None,
        cofactor_sign: 0,
        bounds: bounds.to_vec(),
        depth,
        leading_form: vec![],
        discriminant: None,
        warnings: vec![],
        explanation: String::new(),
    };
    let unknown = |mut ev: DulacEvidence, why: String| {
        ev.explanation = why;
        DulacReport { verdict: DulacVerdict::Unknown, evidence: ev }
    };
    let m = match m_s(inst) {
        Ok(m) => m,
        Err(e) => {
            let what = match &inst.v {
                DulacFunction::Unsupported(d) => format!("V = {d} is outside the representable class"),
                _ => e.to_string(),
            };
            return unknown(ev, what);
        }
    };
    ev.m_s = m.to_string();
    let target = match &inst.hint {
        Some(h) => {
            let ok = is_even_monomial(&h.factor) && h.cofactor.mul_poly(&h.factor).equals(&m);
            ev.hint_verified = Some(ok);
            if !ok {
                return unknown(ev, "factor hint does not reproduce M_s as (even monomial)·cofactor".into());
            }
            h.cofactor.clone()
        }
        None => m.clone(),
    };
    let sd = global_sign(target.den(), &b, depth, &mut ev.leading_form);
    let sn = global_sign(target.num(), &b, depth, &mut ev.leading_form);
    ev.cofactor_sign = sn * sd;
    if ev.cofactor_sign == 0 {
        let why = if inst.hint.is_none() {
            "sign of M_s not certified; if M_s is semidefinite supply a factor hint".to_string()
        } else {
            "sign of the cofactor not certified".to_string()
        };
        return unknown(ev, why);
    }
    if let DulacFunction::Rational(v) = &inst.v {
        match discriminant_in_y(v) {
            Some(d) => {
                ev.discriminant = Some(d.to_string());
            }
            None => ev.warnings.push(
                "V is not quadratic in y with constant leading coefficient: the hypothesis on the components of {V = 0} is left to the caller"
                    .into(),
            ),
        }
    }
    ev.warnings.push("{V = 0} containing no periodic orbit is assumed".into());
    let verdict = if inst.s.is_negative() { DulacVerdict::AtMostOneCycle } else { DulacVerdict::NoCycles };
    ev.explanation = format!(
        "M_s has constant sign {} (vanishing on a null set) with s = {}",
        ev.cofactor_sign,
        format_q(&inst.s)
    );
    DulacReport { verdict, evidence: ev }
}

/// The two Liénard instances with their Dulac functions and hints.
pub mod examples {
    use super::*;
    use crate::algebra::{c2, q, qi, x2, y2};

    fn cq(v: Q) -> Poly {
        Poly::constant(2, v)
    }

    /// F = cx³ + x⁵ with V = y² − Fy + x² + 2c/5 and s = −1.
    pub fn polynomial_lienard(c: &Q) -> DulacInstance {
        let x = x2();
        let f = &x.pow(3).scale(c) + &x.pow(5);
        let v = &(&(&y2() * &y2()) - &(&f * &y2())) + &(&(&x * &x) + &cq(c.clone() * q(2, 5)));
        let (p, qq) = lienard(&RationalFn::from_poly(f));
        DulacInstance::new(v, p, qq, qi(-1)).with_hint(x.pow(2), polynomial_lienard_cofactor(c))
    }

    /// M_s = x² · (2/5)(10x⁴ + 10cx² + 3c²).
    pub fn polynomial_lienard_cofactor(c: &Q) -> RationalFn {
        let x = x2();
        let inner = &(&x.pow(4).scale(&qi(10)) + &x.pow(2).scale(&(c * qi(10)))) + &cq(c * c * qi(3));
        RationalFn::from_poly(inner.scale(&q(2, 5)))
    }

    /// F = (x − cx³)/(1 + cx²) with V = y² − Fy + x² and s = −1.
    pub fn rational_lienard(c: &Q) -> DulacInstance {
        let x = x2();
        let f = RationalFn::new(&x - &x.pow(3).scale(c), &c2(1) + &x.pow(2).scale(c)).expect("nonzero denominator");
        let y = RationalFn::from_poly(y2());
        let xr = RationalFn::from_poly(x.clone());
        let v = y.mul(&y).sub(&f.mul(&y)).add(&xr.mul(&xr));
        let (p, qq) = lienard(&f);
        DulacInstance::new_rational(v, p, qq, qi(-1)).with_hint(x.pow(4), rational_lienard_cofactor(c))
    }

    /// M_s = x⁴ · (−4c/(1 + cx²)²).
    pub fn rational_lienard_cofactor(c: &Q) -> RationalFn {
        let den = &c2(1) + &x2().pow(2).scale(c);
        RationalFn::new(cq(c * qi(-4)), den.pow(2)).expect("nonzero denominator")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c2, q, qi, x2, y2};

    fn cq(v: Q) -> Poly {
        Poly::constant(2, v)
    }
    use crate::cycles::{find_cycles, ReturnOptions, Section};
    use crate::flow::VectorField;
    use proptest::prelude::*;

    fn poly_lienard(c: Q) -> DulacInstance {
        let x = x2();
        let f = &x.pow(3).scale(&c) + &x.pow(5);
        let v = &(&(&y2() * &y2()) - &(&f * &y2())) + &(&(&x * &x) + &cq(c.clone() * q(2, 5)));
        let (p, qq) = lienard(&RationalFn::from_poly(f));
        DulacInstance::new(v, p, qq, qi(-1))
    }

    fn poly_cofactor(c: &Q) -> RationalFn {
        let x = x2();
        let inner = &(&x.pow(4).scale(&qi(10)) + &x.pow(2).scale(&(c * qi(10)))) + &cq(c * c * qi(3));
        RationalFn::from_poly(inner.scale(&q(2, 5)))
    }

    fn rational_f(c: Q) -> RationalFn {
        let x = x2();
        let num = &x - &x.pow(3).scale(&c);
        let den = &c2(1) + &x.pow(2).scale(&c);
        RationalFn::new(num, den).unwrap()
    }

    fn rational_lienard(c: Q) -> DulacInstance {
        let f = rational_f(c);
        let y = RationalFn::from_poly(y2());
        let x = RationalFn::from_poly(x2());
        let v = y.mul(&y).sub(&f.mul(&y)).add(&x.mul(&x));
        let (p, qq) = lienard(&f);
        DulacInstance::new_rational(v, p, qq, qi(-1))
    }

    // −4c/(1 + cx²)²
    fn rational_cofactor(c: &Q) -> RationalFn {
        let den = &c2(1) + &x2().pow(2).scale(c);
        RationalFn::new(cq(c * qi(-4)), den.pow(2)).unwrap()
    }

    #[test]
    fn rational_lienard_closed_form() {
        for c in [qi(1), q(1, 3), qi(5)] {
            let inst = rational_lienard(c.clone());
            let m = m_s(&inst).unwrap();
            assert!(m.equals(&rational_cofactor(&c).mul_poly(&x2().pow(4))), "{m}");
            // dis_y(V) = −x²(cx² + 3)(3cx² + 1)/(cx² + 1)²
            let DulacFunction::Rational(v) = &inst.v else { unreachable!() };
            let d = discriminant_in_y(v).unwrap();
            let x = x2();
            let num = (&(&x * &x) * &(&x.pow(2).scale(&c) + &c2(3))) * (&x.pow(2).scale(&(&c * qi(3))) + &c2(1));
            let den = (&x.pow(2).scale(&c) + &c2(1)).pow(2);
            assert!(d.equals(&RationalFn::new(-num, den).unwrap()));
        }
    }

    #[test]
    fn certifies_rational_lienard() {
        let inst = rational_lienard(qi(1)).with_hint(x2().pow(4), rational_cofactor(&qi(1)));
        let rep = certify_dulac(&inst, &[(-5.0, 5.0), (-5.0, 5.0)], 20);
        assert_eq!(rep.verdict, DulacVerdict::AtMostOneCycle, "{rep:?}");
        assert_eq!(rep.evidence.cofactor_sign, -1);
    }

    #[test]
    fn polynomial_lienard_closed_form() {
        for c in [qi(-1), q(3, 7), qi(2)] {
            let inst = poly_lienard(c.clone());
            let m = m_s(&inst).unwrap();
            let expected = poly_cofactor(&c).mul_poly(&x2().pow(2));
            assert!(m.equals(&expected), "{m}");
        }
    }

    #[test]
    fn packaged_examples_match_local_builders() {
        for c in [qi(-1), qi(2)] {
            let inst = examples::polynomial_lienard(&c);
            let m = m_s(&inst).unwrap();
            assert!(m.equals(&poly_cofactor(&c).mul_poly(&x2().pow(2))));
            assert!(m.equals(&m_s(&poly_lienard(c.clone())).unwrap()));
        }
        for c in [qi(1), q(1, 3)] {
            let m = m_s(&examples::rational_lienard(&c)).unwrap();
            assert!(m.equals(&rational_cofactor(&c).mul_poly(&x2().pow(4))));
        }
    }

    #[test]
    fn constant_v_gives_divergence() {
        let p = RationalFn::from_poly(&(&x2() * &y2()) + &x2().pow(3));
        let qq = RationalFn::from_poly(&y2().pow(2) - &x2());
        let inst = DulacInstance::new(c2(1), p.clone(), qq.clone(), qi(1));
        let div = p.derivative(0).add(&qq.derivative(1));
        assert!(m_s(&inst).unwrap().equals(&div));
    }

    #[test]
    fn certifies_polynomial_lienard() {
        let inst = poly_lienard(qi(-1)).with_hint(x2().pow(2), poly_cofactor(&qi(-1)));
        let rep = certify_dulac(&inst, &[(-5.0, 5.0), (-5.0, 5.0)], 20);
        assert_eq!(rep.verdict, DulacVerdict::AtMostOneCycle, "{rep:?}");
        assert_eq!(rep.evidence.cofactor_sign, 1);
        assert!(rep.evidence.discriminant.is_some());
        // without the hint M_s vanishes on x = 0 and nothing can be certified
        let rep = certify_dulac(&poly_lienard(qi(-1)), &[(-5.0, 5.0), (-5.0, 5.0)], 12);
        assert_eq!(rep.verdict, DulacVerdict::Unknown);
        // a wrong hint is rejected
        let bad = poly_lienard(qi(-1)).with_hint(x2().pow(2), poly_cofactor(&qi(1)));
        assert_eq!(certify_dulac(&bad, &[(-5.0, 5.0), (-5.0, 5.0)], 12).evidence.hint_verified, Some(false));
    }

    #[test]
    fn box_too_small_for_the_global_argument() {
        let inst = poly_lienard(qi(-1)).with_hint(x2().pow(2), poly_cofactor(&qi(-1)));
        let rep = certify_dulac(&inst, &[(-1.0, 1.0), (-1.0, 1.0)], 20);
        assert_eq!(rep.verdict, DulacVerdict::Unknown);
        assert!(rep.evidence.leading_form.iter().any(|l| !l.covered_by_box));
    }

    #[test]
    fn exponential_v_is_unknown() {
        let f = RationalFn::from_poly(&x2() + &x2().pow(2));
        let (p, qq) = lienard(&f);
        let inst = DulacInstance {
            v: DulacFunction::Unsupported("exp(-2by)".into()),
            p,
            q: qq,
            s: qi(1),
            hint: None,
        };
        let rep = certify_dulac(&inst, &[(-5.0, 5.0), (-5.0, 5.0)], 10);
        assert_eq!(rep.verdict, DulacVerdict::Unknown);
        assert!(rep.evidence.explanation.contains("representable"));
    }

    #[test]
    fn lienard_uniqueness_is_consistent_with_cycle_search() {
        for c in [-1.0, -0.5, -0.8, -1.5, -2.0] {
            let cq = crate::algebra::q_from_f64(c).unwrap();
            let inst = poly_lienard(cq.clone()).with_hint(x2().pow(2), poly_cofactor(&cq));
            let rep = certify_dulac(&inst, &[(-8.0, 8.0), (-8.0, 8.0)], 20);
            assert_eq!(rep.verdict, DulacVerdict::AtMostOneCycle);
            let vf = VectorField::planar(inst.p.num().clone(), inst.q.num().clone());
            let grid: Vec<f64> = (1..=24).map(|i| 0.1 * i as f64).collect();
            let res = find_cycles(&vf, &Section::positive_x((0.01, 10.0)), &grid, &ReturnOptions::default());
            assert!(res.cycles.len() <= 1, "c = {c}: {:?}", res.cycles);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn m_s_is_linear(cs in prop::collection::vec(-4i64..=4, 18), s in -3i64..=3) {
            let mk = |k: usize| {
                let c = &cs[6 * k..6 * k + 6];
                Poly::from_terms(2, [
                    (vec![0, 0], qi(c[0])), (vec![1, 0], qi(c[1])), (vec![0, 1], qi(c[2])),
                    (vec![2, 0], qi(c[3])), (vec![1, 1], qi(c[4])), (vec![0, 3], qi(c[5])),
                ])
            };
            let (v, p1, p2) = (mk(0), mk(1), mk(2));
            let r = |p: &Poly| RationalFn::from_poly(p.clone());
            let ms = |v: &Poly, p: &Poly, qq: &Poly| m_s(&DulacInstance::new(v.clone(), r(p), r(qq), qi(s))).unwrap();
            let sum = ms(&v, &(&p1 + &p2), &p2);
            let parts = ms(&v, &p1, &c2(0)).add(&ms(&v, &p2, &p2));
            prop_assert!(sum.equals(&parts));
            let v2 = &v + &p1;
            prop_assert!(ms(&v2, &p2, &p1).equals(&ms(&v, &p2, &p1).add(&ms(&p1, &p2, &p1))));
        }
    }
}
