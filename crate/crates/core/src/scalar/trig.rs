//! Exact trigonometric polynomials Σ c_k cos(kθ) + s_k sin(kθ) over `Q`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::algebra::{format_q, parse_q, q_to_f64, qi, UniPoly, Q};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Default)]
pub struct TrigPoly {
    // harmonic -> (cos, sin); the sin part of harmonic 0 is always zero
    terms: BTreeMap<u32, (Q, Q)>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn constant(c: Q) -> Self {
        TrigPoly::from_terms([(0, c, Q::zero())])
    }

    pub fn cos(k: u32) -> Self {
        TrigPoly::from_terms([(k, Q::one(), Q::zero())])
    }

    pub fn sin(k: u32) -> Self {
        TrigPoly::from_terms([(k, Q::zero(), Q::one())])
    }

    /// From `(k, cos_k, sin_k)` triples; repeated harmonics accumulate.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, Q, Q)>) -> Self {
        let mut p = TrigPoly::zero();
        for (k, c, s) in terms {
            p.add_term(k, c, s);
        }
        p
    }

    fn add_term(&mut self, k: u32, c: Q, s: Q) {
        let s = if k == 0 { Q::zero() } else { s };
        let e = self.terms.entry(k).or_insert_with(|| (Q::zero(), Q::zero()));
        e.0 += c;
        e.1 += s;
        if e.0.is_zero() && e.1.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Q, &Q)> {
        self.terms.iter().map(|(k, (c, s))| (*k, c, s))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_harmonic(&self) -> u32 {
        self.terms.keys().next_back().copied().unwrap_or(0)
    }

    /// Average over one period (the constant term).
    pub fn mean(&self) -> Q {
        self.terms.get(&0).map(|t| t.0.clone()).unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.terms
            .iter()
            .map(|(k, (c, s))| {
                let a = *k as f64 * theta;
                q_to_f64(c) * a.cos() + q_to_f64(s) * a.sin()
            })
            .sum()
    }

    pub fn scale(&self, f: &Q) -> TrigPoly {
        TrigPoly::from_terms(self.terms().map(|(k, c, s)| (k, c * f, s * f)))
    }

    pub fn add(&self, o: &TrigPoly) -> TrigPoly {
        let mut r = self.clone();
        for (k, c, s) in o.terms() {
            r.add_term(k, c.clone(), s.clone());
        }
        r
    }

    pub fn neg(&self) -> TrigPoly {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, o: &TrigPoly) -> TrigPoly {
        self.add(&o.neg())
    }

    /// Product by the product-to-sum identities.
    pub fn mul(&self, o: &TrigPoly) -> TrigPoly {
        let half = Q::new(1.into(), 2.into());
        let mut r = TrigPoly::zero();
        for (j, a, b) in self.terms() {
            for (k, c, d) in o.terms() {
                let sum = j + k;
                let diff = j.abs_diff(k);
                // sign of sin((j−k)θ) relative to sin(|j−k|θ)
                let sg = if j >= k { Q::one() } else { -Q::one() };
                // cos·cos = [cos(j−k) + cos(j+k)]/2
                let cc = a * c * &half;
                // sin·sin = [cos(j−k) − cos(j+k)]/2
                let ss = b * d * &half;
                // cos_j·sin_k = [sin(j+k) − sin(j−k)]/2
                let cs = a * d * &half;
                // sin_j·cos_k = [sin(j+k) + sin(j−k)]/2
                let sc = b * c * &half;
                r.add_term(sum, &cc - &ss, &cs + &sc);
                r.add_term(diff, &cc + &ss, (&sc - &cs) * &sg);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> TrigPoly {
        (0..e).fold(TrigPoly::constant(Q::one()), |acc, _| acc.mul(self))
    }

    /// θ ↦ θ + π: harmonic k picks up (−1)^k.
    pub fn shift_half_period(&self) -> TrigPoly {
        TrigPoly::from_terms(self.terms().map(|(k, c, s)| {
            if k % 2 == 1 {
                (k, -c.clone(), -s.clone())
            } else {
                (k, c.clone(), s.clone())
            }
        }))
    }

    pub fn derivative(&self) -> TrigPoly {
        TrigPoly::from_terms(self.terms().map(|(k, c, s)| {
            let kq = qi(k as i64);
            (k, s * &kq, -(c * &kq))
        }))
    }

    /// Periodic antiderivative vanishing at θ = 0; needs zero mean.
    pub fn antiderivative(&self) -> Result<TrigPoly> {
        if !self.mean().is_zero() {
            return Err(Error::domain("antiderivative of a trig polynomial with nonzero mean"));
        }
        let mut r = TrigPoly::from_terms(self.terms().map(|(k, c, s)| {
            let kq = qi(k as i64);
            (k, -(s / &kq), c / &kq)
        }));
        let at0: Q = r.terms().fold(Q::zero(), |acc, (_, c, _)| acc + c);
        r.add_term(0, -at0, Q::zero());
        Ok(r)
    }

    /// P(u) with f(θ)·(1+u²)^N = P(u) under u = tan(θ/2), N = max harmonic.
    pub fn half_angle_polynomial(&self) -> UniPoly {
        let n = self.max_harmonic();
        // cos θ = (1−u²)/(1+u²), sin θ = 2u/(1+u²); harmonic k via (1 + iu)^{2k}
        // expanded as Re/Im of ((1 − u²) + 2iu)^k times (1 + u²)^{N−k}.
        let one_plus = UniPoly::new(vec![qi(1), qi(0), qi(1)]);
        let mut total = UniPoly::new(vec![]);
        for (k, c, s) in self.terms() {
            // (re + i im) = ((1 − u²) + 2iu)^k
            let mut re = UniPoly::new(vec![qi(1)]);
            let mut im = UniPoly::new(vec![]);
            let a = UniPoly::new(vec![qi(1), qi(0), qi(-1)]);
            let b = UniPoly::new(vec![qi(0), qi(2)]);
            for _ in 0..k {
                let nre = re.mul(&a).sub(&im.mul(&b));
                let nim = re.mul(&b).add(&im.mul(&a));
                re = nre;
                im = nim;
            }
            let mut w = one_plus_pow(&one_plus, n - k);
            w = w.mul(&re.scale(c).add(&im.scale(s)));
            total = total.add(&w);
        }
        total
    }

    pub fn from_json(v: &Value) -> Result<(TrigPoly, Period)> {
        let hs = v
            .get("harmonics")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("trig polynomial needs a \"harmonics\" array".into()))?;
        let mut p = TrigPoly::zero();
        for h in hs {
            let k = h
                .get("k")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("harmonic without integer k: {h}")))?;
            let c = match h.get("cos") {
                Some(c) => json_q(c)?,
                None => Q::zero(),
            };
            let s = match h.get("sin") {
                Some(s) => json_q(s)?,
                None => Q::zero(),
            };
            if k == 0 && !s.is_zero() {
                return Err(Error::Parse("harmonic 0 cannot carry a sine term".into()));
            }
            p.add_term(k as u32, c, s);
        }
        let period = match v.get("period") {
            Some(t) => Period::parse(t)?,
            None => Period::two_pi(),
        };
        Ok((p, period))
    }

    pub fn to_json(&self, period: &Period) -> Value {
        let hs: Vec<Value> = self
            .terms()
            .map(|(k, c, s)| {
                let mut o = serde_json::Map::new();
                o.insert("k".into(), json!(k));
                if !c.is_zero() {
                    o.insert("cos".into(), json!(format_q(c)));
                }
                if !s.is_zero() {
                    o.insert("sin".into(), json!(format_q(s)));
                }
                Value::Object(o)
            })
            .collect();
        json!({ "harmonics": hs, "period": period.to_string() })
    }
}

fn one_plus_pow(base: &UniPoly, e: u32) -> UniPoly {
    (0..e).fold(UniPoly::new(vec![qi(1)]), |acc, _| acc.mul(base))
}

fn json_q(v: &Value) -> Result<Q> {
    match v {
        Value::String(s) => parse_q(s),
        Value::Number(n) => parse_q(&n.to_string()),
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms()
            .flat_map(|(k, c, s)| {
                let mut v = vec![];
                if k == 0 {
                    v.push(format_q(c));
                } else {
                    if !c.is_zero() {
                        v.push(format!("{}·cos({k}θ)", format_q(c)));
                    }
                    if !s.is_zero() {
                        v.push(format!("{}·sin({k}θ)", format_q(s)));
                    }
                }
                v
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Period of a scalar equation; harmonics are in the phase 2πt/T.
#[derive(Clone, Debug, PartialEq)]
pub enum Period {
    /// q·π
    PiMultiple(Q),
    Value(f64),
}

impl Period {
    pub fn two_pi() -> Self {
        Period::PiMultiple(qi(2))
    }

    pub fn value(&self) -> f64 {
        match self {
            Period::PiMultiple(q) => q_to_f64(q) * PI,
            Period::Value(v) => *v,
        }
    }

    /// Accepts "2*pi", "pi", "3/2*pi", "2pi" and plain numbers.
    pub fn parse(v: &Value) -> Result<Self> {
        let p = match v {
            Value::Number(n) => Period::Value(n.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) => {
                let t = s.trim().to_ascii_lowercase().replace(' ', "");
                if let Some(head) = t.strip_suffix("pi") {
                    let head = head.trim_end_matches('*');
                    let q = if head.is_empty() { qi(1) } else { parse_q(head)? };
                    Period::PiMultiple(q)
                } else {
                    Period::Value(
                        t.parse::<f64>().map_err(|e| Error::Parse(format!("period {s:?}: {e}")))?,
                    )
                }
            }
            other => return Err(Error::Parse(format!("invalid period {other}"))),
        };
        if !(p.value() > 0.0 && p.value().is_finite()) {
            return Err(Error::domain("period must be positive and finite"));
        }
        Ok(p)
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Period::PiMultiple(q) if q.is_one() => write!(f, "pi"),
            Period::PiMultiple(q) => write!(f, "{}*pi", format_q(q)),
            Period::Value(v) => write!(f, "{v}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q;

    fn sample(p: &TrigPoly, g: impl Fn(f64) -> f64) {
        for i in 0..17 {
            let t = 0.37 * i as f64;
            assert!((p.eval(t) - g(t)).abs() < 1e-12, "θ = {t}");
        }
    }

    #[test]
    fn products_match_pointwise_values() {
        let a = TrigPoly::from_terms([(0, q(1, 2), qi(0)), (1, qi(2), qi(-1)), (3, qi(0), q(1, 3))]);
        let b = TrigPoly::from_terms([(2, qi(1), qi(1)), (1, q(-3, 4), qi(0))]);
        let p = a.mul(&b);
        sample(&p, |t| a.eval(t) * b.eval(t));
        sample(&a.pow(3), |t| a.eval(t).powi(3));
        assert_eq!(TrigPoly::sin(1).pow(2).add(&TrigPoly::cos(1).pow(2)), TrigPoly::constant(qi(1)));
    }

    #[test]
    fn calculus() {
        let a = TrigPoly::from_terms([(1, qi(2), qi(-1)), (3, qi(0), q(1, 3))]);
        let ia = a.antiderivative().unwrap();
        assert_eq!(ia.derivative(), a);
        assert!(ia.eval(0.0).abs() < 1e-15);
        assert!(TrigPoly::constant(qi(1)).antiderivative().is_err());
        sample(&a.shift_half_period(), |t| a.eval(t + PI));
    }

    #[test]
    fn half_angle_substitution() {
        let f = TrigPoly::from_terms([(0, qi(1), qi(0)), (1, qi(2), qi(3)), (2, q(-1, 2), qi(1))]);
        let p = f.half_angle_polynomial();
        for i in 0..9 {
            let t = -2.5 + 0.6 * i as f64;
            let u = (t / 2.0).tan();
            let pu: f64 = p.coeffs().iter().rev().fold(0.0, |acc, c| acc * u + q_to_f64(c));
            assert!((f.eval(t) * (1.0 + u * u).powi(2) - pu).abs() < 1e-9);
        }
    }

    #[test]
    fn json_roundtrip() {
        let v: Value = serde_json::from_str(
            r#"{"harmonics": [{"k":0,"cos":"1/2"},{"k":1,"cos":"2","sin":"-3"}], "period":"2*pi"}"#,
        )
        .unwrap();
        let (p, per) = TrigPoly::from_json(&v).unwrap();
        assert_eq!(per, Period::two_pi());
        assert_eq!(p.mean(), q(1, 2));
        let back = TrigPoly::from_json(&p.to_json(&per)).unwrap();
        assert_eq!(back, (p, per));
        assert!(Period::parse(&json!("-1")).is_err());
        assert_eq!(Period::parse(&json!("pi")).unwrap(), Period::PiMultiple(qi(1)));
        assert!(TrigPoly::from_json(&json!({"harmonics": [{"k": 0, "sin": "1"}]})).is_err());
    }
}
