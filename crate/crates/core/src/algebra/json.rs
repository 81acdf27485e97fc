//! Polynomial JSON schema:
//! `{"vars": ["x","y"], "terms": [{"e": [i, j], "c": "num/den"}, ...]}`.
//! Complex coefficients are written `{"re": "...", "im": "..."}`.

use num_traits::Zero;
use serde_json::{json, Value};

use super::coeff::{format_q, parse_q, GaussQ, Q};
use super::poly::{GaussPoly, Poly};
use super::rational_fn::RationalFn;
use crate::error::{Error, Result};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn coeff_value(v: &Value) -> Result<GaussQ> {
    match v {
        Value::String(s) => Ok(GaussQ::new(parse_q(s)?, Q::zero())),
        Value::Number(n) => Ok(GaussQ::new(parse_q(&n.to_string())?, Q::zero())),
        Value::Object(o) => {
            let part = |k: &str| -> Result<Q> {
                match o.get(k) {
                    None => Ok(Q::zero()),
                    Some(Value::String(s)) => parse_q(s),
                    Some(Value::Number(n)) => parse_q(&n.to_string()),
                    Some(_) => Err(parse_err(format!("bad '{k}' in complex coefficient"))),
                }
            };
            Ok(GaussQ::new(part("re")?, part("im")?))
        }
        _ => Err(parse_err("coefficient must be a string, number or {re, im}")),
    }
}

/// Parses the schema into a Gaussian-rational polynomial and its variable names.
pub fn gauss_poly_from_json(v: &Value) -> Result<(Vec<String>, GaussPoly)> {
    let vars: Vec<String> = v
        .get("vars")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("polynomial needs a 'vars' array"))?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| parse_err("variable names must be strings")))
        .collect::<Result<_>>()?;
    let n = vars.len();
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_err("polynomial needs a 'terms' array"))?;
    let mut p = GaussPoly::zero(n);
    for t in terms {
        let e: Vec<u32> = t
            .get("e")
            .and_then(Value::as_array)
            .ok_or_else(|| parse_err("term needs an exponent array 'e'"))?
            .iter()
            .map(|x| x.as_u64().map(|x| x as u32).ok_or_else(|| parse_err("exponents must be non-negative integers")))
            .collect::<Result<_>>()?;
        if e.len() != n {
            return Err(parse_err(format!("exponent vector {e:?} does not match {n} variables")));
        }
        let c = coeff_value(t.get("c").ok_or_else(|| parse_err("term needs a coefficient 'c'"))?)?;
        p = &p + &GaussPoly::monomial(e, c);
    }
    Ok((vars, p))
}

/// Parses a real polynomial; complex coefficients with nonzero imaginary part are rejected.
pub fn poly_from_json(v: &Value) -> Result<(Vec<String>, Poly)> {
    let (vars, p) = gauss_poly_from_json(v)?;
    if !p.im().is_zero() {
        return Err(parse_err("expected real coefficients"));
    }
    Ok((vars, p.re()))
}

pub fn poly_from_str(s: &str) -> Result<Poly> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(e.to_string()))?;
    Ok(poly_from_json(&v)?.1)
}

fn default_vars(n: usize) -> Vec<String> {
    const NAMES: [&str; 4] = ["x", "y", "z", "w"];
    (0..n)
        .map(|i| if n <= 4 { NAMES[i].to_string() } else { format!("x{i}") })
        .collect()
}

/// Serialises in canonical graded-lex order, so equal polynomials give equal bytes.
pub fn poly_to_json(p: &Poly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| json!({"e": m.exps(), "c": format_q(c)}))
        .collect();
    json!({"vars": default_vars(p.nvars()), "terms": terms})
}

pub fn gauss_poly_to_json(p: &GaussPoly) -> Value {
    let terms: Vec<Value> = p
        .terms()
        .map(|(m, c)| json!({"e": m.exps(), "c": {"re": format_q(&c.re), "im": format_q(&c.im)}}))
        .collect();
    json!({"vars": default_vars(p.nvars()), "terms": terms})
}

/// A component is either a bare polynomial or `{"num": poly, "den": poly}`.
pub fn rational_from_json(v: &Value) -> Result<RationalFn> {
    match (v.get("num"), v.get("den")) {
        (Some(n), Some(d)) => RationalFn::new(poly_from_json(n)?.1, poly_from_json(d)?.1),
        (Some(n), None) => Ok(RationalFn::from_poly(poly_from_json(n)?.1)),
        _ => Ok(RationalFn::from_poly(poly_from_json(v)?.1)),
    }
}

pub fn rational_to_json(r: &RationalFn) -> Value {
    json!({"num": poly_to_json(r.num()), "den": poly_to_json(r.den())})
}
