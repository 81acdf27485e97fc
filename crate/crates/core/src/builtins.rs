//! Named systems, so that standard runs need no input files.
//!
//! Names: `kou`, `chebyshev10`, `chebyshev:N,EPS`, `cimen3`, `cimenN`,
//! `loud:D,F`, `equivariant:N,K`, `chessboard`, `linear-centre`,
//! `homogeneous-cubic`, `melnikov-two-cycles`.

use crate::algebra::{q, x2, y2, Poly};
use crate::cycles::{equivariant_field, loud_field, MelnikovSpec};
use crate::error::{Error, Result};
use crate::flow::VectorField;
use crate::pwl::{chebyshev_system, PwlSystem};
use crate::stability::{chessboard_field, cimen_field};

pub const NAMES: &[&str] = &[
    "kou",
    "chebyshev10",
    "chebyshev:N,EPS",
    "cimen3",
    "loud:D,F",
    "equivariant:N,K",
    "chessboard",
    "linear-centre",
    "homogeneous-cubic",
    "melnikov-two-cycles",
];

/// x⁶ + (61/43)y³ − y = 0, y⁶ + (61/43)x³ − x = 0: five positive roots.
pub fn kou() -> Vec<Poly> {
    let k = q(61, 43);
    vec![&(&x2().pow(6) + &y2().pow(3).scale(&k)) - &y2(), &(&y2().pow(6) + &x2().pow(3).scale(&k)) - &x2()]
}

/// Coefficients (4, −5, 1) in ρ²: M vanishes at ρ² = 1 and ρ² = 4.
pub fn melnikov_two_cycles() -> Result<MelnikovSpec> {
    MelnikovSpec::from_c(2, 1, &[4.0, -5.0, 1.0], 1e-13)
}

fn split(name: &str) -> (&str, Option<&str>) {
    match name.split_once(':') {
        Some((a, b)) => (a, Some(b)),
        None => (name, None),
    }
}

fn args<T: std::str::FromStr>(name: &str, raw: Option<&str>, n: usize) -> Result<Vec<T>> {
    let raw = raw.ok_or_else(|| Error::Parse(format!("builtin '{name}' needs {n} parameters")))?;
    let v: Vec<T> = raw
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| Error::Parse(format!("bad parameter '{s}' in '{name}'"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Parse(format!("builtin '{name}' needs {n} parameters")));
    }
    Ok(v)
}

/// Polynomial vector field by name.
pub fn field(name: &str) -> Result<VectorField> {
    let (head, raw) = split(name);
    let vf = match head {
        "loud" => {
            let v: Vec<String> = args(name, raw, 2)?;
            let d = crate::algebra::parse_q(&v[0])?;
            let f = crate::algebra::parse_q(&v[1])?;
            loud_field(&d, &f)
        }
        "equivariant" => {
            let v: Vec<u32> = args(name, raw, 2)?;
            equivariant_field(v[0], v[1])
        }
        "chessboard" => chessboard_field(),
        "linear-centre" => VectorField::planar(-y2(), x2()).with_name("linear-centre"),
        "homogeneous-cubic" => VectorField::planar(-y2().pow(3), x2().pow(3)).with_name("homogeneous-cubic"),
        "melnikov-two-cycles" => melnikov_two_cycles()?.perturbed_field(1e-3),
        h if h.starts_with("cimen") => {
            let n: usize = h[5..].parse().map_err(|_| Error::Parse(format!("unknown builtin '{name}'")))?;
            cimen_field(n)?
        }
        _ => return Err(Error::Parse(format!("unknown builtin field '{name}'"))),
    };
    Ok(vf.with_name(name))
}

/// Polynomial system (for root census) by name.
pub fn system(name: &str) -> Result<Vec<Poly>> {
    match name {
        "kou" => Ok(kou()),
        _ => Err(Error::Parse(format!("unknown builtin system '{name}'"))),
    }
}

/// Polynomial system from JSON: either a bare array of polynomials or
/// `{"equations": [...]}`.
pub fn system_from_json(v: &serde_json::Value) -> Result<Vec<Poly>> {
    let eqs = match v {
        serde_json::Value::Array(a) => a,
        _ => v
            .get("equations")
            .and_then(serde_json::Value::as_array)
            .ok_or_else(|| Error::Parse("system needs an 'equations' array".into()))?,
    };
    if eqs.is_empty() {
        return Err(Error::Parse("empty polynomial system".into()));
    }
    let polys: Vec<Poly> = eqs.iter().map(|e| Ok(crate::algebra::json::poly_from_json(e)?.1)).collect::<Result<_>>()?;
    let n = polys.iter().map(Poly::nvars).max().unwrap_or(0).max(polys.len());
    Ok(polys.into_iter().map(|p| p.extend_vars(n)).collect())
}

/// Piecewise-linear system by name.
pub fn pwl(name: &str) -> Result<PwlSystem> {
    let (head, raw) = split(name);
    match head {
        "chebyshev10" => chebyshev_system(10, 1e-3),
        "chebyshev" => {
            let v: Vec<f64> = args(name, raw, 2)?;
            if v[0] < 1.0 || v[0].fract() != 0.0 {
                return Err(Error::Parse(format!("bad degree in '{name}'")));
            }
            chebyshev_system(v[0] as u32, v[1])
        }
        _ => Err(Error::Parse(format!("unknown builtin piecewise system '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        assert_eq!(system("kou").unwrap().len(), 2);
        assert!(field("loud:-1/2,1/2").is_ok());
        assert!(field("loud:-0.5,0.5").is_ok());
        assert!(field("equivariant:1,1").is_ok());
        assert_eq!(field("cimen3").unwrap().polys().unwrap().len(), 3);
        assert!(pwl("chebyshev:4,0.001").is_ok());
        assert!(pwl("chebyshev10").is_ok());
    }

    #[test]
    fn json_specs() {
        let sys: Vec<serde_json::Value> = kou().iter().map(crate::algebra::json::poly_to_json).collect();
        let back = system_from_json(&serde_json::json!({ "equations": sys })).unwrap();
        assert_eq!(back, kou());
        assert!(system_from_json(&serde_json::json!([])).is_err());
        let v = serde_json::json!({"kind": "polynomial", "components": [
            {"vars": ["x", "y"], "terms": [{"e": [0, 1], "c": "-1"}]},
            {"vars": ["x", "y"], "terms": [{"e": [1, 0], "c": "1"}]}]});
        let f = VectorField::from_json(&v).unwrap();
        assert_eq!(f.eval_vec(&[1.0, 2.0]), vec![-2.0, 1.0]);
        let b = VectorField::from_json(&serde_json::json!({"kind": "builtin:chessboard"})).unwrap();
        assert_eq!(b.degree(), chessboard_field().degree());
        assert!(VectorField::from_json(&serde_json::json!({"kind": "spline", "components": []})).is_err());
        assert!(VectorField::from_json(&serde_json::json!({"kind": "polynomial"})).is_err());
    }

    #[test]
    fn bad_names() {
        assert!(field("nope").is_err());
        assert!(field("loud:1").is_err());
        assert!(field("loud:a,b").is_err());
        assert!(field("cimenx").is_err());
        assert!(system("chebyshev10").is_err());
        assert!(pwl("chebyshev:2.5,0.1").is_err());
    }
}
