use std::fmt;
use std::sync::Arc;

use serde_json::Value;

use crate::algebra::json::{poly_from_json, rational_from_json};
use crate::algebra::{Poly, RationalFn};
use crate::error::{Error, Result};

/// Right-hand side of an autonomous or time-dependent ODE.
pub trait Field: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]);
    /// True when `x` is (numerically) on the pole set.
    fn at_pole(&self, _x: &[f64]) -> bool {
        false
    }
}

/// Polynomial compiled to floating terms for fast evaluation.
#[derive(Clone, Debug)]
struct FastPoly {
    terms: Vec<(Vec<u32>, f64)>,
    maxdeg: Vec<u32>,
}

impl FastPoly {
    fn new(p: &Poly, n: usize) -> Self {
        let p = p.extend_vars(n);
        let terms: Vec<(Vec<u32>, f64)> = p
            .terms()
            .map(|(m, c)| (m.exps().to_vec(), crate::algebra::q_to_f64(c)))
            .collect();
        let maxdeg = (0..n)
            .map(|i| terms.iter().map(|t| t.0[i]).max().unwrap_or(0))
            .collect();
        FastPoly { terms, maxdeg }
    }

    fn eval(&self, x: &[f64], pw: &mut Vec<Vec<f64>>) -> f64 {
        pw.resize(x.len(), Vec::new());
        for (i, &xi) in x.iter().enumerate() {
            let row = &mut pw[i];
            row.clear();
            let mut v = 1.0;
            for _ in 0..=self.maxdeg[i] {
                row.push(v);
                v *= xi;
            }
        }
        self.terms
            .iter()
            .map(|(e, c)| e.iter().enumerate().fold(*c, |acc, (i, &k)| acc * pw[i][k as usize]))
            .sum()
    }
}

type Callable = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone)]
enum Components {
    Polynomial(Vec<Poly>, Vec<FastPoly>),
    Rational(Vec<RationalFn>, Vec<(FastPoly, FastPoly)>),
    Callable(Callable),
}

/// Vector field with polynomial, rational or black-box components.
#[derive(Clone)]
pub struct VectorField {
    dim: usize,
    comps: Components,
    pub name: Option<String>,
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.comps {
            Components::Polynomial(p, _) => write!(f, "VectorField{p:?}"),
            Components::Rational(r, _) => write!(f, "VectorField{r:?}"),
            Components::Callable(_) => write!(f, "VectorField(<callable {}>)", self.name.as_deref().unwrap_or("?")),
        }
    }
}

impl VectorField {
    pub fn polynomial(comps: Vec<Poly>) -> Result<Self> {
        let dim = comps.len();
        if dim == 0 || comps.iter().any(|p| p.nvars() > dim) {
            return Err(Error::domain("field components must use at most `dim` variables"));
        }
        let comps: Vec<Poly> = comps.into_iter().map(|p| p.extend_vars(dim)).collect();
        let fast = comps.iter().map(|p| FastPoly::new(p, dim)).collect();
        Ok(VectorField { dim, comps: Components::Polynomial(comps, fast), name: None })
    }

    pub fn planar(p: Poly, q: Poly) -> Self {
        Self::polynomial(vec![p, q]).expect("planar polynomial field")
    }

    pub fn rational(comps: Vec<RationalFn>) -> Result<Self> {
        let dim = comps.len();
        if dim == 0 || comps.iter().any(|p| p.nvars() > dim) {
            return Err(Error::domain("field components must use at most `dim` variables"));
        }
        let comps: Vec<RationalFn> = comps
            .into_iter()
            .map(|r| RationalFn::new(r.num().extend_vars(dim), r.den().extend_vars(dim)))
            .collect::<Result<_>>()?;
        let fast = comps
            .iter()
            .map(|r| (FastPoly::new(r.num(), dim), FastPoly::new(r.den(), dim)))
            .collect();
        Ok(VectorField { dim, comps: Components::Rational(comps, fast), name: None })
    }

    pub fn callable(
        dim: usize,
        name: &str,
        f: impl Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        VectorField { dim, comps: Components::Callable(Arc::new(f)), name: Some(name.to_string()) }
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    pub fn polys(&self) -> Option<&[Poly]> {
        match &self.comps {
            Components::Polynomial(p, _) => Some(p),
            _ => None,
        }
    }

    pub fn rationals(&self) -> Option<Vec<RationalFn>> {
        match &self.comps {
            Components::Polynomial(p, _) => Some(p.iter().cloned().map(RationalFn::from_poly).collect()),
            Components::Rational(r, _) => Some(r.clone()),
            Components::Callable(_) => None,
        }
    }

    /// Maximal total degree of the polynomial components.
    pub fn degree(&self) -> Option<u32> {
        self.polys().map(|ps| ps.iter().filter_map(Poly::degree).max().unwrap_or(0))
    }

    /// Total number of monomials appearing in the components.
    pub fn monomial_count(&self) -> Option<usize> {
        match &self.comps {
            Components::Polynomial(p, _) => Some(p.iter().map(Poly::nterms).sum()),
            Components::Rational(r, _) => Some(r.iter().map(|r| r.num().nterms() + r.den().nterms()).sum()),
            Components::Callable(_) => None,
        }
    }

    /// Field spec: `{"kind": "polynomial" | "rational" | "builtin:<name>",
    /// "components": [...]}`. Components use the polynomial schema; rational
    /// ones may be `{"num": .., "den": ..}`. `kind` defaults to polynomial.
    pub fn from_json(v: &Value) -> Result<Self> {
        let kind = match v.get("kind") {
            None => "polynomial",
            Some(Value::String(s)) => s.as_str(),
            Some(_) => return Err(Error::Parse("'kind' must be a string".into())),
        };
        if let Some(name) = kind.strip_prefix("builtin:") {
            return crate::builtins::field(name);
        }
        let comps = v
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("field spec needs a 'components' array".into()))?;
        let vf = match kind {
            "polynomial" => Self::polynomial(comps.iter().map(|c| Ok(poly_from_json(c)?.1)).collect::<Result<_>>()?)?,
            "rational" => Self::rational(comps.iter().map(rational_from_json).collect::<Result<_>>()?)?,
            other => return Err(Error::Parse(format!("unknown field kind '{other}'"))),
        };
        Ok(match v.get("name").and_then(Value::as_str) {
            Some(n) => vf.with_name(n),
            None => vf,
        })
    }

    pub fn eval_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval(0.0, x, &mut out);
        out
    }
}

impl Field for VectorField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        let mut pw = Vec::new();
        match &self.comps {
            Components::Polynomial(_, fast) => {
                for (o, p) in out.iter_mut().zip(fast) {
                    *o = p.eval(x, &mut pw);
                }
            }
            Components::Rational(_, fast) => {
                for (o, (n, d)) in out.iter_mut().zip(fast) {
                    *o = n.eval(x, &mut pw) / d.eval(x, &mut pw);
                }
            }
            Components::Callable(f) => f(t, x, out),
        }
    }

    fn at_pole(&self, x: &[f64]) -> bool {
        match &self.comps {
            Components::Rational(_, fast) => {
                let mut pw = Vec::new();
                fast.iter().any(|(_, d)| d.eval(x, &mut pw).abs() < 1e-12)
            }
            _ => false,
        }
    }
}

impl<F: Fn(f64, &[f64], &mut [f64]) + Sync> Field for (usize, F) {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&self, t: f64, x: &[f64], out: &mut [f64]) {
        (self.1)(t, x, out)
    }
}
