//! Periodic scalar equations ẋ = Σ A_j(t) x^{e_j}: shooting, periodic-orbit
//! counting, the rigid-system reduction and the singular equation x^p x″ = f.

mod rigid;
mod singular;
mod trig;

pub use rigid::{displacement_series, rigid_lyapunov, rigid_to_scalar, RigidParams};
pub use singular::{singular_necessary, singular_shoot, Necessary, NecessaryVerdict, ShootResult};
pub use trig::{Period, TrigPoly};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::q_to_f64;
use crate::cycles::{CycleClass, CLOSURE_TOL, NON_HYPERBOLIC_TOL};
use crate::error::{Error, Result};
use crate::flow::{integrate, FlowError, IntegrateOptions};
use crate::numeric::brent;

/// ẋ = Σ A_j(2πt/T) x^{e_j}.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicScalarEq {
    pub terms: Vec<(u32, TrigPoly)>,
    pub period: Period,
}

impl PeriodicScalarEq {
    pub fn new(terms: Vec<(u32, TrigPoly)>, period: Period) -> Self {
        let mut merged: Vec<(u32, TrigPoly)> = Vec::new();
        for (e, a) in terms {
            match merged.iter_mut().find(|(f, _)| *f == e) {
                Some((_, b)) => *b = b.add(&a),
                None => merged.push((e, a)),
            }
        }
        merged.retain(|(_, a)| !a.is_zero());
        merged.sort_by_key(|(e, _)| std::cmp::Reverse(*e));
        PeriodicScalarEq { terms: merged, period }
    }

    /// Abel equation ẋ = A₃x³ + A₂x² + A₁x (+ A₀).
    pub fn abel(a3: TrigPoly, a2: TrigPoly, a1: TrigPoly, a0: TrigPoly) -> Self {
        PeriodicScalarEq::new(vec![(3, a3), (2, a2), (1, a1), (0, a0)], Period::two_pi())
    }

    pub fn coefficient(&self, exponent: u32) -> TrigPoly {
        self.terms
            .iter()
            .find(|(e, _)| *e == exponent)
            .map(|(_, a)| a.clone())
            .unwrap_or_default()
    }

    fn compile(&self) -> CompiledEq {
        let omega = 2.0 * std::f64::consts::PI / self.period.value();
        CompiledEq {
            omega,
            terms: self
                .terms
                .iter()
                .map(|(e, a)| {
                    (*e as i32, a.terms().map(|(k, c, s)| (k as f64, q_to_f64(c), q_to_f64(s))).collect())
                })
                .collect(),
        }
    }

    /// Right-hand side at (t, x).
    pub fn rhs(&self, t: f64, x: f64) -> f64 {
        self.compile().eval(t, x)
    }

    /// {"period": "2*pi", "terms": [{"power": 3, "harmonics": [...]}, ...]}
    pub fn from_json(v: &Value) -> Result<Self> {
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("scalar equation needs a \"terms\" array".into()))?;
        let mut out = Vec::new();
        for t in terms {
            let e = t
                .get("power")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse(format!("term without integer power: {t}")))?;
            let (a, _) = TrigPoly::from_json(t)?;
            out.push((e as u32, a));
        }
        let period = match v.get("period") {
            Some(p) => Period::parse(p)?,
            None => Period::two_pi(),
        };
        Ok(PeriodicScalarEq::new(out, period))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(e, a)| {
                let mut v = a.to_json(&self.period);
                let o = v.as_object_mut().unwrap();
                o.remove("period");
                o.insert("power".into(), json!(e));
                v
            })
            .collect();
        json!({ "period": self.period.to_string(), "terms": terms })
    }
}

struct CompiledEq {
    omega: f64,
    terms: Vec<(i32, Vec<(f64, f64, f64)>)>,
}

impl CompiledEq {
    fn eval(&self, t: f64, x: f64) -> f64 {
        let ph = self.omega * t;
        self.terms
            .iter()
            .map(|(e, hs)| {
                let a: f64 = hs.iter().map(|(k, c, s)| c * (k * ph).cos() + s * (k * ph).sin()).sum();
                a * x.powi(*e)
            })
            .sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ScalarOutcome {
    Value { x: f64 },
    /// Escape at `t`; `sign` is the direction of the escape.
    BlowUp { t: f64, sign: i8 },
}

impl ScalarOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            ScalarOutcome::Value { x } => Some(*x),
            ScalarOutcome::BlowUp { .. } => None,
        }
    }

    /// Value with escapes mapped to ±∞, for bracketing.
    fn signed(&self) -> f64 {
        match self {
            ScalarOutcome::Value { x } => *x,
            ScalarOutcome::BlowUp { sign, .. } => *sign as f64 * f64::INFINITY,
        }
    }
}

const ESCAPE_NORM: f64 = 1e8;

/// Solves from x(t0) = x0 up to t1.
pub fn scalar_solve(eq: &PeriodicScalarEq, t0: f64, t1: f64, x0: f64, tol: f64) -> Result<ScalarOutcome> {
    let c = eq.compile();
    let field = (1usize, |t: f64, x: &[f64], out: &mut [f64]| out[0] = c.eval(t, x[0]));
    let opts = IntegrateOptions { max_norm: Some(ESCAPE_NORM), ..IntegrateOptions::with_tol(tol) };
    match integrate(&field, &[x0], t0, t1, &opts, &[]) {
        Ok(tr) => Ok(ScalarOutcome::Value { x: tr.final_state[0] }),
        Err(FlowError::BlowUp { t, state, .. }) => {
            Ok(ScalarOutcome::BlowUp { t, sign: if state[0] > 0.0 { 1 } else { -1 } })
        }
        Err(e) => Err(e.into()),
    }
}

/// φ(T; ρ): the solution with x(0) = ρ after one period.
pub fn scalar_flow(eq: &PeriodicScalarEq, rho: f64, tol: f64) -> Result<ScalarOutcome> {
    if !rho.is_finite() {
        return Err(Error::domain("initial value must be finite"));
    }
    scalar_solve(eq, 0.0, eq.period.value(), rho, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicSolution {
    pub rho: f64,
    pub multiplier: f64,
    pub classification: CycleClass,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicCount {
    pub solutions: Vec<PeriodicSolution>,
    pub continuum: bool,
    /// Grid points whose solution escaped before one period, with escape time.
    pub blowups: Vec<(f64, f64)>,
    pub samples: Vec<(f64, f64)>,
    pub failures: Vec<(f64, String)>,
}

const SHOOT_TOL: f64 = 1e-12;

/// Isolated fixed points of ρ ↦ φ(T; ρ) on a grid inside `range`.
///
/// Escapes count as ±∞ when bracketing, so a fixed point sitting at the
/// edge of the region of bounded solutions is still found.
pub fn count_periodic(eq: &PeriodicScalarEq, range: (f64, f64), grid: &[f64]) -> Result<PeriodicCount> {
    if grid.iter().any(|r| *r < range.0 || *r > range.1) {
        return Err(Error::domain("grid point outside the admissible range"));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let results: Vec<(f64, Result<ScalarOutcome>)> =
        grid.par_iter().map(|&r| (r, scalar_flow(eq, r, SHOOT_TOL))).collect();
    let mut samples = Vec::new();
    let mut blowups = Vec::new();
    let mut failures = Vec::new();
    let mut signed = Vec::new();
    for (r, res) in results {
        match res {
            Ok(o) => {
                match o {
                    ScalarOutcome::Value { x } => samples.push((r, x)),
                    ScalarOutcome::BlowUp { t, .. } => blowups.push((r, t)),
                }
                signed.push((r, o.signed() - r));
            }
            Err(e) => failures.push((r, e.to_string())),
        }
    }
    let continuum = samples.len() >= 2 && samples.iter().all(|(r, x)| (x - r).abs() < CLOSURE_TOL);
    let mut roots: Vec<f64> = Vec::new();
    if !continuum {
        let disp = |r: f64| match scalar_flow(eq, r, SHOOT_TOL) {
            Ok(o) => o.signed() - r,
            Err(_) => f64::NAN,
        };
        for (r, d) in &signed {
            if d.abs() < 1e-13 {
                roots.push(*r);
            }
        }
        for w in signed.windows(2) {
            let ((r0, d0), (r1, d1)) = (w[0], w[1]);
            if d0.abs() >= 1e-13 && d1.abs() >= 1e-13 && d0.signum() != d1.signum() {
                if d0.is_infinite() && d1.is_infinite() {
                    continue;
                }
                if let Some(root) = bisect_signed(&disp, r0, r1, d0) {
                    roots.push(root);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let solutions = roots
        .par_iter()
        .filter_map(|&rho| {
            let m = multiplier(eq, rho)?;
            let classification = if (m - 1.0).abs() < NON_HYPERBOLIC_TOL {
                CycleClass::NonHyperbolicCandidate
            } else if m.abs() < 1.0 {
                CycleClass::HyperbolicStable
            } else {
                CycleClass::HyperbolicUnstable
            };
            Some(PeriodicSolution { rho, multiplier: m, classification })
        })
        .collect();
    Ok(PeriodicCount { solutions, continuum, blowups, samples, failures })
}

// Brent when both ends are finite, otherwise bisection down to 1e-12.
fn bisect_signed(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, fa: f64) -> Option<f64> {
    if let (true, true) = (fa.is_finite(), f(b).is_finite()) {
        if let Some(r) = brent(|r| f(r), a, b, 1e-12) {
            return Some(r);
        }
    }
    let sa = fa.signum();
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 * a.abs().max(1.0) {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm.is_nan() {
            return None;
        }
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// dφ/dρ by central differences with one Richardson step.
fn multiplier(eq: &PeriodicScalarEq, rho: f64) -> Option<f64> {
    let phi = |r: f64| scalar_flow(eq, r, SHOOT_TOL).ok()?.value();
    let d = |h: f64| Some((phi(rho + h)? - phi(rho - h)?) / (2.0 * h));
    let h = 1e-4 * rho.abs().max(1e-2);
    match (d(h), d(h / 2.0)) {
        (Some(d1), Some(d2)) => Some((4.0 * d2 - d1) / 3.0),
        // steep or escaping neighbourhood: fall back to a small one-sided step
        _ => {
            let h = 1e-8 * rho.abs().max(1.0);
            let (p0, pm) = (phi(rho)?, phi(rho - h)?);
            Some((p0 - pm) / h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qi};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(v: i64) -> TrigPoly {
        TrigPoly::constant(qi(v))
    }

    #[test]
    fn linear_equation_converges_to_its_periodic_solution() {
        // ẋ = −x + sin t; periodic solution (sin t − cos t)/2
        let eq = PeriodicScalarEq::new(vec![(1, c(-1)), (0, TrigPoly::sin(1))], Period::two_pi());
        let mut x = 0.0;
        for _ in 0..20 {
            x = scalar_flow(&eq, x, 1e-12).unwrap().value().unwrap();
        }
        assert!((x + 0.5).abs() < 1e-9);
        let direct = 0.5 * (-2.0 * PI).exp() - 0.5;
        assert!((scalar_flow(&eq, 0.0, 1e-12).unwrap().value().unwrap() - direct).abs() < 1e-9);
        let res = count_periodic(&eq, (-2.0, 2.0), &[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap();
        assert_eq!(res.solutions.len(), 1);
        assert!((res.solutions[0].rho + 0.5).abs() < 1e-9);
        assert!((res.solutions[0].multiplier - (-2.0 * PI).exp()).abs() < 1e-7);
    }

    #[test]
    fn quadratic_blows_up_at_one() {
        let eq = PeriodicScalarEq::new(vec![(2, c(1))], Period::Value(2.0));
        match scalar_flow(&eq, 1.0, 1e-12).unwrap() {
            ScalarOutcome::BlowUp { t, sign } => {
                assert!((t - 1.0).abs() < 1e-6);
                assert_eq!(sign, 1);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cubic_with_cosine_returns() {
        let eq = PeriodicScalarEq::new(vec![(3, TrigPoly::cos(1))], Period::two_pi());
        let x = scalar_flow(&eq, 0.1, 1e-12).unwrap().value().unwrap();
        assert!((x - 0.1).abs() < 1e-9);
        // closed form x² = 1/(x₀⁻² − 2 sin t)
        let half = scalar_solve(&eq, 0.0, 1.0, 0.5, 1e-12).unwrap().value().unwrap();
        assert!((half - 1.0 / (4.0 - 2.0 * 1f64.sin()).sqrt()).abs() < 1e-9);
        let grid: Vec<f64> = (-5..=5).map(|i| 0.05 * i as f64).collect();
        let res = count_periodic(&eq, (-0.3, 0.3), &grid).unwrap();
        assert!(res.continuum);
        assert!(res.solutions.is_empty());
    }

    #[test]
    fn riccati_constant_solutions() {
        let eq = PeriodicScalarEq::new(vec![(2, c(1)), (0, c(-1))], Period::two_pi());
        let grid: Vec<f64> = (0..=12).map(|i| -3.0 + 0.5 * i as f64 + 0.03).filter(|r| *r <= 3.0).collect();
        let res = count_periodic(&eq, (-3.0, 3.0), &grid).unwrap();
        assert_eq!(res.solutions.len(), 2, "{res:?}");
        assert!((res.solutions[0].rho + 1.0).abs() < 1e-9);
        assert!((res.solutions[1].rho - 1.0).abs() < 1e-9);
        assert_eq!(res.solutions[0].classification, CycleClass::HyperbolicStable);
        assert_eq!(res.solutions[1].classification, CycleClass::HyperbolicUnstable);
        assert!(!res.blowups.is_empty());
    }

    #[test]
    fn grid_outside_range_is_rejected() {
        let eq = PeriodicScalarEq::new(vec![(1, c(-1))], Period::two_pi());
        assert!(count_periodic(&eq, (0.0, 1.0), &[0.5, 2.0]).is_err());
        assert!(scalar_flow(&eq, f64::NAN, 1e-10).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let eq = PeriodicScalarEq::abel(c(1), TrigPoly::sin(1), TrigPoly::cos(2).scale(&q(1, 2)), TrigPoly::zero());
        let back = PeriodicScalarEq::from_json(&eq.to_json()).unwrap();
        assert_eq!(back, eq);
        assert!(PeriodicScalarEq::from_json(&json!({"terms": [{"harmonics": []}]})).is_err());
    }

    fn small_trig(v: &[i8]) -> TrigPoly {
        TrigPoly::from_terms([(0, q(v[0] as i64, 8), qi(0)), (1, q(v[1] as i64, 8), q(v[2] as i64, 8))])
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        // φ(T; ·) of a Riccati equation is a Möbius map: cross-ratios survive.
        #[test]
        fn riccati_return_map_is_mobius(a in prop::collection::vec(-8i8..=8, 3),
                                        b in prop::collection::vec(-8i8..=8, 3),
                                        cc in prop::collection::vec(-8i8..=8, 3)) {
            let eq = PeriodicScalarEq::new(
                vec![(2, small_trig(&a).scale(&q(1, 4))), (1, small_trig(&b)), (0, small_trig(&cc).scale(&q(1, 4)))],
                Period::two_pi(),
            );
            let pts = [-0.3, -0.1, 0.05, 0.2];
            let imgs: Option<Vec<f64>> = pts.iter().map(|r| scalar_flow(&eq, *r, 1e-13).ok()?.value()).collect();
            let Some(imgs) = imgs else { return Ok(()) };
            let cr = |p: &[f64]| (p[0] - p[2]) * (p[1] - p[3]) / ((p[0] - p[3]) * (p[1] - p[2]));
            prop_assert!((cr(&pts) - cr(&imgs)).abs() < 1e-6 * cr(&pts).abs().max(1.0));
        }

        // Sign-definite cubic coefficient: at most three periodic solutions.
        #[test]
        fn abel_bound(a2 in prop::collection::vec(-8i8..=8, 3), a1 in prop::collection::vec(-8i8..=8, 3)) {
            let eq = PeriodicScalarEq::abel(c(1), small_trig(&a2), small_trig(&a1), TrigPoly::zero());
            let grid: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64 + 1e-3).filter(|r| *r <= 2.0).collect();
            let res = count_periodic(&eq, (-2.0, 2.0), &grid).unwrap();
            prop_assert!(res.solutions.len() <= 3, "{:?}", res.solutions);
        }
    }
}
