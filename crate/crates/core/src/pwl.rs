//! Two-zone piecewise-linear systems separated by a graph y = c(x):
//! crossing dynamics, crossing limit cycles and invariant-curve checks.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::json::{poly_from_json, poly_to_json};
use crate::algebra::{chebyshev_t, format_q, parse_q, q, q_from_f64, q_to_f64, qi, Poly, Q};
use crate::cycles::{pi_prime_arcs, CycleClass, OrbitArc, CLOSURE_TOL, NON_HYPERBOLIC_TOL};
use crate::error::{Error, Result};
use crate::flow::{integrate, Event, FlowError, IntegrateOptions, Trajectory, VectorField};
use crate::numeric::brent;

/// ż = A z + b with exact entries.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineField {
    pub a: [[Q; 2]; 2],
    pub b: [Q; 2],
}

impl AffineField {
    pub fn new(a: [[Q; 2]; 2], b: [Q; 2]) -> Self {
        AffineField { a, b }
    }

    /// Component polynomials (P, Q) in (x, y).
    pub fn polys(&self) -> (Poly, Poly) {
        let row = |r: &[Q; 2], c: &Q| {
            Poly::from_terms(2, [(vec![1, 0], r[0].clone()), (vec![0, 1], r[1].clone()), (vec![0, 0], c.clone())])
        };
        (row(&self.a[0], &self.b[0]), row(&self.a[1], &self.b[1]))
    }

    pub fn vector_field(&self) -> VectorField {
        let (p, q) = self.polys();
        VectorField::planar(p, q)
    }

    pub fn eval(&self, z: [f64; 2]) -> [f64; 2] {
        let f = |r: &[Q; 2], c: &Q| q_to_f64(&r[0]) * z[0] + q_to_f64(&r[1]) * z[1] + q_to_f64(c);
        [f(&self.a[0], &self.b[0]), f(&self.a[1], &self.b[1])]
    }

    fn to_json(&self) -> Value {
        let s = |v: &Q| json!(format_q(v));
        json!({
            "A": [[s(&self.a[0][0]), s(&self.a[0][1])], [s(&self.a[1][0]), s(&self.a[1][1])]],
            "b": [s(&self.b[0]), s(&self.b[1])],
        })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let num = |v: &Value| -> Result<Q> {
            match v {
                Value::String(s) => parse_q(s),
                Value::Number(n) => parse_q(&n.to_string()),
                _ => Err(Error::Parse(format!("expected a number, got {v}"))),
            }
        };
        let arr = |v: Option<&Value>, what: &str| -> Result<Vec<Value>> {
            v.and_then(Value::as_array)
                .filter(|a| a.len() == 2)
                .cloned()
                .ok_or_else(|| Error::Parse(format!("affine field needs a 2-element '{what}'")))
        };
        let rows = arr(v.get("A"), "A")?;
        let r0 = arr(Some(&rows[0]), "A row")?;
        let r1 = arr(Some(&rows[1]), "A row")?;
        let b = arr(v.get("b"), "b")?;
        Ok(AffineField::new(
            [[num(&r0[0])?, num(&r0[1])?], [num(&r1[0])?, num(&r1[1])?]],
            [num(&b[0])?, num(&b[1])?],
        ))
    }
}

#[derive(Clone, Debug)]
pub struct PwlSystem {
    /// Active where y > c(x).
    pub upper: AffineField,
    /// Active where y < c(x).
    pub lower: AffineField,
    /// c(x), one variable.
    pub separation: Poly,
    pub eps: Option<f64>,
    pub n: Option<u32>,
    sep_f: Vec<f64>,
    dsep_f: Vec<f64>,
    upper_vf: VectorField,
    lower_vf: VectorField,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Zone {
    Upper,
    Lower,
}

impl Zone {
    fn other(self) -> Zone {
        match self {
            Zone::Upper => Zone::Lower,
            Zone::Lower => Zone::Upper,
        }
    }
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

impl PwlSystem {
    pub fn new(upper: AffineField, lower: AffineField, separation: Poly) -> Result<Self> {
        if separation.nvars() != 1 {
            return Err(Error::domain("separation must be a polynomial c(x) in one variable"));
        }
        let coeffs: Vec<f64> = if separation.is_zero() {
            vec![0.0]
        } else {
            separation.univariate_coeffs().iter().map(q_to_f64).collect()
        };
        let dsep_f: Vec<f64> = coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect();
        Ok(PwlSystem {
            upper_vf: upper.vector_field().with_name("upper"),
            lower_vf: lower.vector_field().with_name("lower"),
            upper,
            lower,
            separation,
            eps: None,
            n: None,
            sep_f: coeffs,
            dsep_f,
        })
    }

    pub fn field(&self, z: Zone) -> &AffineField {
        match z {
            Zone::Upper => &self.upper,
            Zone::Lower => &self.lower,
        }
    }

    pub fn vector_field(&self, z: Zone) -> &VectorField {
        match z {
            Zone::Upper => &self.upper_vf,
            Zone::Lower => &self.lower_vf,
        }
    }

    pub fn c(&self, x: f64) -> f64 {
        horner(&self.sep_f, x)
    }

    pub fn dc(&self, x: f64) -> f64 {
        horner(&self.dsep_f, x)
    }

    /// g(x, y) = y − c(x); positive in the upper zone.
    pub fn g(&self, z: &[f64]) -> f64 {
        z[1] - self.c(z[0])
    }

    pub fn zone_of(&self, z: [f64; 2]) -> Option<Zone> {
        let g = self.g(&z);
        if g > 0.0 {
            Some(Zone::Upper)
        } else if g < 0.0 {
            Some(Zone::Lower)
        } else {
            None
        }
    }

    /// ∇g · F for both fields at a point of the separation curve.
    pub fn normal_components(&self, z: [f64; 2]) -> (f64, f64) {
        let grad = [-self.dc(z[0]), 1.0];
        let dot = |f: [f64; 2]| f[0] * grad[0] + f[1] * grad[1];
        (dot(self.upper.eval(z)), dot(self.lower.eval(z)))
    }

    /// Zone entered by the flow at a separation point, or the reason it
    /// cannot cross there.
    pub fn crossing_direction(&self, z: [f64; 2]) -> Result<Zone, PwlError> {
        let (nu, nl) = self.normal_components(z);
        if nu.abs() < TANGENCY_TOL || nl.abs() < TANGENCY_TOL {
            return Err(PwlError::Tangency { point: z });
        }
        match (nu > 0.0, nl > 0.0) {
            (true, true) => Ok(Zone::Upper),
            (false, false) => Ok(Zone::Lower),
            _ => Err(PwlError::Sliding { point: z, upper_normal: nu, lower_normal: nl }),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "upper": self.upper.to_json(),
            "lower": self.lower.to_json(),
            "separation": poly_to_json(&self.separation),
        });
        if let Some(e) = self.eps {
            v["eps"] = json!(e);
        }
        if let Some(n) = self.n {
            v["n"] = json!(n);
        }
        v
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::Parse(format!("piecewise system needs '{k}'")))
                .and_then(AffineField::from_json)
        };
        let sep = v.get("separation").ok_or_else(|| Error::Parse("piecewise system needs 'separation'".into()))?;
        let (_, sep) = poly_from_json(sep)?;
        let mut sys = PwlSystem::new(field("upper")?, field("lower")?, sep)?;
        sys.eps = v.get("eps").and_then(Value::as_f64);
        sys.n = v.get("n").and_then(Value::as_u64).map(|n| n as u32);
        Ok(sys)
    }
}

/// Normal components below this count as tangency.
pub const TANGENCY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, Error, PartialEq, Serialize)]
pub enum PwlError {
    #[error("sliding at ({}, {}): normal components {upper_normal:e} and {lower_normal:e}", point[0], point[1])]
    Sliding { point: [f64; 2], upper_normal: f64, lower_normal: f64 },
    #[error("tangency with the separation curve at ({}, {})", point[0], point[1])]
    Tangency { point: [f64; 2] },
    #[error("start point lies on the separation curve")]
    OnSeparation,
    #[error("no return to the separation curve within t = {0}")]
    NoReturn(f64),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl From<PwlError> for Error {
    fn from(e: PwlError) -> Self {
        match e {
            PwlError::OnSeparation => Error::domain(e.to_string()),
            PwlError::Flow(f) => Error::Flow(f),
            other => Error::numeric(other.to_string()),
        }
    }
}

/// Upper field (x − 4y − 2, x/2 − y), lower field (−y + 1, x), separation
/// y = ε T_n(x).
pub fn chebyshev_system(n: u32, eps: f64) -> Result<PwlSystem> {
    if n < 2 {
        return Err(Error::domain("Chebyshev construction needs n >= 2"));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::domain("eps must be non-negative"));
    }
    let upper = AffineField::new([[qi(1), qi(-4)], [q(1, 2), qi(-1)]], [qi(-2), qi(0)]);
    let lower = AffineField::new([[qi(0), qi(-1)], [qi(1), qi(0)]], [qi(1), qi(0)]);
    let sep = chebyshev_t(n).scale(&q_from_f64(eps)?);
    let mut sys = PwlSystem::new(upper, lower, sep)?;
    sys.eps = Some(eps);
    sys.n = Some(n);
    Ok(sys)
}

/// H⁺ = 8y + x² − 4xy + 8y² and H⁻ = −2y + x² + y².
pub fn chebyshev_integrals() -> (Poly, Poly) {
    let t = |e: [u32; 2], c: i64| (e.to_vec(), qi(c));
    (
        Poly::from_terms(2, [t([0, 1], 8), t([2, 0], 1), t([1, 1], -4), t([0, 2], 8)]),
        Poly::from_terms(2, [t([0, 1], -2), t([2, 0], 1), t([0, 2], 1)]),
    )
}

/// Nonzero positive zeros x_k = cos((2k+1)π/(2n)), k = 0..⌊(n−2)/2⌋.
pub fn chebyshev_zeros(n: u32) -> Vec<f64> {
    let m = (n.saturating_sub(2)) / 2;
    (0..=m)
        .map(|k| ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos())
        .filter(|x| *x > 1e-12)
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    pub t: f64,
    pub point: [f64; 2],
    pub into: Zone,
}

#[derive(Debug)]
pub struct PwlTrajectory {
    pub pieces: Vec<(Zone, Trajectory)>,
    pub crossings: Vec<Crossing>,
    pub final_t: f64,
    pub final_state: [f64; 2],
}

fn piece_opts(tol: f64, record: bool) -> IntegrateOptions {
    IntegrateOptions { record, max_norm: Some(1e8), ..IntegrateOptions::with_tol(tol) }
}

/// Flow of the active field from z in `zone` until the next crossing
/// (terminal) or `t_end`.
fn run_piece(
    sys: &PwlSystem,
    zone: Zone,
    z: [f64; 2],
    t0: f64,
    t_end: f64,
    tol: f64,
    record: bool,
) -> Result<(Trajectory, Option<[f64; 2]>), PwlError> {
    let dir = match zone {
        Zone::Upper => -1,
        Zone::Lower => 1,
    };
    let ev = [Event::new(|_, x: &[f64]| sys.g(x), dir, true)];
    let tr = integrate(sys.vector_field(zone), &z, t0, t_end, &piece_opts(tol, record), &ev)?;
    let hit = tr.terminated_by.map(|_| [tr.final_state[0], tr.final_state[1]]);
    Ok((tr, hit))
}

/// Integrates the piecewise system, switching fields at transversal
/// crossings; sliding or tangency is an error.
pub fn pwl_integrate(sys: &PwlSystem, x0: [f64; 2], t_span: (f64, f64), tol: f64) -> Result<PwlTrajectory, PwlError> {
    let mut zone = sys.zone_of(x0).ok_or(PwlError::OnSeparation)?;
    let mut out = PwlTrajectory { pieces: vec![], crossings: vec![], final_t: t_span.0, final_state: x0 };
    let mut z = x0;
    let mut t = t_span.0;
    while t < t_span.1 {
        let (tr, hit) = run_piece(sys, zone, z, t, t_span.1, tol, true)?;
        t = tr.final_t;
        out.pieces.push((zone, tr));
        let Some(p) = hit else {
            let last = &out.pieces.last().unwrap().1.final_state;
            z = [last[0], last[1]];
            break;
        };
        let into = sys.crossing_direction(p)?;
        if into == zone {
            // the flow points back into the zone it came from
            return Err(PwlError::Sliding {
                point: p,
                upper_normal: sys.normal_components(p).0,
                lower_normal: sys.normal_components(p).1,
            });
        }
        out.crossings.push(Crossing { t, point: p, into });
        zone = into;
        z = p;
    }
    out.final_t = t;
    out.final_state = z;
    Ok(out)
}

/// One turn of the crossing return map on the section {(x, c(x))}.
#[derive(Clone, Debug, Serialize)]
pub struct CrossingReturn {
    pub x: f64,
    pub pi: f64,
    /// x at the intermediate crossing.
    pub mid: f64,
    pub first_zone: Zone,
    pub times: [f64; 2],
}

pub const CROSSING_TMAX: f64 = 1e3;

pub fn crossing_return(sys: &PwlSystem, x: f64, tol: f64) -> Result<CrossingReturn, PwlError> {
    let p0 = [x, sys.c(x)];
    let first = sys.crossing_direction(p0)?;
    let (tr1, hit1) = run_piece(sys, first, p0, 0.0, CROSSING_TMAX, tol, false)?;
    let p1 = hit1.ok_or(PwlError::NoReturn(CROSSING_TMAX))?;
    if sys.crossing_direction(p1)? != first.other() {
        return Err(PwlError::Sliding { point: p1, upper_normal: sys.normal_components(p1).0, lower_normal: sys.normal_components(p1).1 });
    }
    let (tr2, hit2) = run_piece(sys, first.other(), p1, 0.0, CROSSING_TMAX, tol, false)?;
    let p2 = hit2.ok_or(PwlError::NoReturn(CROSSING_TMAX))?;
    Ok(CrossingReturn { x, pi: p2[0], mid: p1[0], first_zone: first, times: [tr1.final_t, tr2.final_t] })
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingCycle {
    pub x: f64,
    pub point: [f64; 2],
    pub pi_prime_fd: f64,
    pub pi_prime_formula: f64,
    pub classification: CycleClass,
    pub period: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossingSearch {
    pub cycles: Vec<CrossingCycle>,
    pub continuum: bool,
    pub samples: Vec<(f64, f64)>,
    pub failures: Vec<(f64, String)>,
}

const RETURN_TOL: f64 = 1e-12;

/// Π′ of the composed half-maps from the boundary/divergence formula.
pub fn crossing_pi_prime(sys: &PwlSystem, ret: &CrossingReturn) -> Result<f64> {
    let tangent = |x: f64| [1.0, sys.dc(x)];
    let p0 = [ret.x, sys.c(ret.x)];
    let p1 = [ret.mid, sys.c(ret.mid)];
    let arcs = [
        OrbitArc {
            field: sys.vector_field(ret.first_zone),
            x0: p0,
            duration: ret.times[0],
            tangent_in: tangent(ret.x),
            tangent_out: tangent(ret.mid),
        },
        OrbitArc {
            field: sys.vector_field(ret.first_zone.other()),
            x0: p1,
            duration: ret.times[1],
            tangent_in: tangent(ret.mid),
            tangent_out: tangent(ret.pi),
        },
    ];
    pi_prime_arcs(&arcs, RETURN_TOL)
}

fn pi_prime_fd(sys: &PwlSystem, x: f64) -> Option<f64> {
    let pi = |x: f64| crossing_return(sys, x, RETURN_TOL).ok().map(|r| r.pi);
    let d = |h: f64| Some((pi(x + h)? - pi(x - h)?) / (2.0 * h));
    let h = 1e-4;
    Some((4.0 * d(h / 2.0)? - d(h)?) / 3.0)
}

/// Fixed points of the crossing return map on x ∈ `range`, bracketed on
/// `grid` and refined to 1e-10.
pub fn crossing_cycles(sys: &PwlSystem, range: (f64, f64), grid: &[f64]) -> Result<CrossingSearch> {
    if grid.iter().any(|x| *x < range.0 || *x > range.1) {
        return Err(Error::domain("grid point outside the section range"));
    }
    let res: Vec<(f64, Result<CrossingReturn, PwlError>)> =
        grid.par_iter().map(|&x| (x, crossing_return(sys, x, RETURN_TOL))).collect();
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (x, r) in res {
        match r {
            Ok(r) => samples.push((x, r.pi)),
            Err(e) => failures.push((x, e.to_string())),
        }
    }
    let continuum = samples.len() >= 2 && samples.iter().all(|(x, p)| (p - x).abs() < CLOSURE_TOL);
    let mut roots = Vec::new();
    if !continuum {
        for w in samples.windows(2) {
            let (d0, d1) = (w[0].1 - w[0].0, w[1].1 - w[1].0);
            if d0 == 0.0 {
                roots.push(w[0].0);
            } else if d0 * d1 < 0.0 {
                let disp = |x: f64| crossing_return(sys, x, RETURN_TOL).map(|r| r.pi - x).unwrap_or(f64::NAN);
                if let Some(r) = brent(disp, w[0].0, w[1].0, 1e-10) {
                    roots.push(r);
                }
            }
        }
    }
    let cycles = roots
        .par_iter()
        .filter_map(|&x| {
            let ret = crossing_return(sys, x, RETURN_TOL).ok()?;
            let fd = pi_prime_fd(sys, x)?;
            let formula = crossing_pi_prime(sys, &ret).ok()?;
            let classification = if (fd - 1.0).abs() < NON_HYPERBOLIC_TOL {
                CycleClass::NonHyperbolicCandidate
            } else if fd < 1.0 {
                CycleClass::HyperbolicStable
            } else {
                CycleClass::HyperbolicUnstable
            };
            Some(CrossingCycle {
                x,
                point: [x, sys.c(x)],
                pi_prime_fd: fd,
                pi_prime_formula: formula,
                classification,
                period: ret.times[0] + ret.times[1],
            })
        })
        .collect();
    Ok(CrossingSearch { cycles, continuum, samples, failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicCycleReport {
    /// (a) both curves pass through both crossing points.
    pub passes_through: bool,
    pub residuals: Vec<f64>,
    /// (b) exact invariance; `None` when no fields were supplied.
    pub upper_invariant: Option<bool>,
    pub lower_invariant: Option<bool>,
    /// (c) transversal crossing at both points.
    pub transversal: bool,
    pub failed: Vec<String>,
}

/// L_F C = ∇C·F is divisible by C exactly.
pub fn is_invariant(curve: &Poly, field: &AffineField) -> bool {
    let (p, q) = field.polys();
    let lie = &(&curve.derivative(0) * &p) + &(&curve.derivative(1) * &q);
    lie.is_zero() || lie.div_exact(curve).is_some()
}

/// Checks that the two curve arcs glue into a crossing periodic orbit.
/// Without `sys` only the geometric checks run: (c) then asks the curves
/// to cut the separation transversally.
pub fn verify_algebraic_cycle(
    sys: Option<&PwlSystem>,
    separation: &Poly,
    upper_curve: &Poly,
    lower_curve: &Poly,
    points: [[f64; 2]; 2],
) -> AlgebraicCycleReport {
    let mut failed = Vec::new();
    let mut residuals = Vec::new();
    for c in [upper_curve, lower_curve] {
        for p in &points {
            residuals.push(c.eval_f64(p).abs());
        }
    }
    let sep_res: Vec<f64> = points.iter().map(|p| (p[1] - separation.eval_f64(&p[..1])).abs()).collect();
    let passes_through = residuals.iter().chain(&sep_res).all(|r| *r < 1e-9);
    if !passes_through {
        failed.push("curves or separation do not pass through the crossing points".into());
    }
    let (upper_invariant, lower_invariant) = match sys {
        Some(s) => (Some(is_invariant(upper_curve, &s.upper)), Some(is_invariant(lower_curve, &s.lower))),
        None => (None, None),
    };
    if upper_invariant == Some(false) {
        failed.push("upper curve is not invariant for the upper field".into());
    }
    if lower_invariant == Some(false) {
        failed.push("lower curve is not invariant for the lower field".into());
    }
    let dsep = separation.derivative(0);
    let transversal = points.iter().all(|p| match sys {
        Some(s) => s.crossing_direction(*p).is_ok(),
        None => [upper_curve, lower_curve].iter().all(|c| {
            let grad = [c.derivative(0).eval_f64(p), c.derivative(1).eval_f64(p)];
            let sg = [-dsep.eval_f64(&p[..1]), 1.0];
            let cross = grad[0] * sg[1] - grad[1] * sg[0];
            cross.abs() > 1e-9 * grad[0].hypot(grad[1]).max(1.0)
        }),
    });
    if !transversal {
        failed.push("crossing is not transversal at every point".into());
    }
    AlgebraicCycleReport { passes_through, residuals, upper_invariant, lower_invariant, transversal, failed }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c2, x2, y2};

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn construction() {
        let z = chebyshev_zeros(10);
        assert_eq!(z.len(), 5);
        assert!((z[0] - 0.98768834).abs() < 1e-8);
        assert_eq!(chebyshev_zeros(4).len(), 2);
        let s = chebyshev_system(10, 0.0).unwrap();
        assert!(s.separation.is_zero());
        let (hp, hm) = chebyshev_integrals();
        for x in [-1.3, 0.2, 0.7] {
            assert!((hp.eval_f64(&[x, 0.0]) - x * x).abs() < 1e-15);
            assert!((hm.eval_f64(&[x, 0.0]) - x * x).abs() < 1e-15);
        }
        for (h, f) in [(&hp, &s.upper), (&hm, &s.lower)] {
            let (p, q) = f.polys();
            assert!((&(&h.derivative(0) * &p) + &(&h.derivative(1) * &q)).is_zero());
        }
        let s = chebyshev_system(10, 1e-3).unwrap();
        for x in z {
            assert!(s.c(x).abs() < 1e-15);
        }
        assert!(chebyshev_system(1, 0.1).is_err());
        assert!(chebyshev_system(3, -0.1).is_err());
    }

    #[test]
    fn flat_separation_conserves_integrals() {
        let s = chebyshev_system(10, 0.0).unwrap();
        let (hp, hm) = chebyshev_integrals();
        let tr = pwl_integrate(&s, [1.0, 0.5], (0.0, 40.0), 1e-12).unwrap();
        assert!(tr.crossings.len() >= 4);
        for (zone, piece) in &tr.pieces {
            let h = if *zone == Zone::Upper { &hp } else { &hm };
            let h0 = h.eval_f64(&piece.states[0]);
            for st in &piece.states {
                assert!((h.eval_f64(st) - h0).abs() < 100.0 * 1e-12 * h0.abs().max(1.0));
            }
        }
        // closed orbit: the state after each full turn repeats
        let ups: Vec<&Crossing> = tr.crossings.iter().filter(|c| c.into == Zone::Upper).collect();
        for w in ups.windows(2) {
            assert!((w[0].point[0] - w[1].point[0]).abs() < 1e-9);
        }
        assert!(pwl_integrate(&s, [0.5, 0.0], (0.0, 1.0), 1e-10).is_err());
    }

    #[test]
    fn orbit_through_zero_returns() {
        let s = chebyshev_system(10, 1e-3).unwrap();
        let x0 = chebyshev_zeros(10)[0];
        let r = crossing_return(&s, x0, 1e-12).unwrap();
        assert!((r.pi - x0).abs() < 1e-9);
        assert!((r.mid + x0).abs() < 1e-9);
    }

    #[test]
    fn sliding_is_reported() {
        // both fields push towards y = 0
        let up = AffineField::new([[qi(0), qi(0)], [qi(0), qi(0)]], [qi(1), qi(-1)]);
        let lo = AffineField::new([[qi(0), qi(0)], [qi(0), qi(0)]], [qi(1), qi(1)]);
        let s = PwlSystem::new(up, lo, Poly::zero(1)).unwrap();
        assert!(matches!(s.crossing_direction([0.3, 0.0]), Err(PwlError::Sliding { .. })));
        assert!(matches!(pwl_integrate(&s, [0.0, 0.5], (0.0, 2.0), 1e-10), Err(PwlError::Sliding { .. })));
    }

    #[test]
    fn chebyshev_ten_has_five_cycles() {
        let s = chebyshev_system(10, 1e-3).unwrap();
        let res = crossing_cycles(&s, (0.03, 1.0), &grid(0.03, 1.0, 98)).unwrap();
        assert_eq!(res.cycles.len(), 5, "{:?}", res.cycles);
        let mut zs = chebyshev_zeros(10);
        zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (c, z) in res.cycles.iter().zip(zs) {
            assert!((c.x - z).abs() < 0.02);
            assert!((c.pi_prime_fd - 1.0).abs() > 1e-3);
            assert!((c.pi_prime_fd - c.pi_prime_formula).abs() < 1e-5, "{c:?}");
        }
    }

    #[test]
    fn chebyshev_four_and_flat_case() {
        let s = chebyshev_system(4, 1e-3).unwrap();
        let res = crossing_cycles(&s, (0.03, 1.0), &grid(0.03, 1.0, 60)).unwrap();
        assert_eq!(res.cycles.len(), 2);
        let s = chebyshev_system(4, 0.0).unwrap();
        let res = crossing_cycles(&s, (0.1, 1.0), &grid(0.1, 1.0, 10)).unwrap();
        assert!(res.continuum && res.cycles.is_empty());
    }

    #[test]
    fn cycles_persist_and_converge() {
        let zs = chebyshev_zeros(10);
        for eps in [1e-4, 1e-3, 1e-2] {
            let s = chebyshev_system(10, eps).unwrap();
            let res = crossing_cycles(&s, (0.03, 1.0), &grid(0.03, 1.0, 98)).unwrap();
            assert_eq!(res.cycles.len(), 5, "eps = {eps}");
            for c in &res.cycles {
                let d = zs.iter().map(|z| (c.x - z).abs()).fold(f64::INFINITY, f64::min);
                assert!(d < 10.0 * eps);
            }
        }
    }

    #[test]
    fn algebraic_cycle_checks() {
        // geometry only
        let x = x2();
        let y = y2();
        let parabola = &(&(&x + &y.scale(&qi(3))).pow(2) - &y.scale(&qi(3))) - &c2(1);
        let circle = &(&(&x * &x) + &(&y * &y)) - &c2(1);
        let rep = verify_algebraic_cycle(None, &Poly::zero(1), &parabola, &circle, [[1.0, 0.0], [-1.0, 0.0]]);
        assert!(rep.passes_through && rep.transversal && rep.upper_invariant.is_none(), "{rep:?}");

        let s = chebyshev_system(10, 0.0).unwrap();
        let (hp, hm) = chebyshev_integrals();
        let xk = chebyshev_zeros(10)[1];
        let lvl = q_from_f64(xk * xk).unwrap();
        let rep = verify_algebraic_cycle(
            Some(&s),
            &s.separation,
            &(&hp - &Poly::constant(2, lvl.clone())),
            &(&hm - &Poly::constant(2, lvl)),
            [[xk, 0.0], [-xk, 0.0]],
        );
        assert!(rep.failed.is_empty(), "{rep:?}");

        let radial = AffineField::new([[qi(1), qi(0)], [qi(0), qi(1)]], [qi(0), qi(0)]);
        let s = PwlSystem::new(radial.clone(), radial, Poly::zero(1)).unwrap();
        let rep = verify_algebraic_cycle(Some(&s), &s.separation, &circle, &circle, [[1.0, 0.0], [-1.0, 0.0]]);
        assert_eq!(rep.upper_invariant, Some(false));
    }

    #[test]
    fn json_roundtrip() {
        let s = chebyshev_system(6, 0.25).unwrap();
        let back = PwlSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back.upper, s.upper);
        assert_eq!(back.separation, s.separation);
        assert_eq!((back.eps, back.n), (Some(0.25), Some(6)));
        let _ = format_q(&q(1, 2));
    }
}
