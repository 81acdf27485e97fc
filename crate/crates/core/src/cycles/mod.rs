//! Sections, return maps, limit cycles, Melnikov functions and period
//! functions.

mod melnikov;
mod period;
mod systems;

pub use melnikov::{
    i_rs, i_rs_cached, melnikov_direct, melnikov_poly, IrsCache, MelnikovPoly, MelnikovSpec,
};
pub use period::{critical_periods, period_scan, CriticalPeriods, PeriodScan};
pub use systems::{equivariant_field, equivariant_to_loud, loud_field, rigid_field, LoudParams};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::error::Error;
use crate::flow::{integrate, Event, Field, FlowError, IntegrateOptions, VectorField};

/// Straight section `base + r·dir`, `r ∈ range`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Section {
    pub base: [f64; 2],
    pub dir: [f64; 2],
    pub range: (f64, f64),
}

impl Section {
    pub fn new(base: [f64; 2], dir: [f64; 2], range: (f64, f64)) -> Result<Self, Error> {
        let n = dir[0].hypot(dir[1]);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::domain("section direction must be nonzero"));
        }
        if !(range.0 < range.1) {
            return Err(Error::domain("section range must be increasing"));
        }
        Ok(Section { base, dir: [dir[0] / n, dir[1] / n], range })
    }

    /// Ray along the positive x-axis from the origin.
    pub fn positive_x(range: (f64, f64)) -> Self {
        Section::new([0.0, 0.0], [1.0, 0.0], range).unwrap()
    }

    pub fn point(&self, r: f64) -> [f64; 2] {
        [self.base[0] + r * self.dir[0], self.base[1] + r * self.dir[1]]
    }

    pub fn normal(&self) -> [f64; 2] {
        [-self.dir[1], self.dir[0]]
    }

    /// Coordinate of the projection of `x` on the section line.
    pub fn coord(&self, x: &[f64]) -> f64 {
        (x[0] - self.base[0]) * self.dir[0] + (x[1] - self.base[1]) * self.dir[1]
    }

    /// Signed distance to the section line.
    pub fn g(&self, x: &[f64]) -> f64 {
        let n = self.normal();
        (x[0] - self.base[0]) * n[0] + (x[1] - self.base[1]) * n[1]
    }

    /// ⟨X, n⟩ at `r`, normalised by |X|.
    pub fn transversality(&self, vf: &dyn Field, r: f64) -> f64 {
        let p = self.point(r);
        let mut f = [0.0; 2];
        vf.eval(0.0, &p, &mut f);
        let n = self.normal();
        let m = f[0].hypot(f[1]);
        if m == 0.0 {
            0.0
        } else {
            (f[0] * n[0] + f[1] * n[1]) / m
        }
    }

    /// Checks transversality at `samples` evenly spaced points of the range.
    pub fn check_transversal(&self, vf: &dyn Field, samples: usize) -> Result<(), Error> {
        let samples = samples.max(2);
        let mut sign = 0.0;
        for i in 0..samples {
            let r = self.range.0 + (self.range.1 - self.range.0) * i as f64 / (samples - 1) as f64;
            let t = self.transversality(vf, r);
            if t.abs() < 1e-10 || (sign != 0.0 && t.signum() != sign) {
                return Err(Error::domain(format!("section is not transversal near r = {r}")));
            }
            sign = t.signum();
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReturnSample {
    pub r: f64,
    pub pi: f64,
    pub t: f64,
    pub windings: u32,
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum ReturnError {
    #[error("no return to the section from r = {r} within t = {t_max}")]
    NoReturn { r: f64, t_max: f64 },
    #[error("orbit from r = {r} blew up at t = {t}")]
    BlowUp { r: f64, t: f64 },
    #[error("return point {pi} from r = {r} left the section range")]
    LeftDomain { r: f64, pi: f64 },
    #[error("section not transversal at r = {r}")]
    NotTransversal { r: f64 },
    #[error("integration failed from r = {r}: {err}")]
    Flow { r: f64, err: FlowError },
}

impl From<ReturnError> for Error {
    fn from(e: ReturnError) -> Self {
        match e {
            ReturnError::NotTransversal { .. } => Error::Domain(e.to_string()),
            other => Error::Numeric(other.to_string()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReturnOptions {
    pub tol: f64,
    pub t_max: f64,
    pub windings: u32,
    /// Orbits leaving this radius count as blow-up.
    pub max_norm: f64,
    /// Enforce `Π(r) ∈ range` (otherwise the raw value is returned).
    pub strict_range: bool,
}

impl Default for ReturnOptions {
    fn default() -> Self {
        ReturnOptions { tol: 1e-11, t_max: 1e3, windings: 1, max_norm: 1e8, strict_range: true }
    }
}

/// First return (or `windings`-th return) to the section on the same side
/// and in the same crossing direction.
pub fn return_map(vf: &dyn Field, sec: &Section, r: f64, opts: &ReturnOptions) -> Result<ReturnSample, ReturnError> {
    let x0 = sec.point(r);
    let tr = sec.transversality(vf, r);
    if tr.abs() < 1e-12 {
        return Err(ReturnError::NotTransversal { r });
    }
    let dir = if tr > 0.0 { 1 } else { -1 };
    let iopts = IntegrateOptions { max_norm: Some(opts.max_norm), ..IntegrateOptions::with_tol(opts.tol) };
    let mut x = x0.to_vec();
    let mut t_acc = 0.0;
    let mut done = 0;
    while done < opts.windings.max(1) {
        let ev = [Event::new(|_, x: &[f64]| sec.g(x), dir, true)];
        let remaining = opts.t_max - t_acc;
        if remaining <= 0.0 {
            return Err(ReturnError::NoReturn { r, t_max: opts.t_max });
        }
        let traj = integrate(vf, &x, 0.0, remaining, &iopts, &ev).map_err(|err| match err {
            FlowError::BlowUp { t, .. } => ReturnError::BlowUp { r, t: t_acc + t },
            err => ReturnError::Flow { r, err },
        })?;
        if traj.terminated_by.is_none() {
            return Err(ReturnError::NoReturn { r, t_max: opts.t_max });
        }
        t_acc += traj.final_t;
        x = traj.final_state;
        if sec.coord(&x) > 0.0 {
            done += 1;
        }
    }
    let pi = sec.coord(&x);
    if opts.strict_range && !(sec.range.0 <= pi && pi <= sec.range.1) {
        return Err(ReturnError::LeftDomain { r, pi });
    }
    Ok(ReturnSample { r, pi, t: t_acc, windings: opts.windings.max(1) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CycleClass {
    HyperbolicStable,
    HyperbolicUnstable,
    NonHyperbolicCandidate,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleReport {
    pub r_star: f64,
    pub pi_prime: f64,
    pub classification: CycleClass,
    pub period: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleSearch {
    pub cycles: Vec<CycleReport>,
    /// Π(r) = r on the whole grid: a period annulus, not isolated cycles.
    pub continuum: bool,
    pub samples: Vec<ReturnSample>,
    pub failures: Vec<(f64, String)>,
}

/// |Π′ − 1| below this is reported as a non-hyperbolic candidate.
pub const NON_HYPERBOLIC_TOL: f64 = 1e-5;
/// |Π(r) − r| below this on the whole grid flags a continuum.
pub const CLOSURE_TOL: f64 = 1e-8;

/// Derivative of Π by central differences with one Richardson step.
pub fn pi_prime_fd(vf: &dyn Field, sec: &Section, r: f64, h: f64, opts: &ReturnOptions) -> Result<f64, ReturnError> {
    let o = ReturnOptions { strict_range: false, ..opts.clone() };
    let d = |h: f64| -> Result<f64, ReturnError> {
        Ok((return_map(vf, sec, r + h, &o)?.pi - return_map(vf, sec, r - h, &o)?.pi) / (2.0 * h))
    };
    let (d1, d2) = (d(h)?, d(h / 2.0)?);
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Brackets sign changes of Π(r) − r on `grid`, refines them to 1e-10 and
/// classifies each cycle by Π′.
pub fn find_cycles(vf: &dyn Field, sec: &Section, grid: &[f64], opts: &ReturnOptions) -> CycleSearch {
    let o = ReturnOptions { strict_range: false, ..opts.clone() };
    let results: Vec<(f64, Result<ReturnSample, ReturnError>)> =
        grid.par_iter().map(|&r| (r, return_map(vf, sec, r, &o))).collect();
    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in results {
        match res {
            Ok(s) => samples.push(s),
            Err(e) => failures.push((r, e.to_string())),
        }
    }
    let continuum = samples.len() >= 2 && samples.iter().all(|s| (s.pi - s.r).abs() < CLOSURE_TOL);
    let mut roots = Vec::new();
    if !continuum {
        for s in &samples {
            if (s.pi - s.r).abs() < 1e-13 {
                roots.push(s.r);
            }
        }
        for w in samples.windows(2) {
            let (d0, d1) = (w[0].pi - w[0].r, w[1].pi - w[1].r);
            if d0 * d1 < 0.0 && d0.abs() >= 1e-13 && d1.abs() >= 1e-13 {
                let disp = |r: f64| return_map(vf, sec, r, &o).map(|s| s.pi - r).unwrap_or(f64::NAN);
                if let Some(root) = crate::numeric::brent(disp, w[0].r, w[1].r, 1e-10) {
                    roots.push(root);
                }
            }
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let cycles = roots
        .par_iter()
        .filter_map(|&r| {
            let h = 1e-3 * r.abs().max(1e-3);
            let pp = pi_prime_fd(vf, sec, r, h, &o).ok()?;
            let period = return_map(vf, sec, r, &o).ok()?.t;
            let classification = if (pp - 1.0).abs() < NON_HYPERBOLIC_TOL {
                CycleClass::NonHyperbolicCandidate
            } else if pp < 1.0 {
                CycleClass::HyperbolicStable
            } else {
                CycleClass::HyperbolicUnstable
            };
            Some(CycleReport { r_star: r, pi_prime: pp, classification, period })
        })
        .collect();
    CycleSearch { cycles, continuum, samples, failures }
}

/// One smooth arc of a (possibly piecewise) closed orbit: flow of `field`
/// from `x0` for `duration`, leaving a section with tangent `tangent_in`
/// and arriving at one with tangent `tangent_out`.
pub struct OrbitArc<'a> {
    pub field: &'a VectorField,
    pub x0: [f64; 2],
    pub duration: f64,
    pub tangent_in: [f64; 2],
    pub tangent_out: [f64; 2],
}

fn divergence_fn(vf: &VectorField) -> Box<dyn Fn(&[f64]) -> f64 + Sync + '_> {
    match vf.rationals() {
        Some(r) => {
            let calc = crate::algebra::vf_calculus(&r[0], &r[1]).expect("planar field");
            let d = calc.divergence;
            Box::new(move |x: &[f64]| d.eval_f64(x))
        }
        None => Box::new(move |x: &[f64]| {
            let h = 1e-6;
            let f = |x: [f64; 2]| vf.eval_vec(&x);
            let px = (f([x[0] + h, x[1]])[0] - f([x[0] - h, x[1]])[0]) / (2.0 * h);
            let qy = (f([x[0], x[1] + h])[1] - f([x[0], x[1] - h])[1]) / (2.0 * h);
            px + qy
        }),
    }
}

/// Product over arcs of ⟨X(0), γ₀′⊥⟩ / ⟨X(T), γ₁′⊥⟩ · exp(∫₀ᵀ div X dt).
pub fn pi_prime_arcs(arcs: &[OrbitArc<'_>], tol: f64) -> Result<f64, Error> {
    let perp = |v: [f64; 2]| [-v[1], v[0]];
    let mut total = 1.0;
    for arc in arcs {
        let div = divergence_fn(arc.field);
        let field = arc.field;
        let aug = (3usize, |_t: f64, x: &[f64], out: &mut [f64]| {
            let f = field.eval_vec(&x[..2]);
            out[0] = f[0];
            out[1] = f[1];
            out[2] = div(&x[..2]);
        });
        let tr = integrate(&aug, &[arc.x0[0], arc.x0[1], 0.0], 0.0, arc.duration, &IntegrateOptions::with_tol(tol), &[])?;
        let x1 = &tr.final_state;
        let f0 = field.eval_vec(&arc.x0);
        let f1 = field.eval_vec(&x1[..2]);
        let (n0, n1) = (perp(arc.tangent_in), perp(arc.tangent_out));
        let num = f0[0] * n0[0] + f0[1] * n0[1];
        let den = f1[0] * n1[0] + f1[1] * n1[1];
        let scale = f0[0].hypot(f0[1]).max(f1[0].hypot(f1[1]));
        if num.abs() < 1e-12 * scale || den.abs() < 1e-12 * scale {
            return Err(Error::domain("section not transversal to the orbit"));
        }
        total *= num / den * x1[2].exp();
    }
    Ok(total)
}

/// Derivative of the return map of a closed orbit through `x0` with
/// period `period`, leaving section `s0` and returning to `s1`.
pub fn pi_prime_formula(
    vf: &VectorField,
    x0: [f64; 2],
    period: f64,
    s0: &Section,
    s1: &Section,
    tol: f64,
) -> Result<f64, Error> {
    pi_prime_arcs(
        &[OrbitArc { field: vf, x0, duration: period, tangent_in: s0.dir, tangent_out: s1.dir }],
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c2, Poly, x2, y2, qi};
    use std::f64::consts::PI;

    /// ṙ = μ r (1 − r²), θ̇ = 1.
    pub(crate) fn radial(mu: i64) -> VectorField {
        let r2 = &(&x2() * &x2()) + &(&y2() * &y2());
        let g = (&c2(1) - &r2).scale(&qi(mu));
        VectorField::planar(&(&x2() * &g) - &y2(), &(&y2() * &g) + &x2())
    }

    fn radial_pi(r: f64, mu: f64) -> f64 {
        // r² solves a logistic equation in closed form.
        let e = (4.0 * PI * mu).exp();
        (r * r * e / (1.0 + r * r * (e - 1.0))).sqrt()
    }

    #[test]
    fn linear_centre_return() {
        let vf = VectorField::planar(-y2(), x2());
        let s = return_map(&vf, &Section::positive_x((0.1, 2.0)), 1.0, &ReturnOptions::default()).unwrap();
        assert!((s.pi - 1.0).abs() < 1e-9 && (s.t - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn cubic_lienard_type_has_a_cycle() {
        // ẋ = y, ẏ = −x³ + d x²y + y³ with d = −1
        let (x, y) = (x2(), y2());
        let q = &(&(-x.pow(3)) - &(&x.pow(2) * &y)) + &y.pow(3);
        let vf = VectorField::planar(y.clone(), q);
        let sec = Section::positive_x((0.01, 5.0));
        let grid: Vec<f64> = (1..=30).map(|i| 0.05 * i as f64).collect();
        let opts = ReturnOptions { strict_range: false, ..Default::default() };
        let res = find_cycles(&vf, &sec, &grid, &opts);
        assert_eq!(res.cycles.len(), 1);
        let c = &res.cycles[0];
        assert!(c.r_star > 0.8 && c.r_star < 0.85);
        assert_eq!(c.classification, CycleClass::HyperbolicUnstable);
        assert!(res.failures.iter().all(|(_, f)| f.contains("blew up")), "{:?}", res.failures);
    }

    #[test]
    fn rigid_constant_f() {
        let a = 0.05;
        let vf = rigid_field(&Poly::constant(2, crate::algebra::q(1, 20)));
        let s = return_map(&vf, &Section::positive_x((0.1, 5.0)), 0.7, &ReturnOptions::default()).unwrap();
        assert!((s.pi - 0.7 * (2.0 * PI * a).exp()).abs() < 1e-9);
        assert!((s.t - 2.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn radial_return_and_cycle() {
        let vf = radial(1);
        let sec = Section::positive_x((0.05, 2.0));
        let s = return_map(&vf, &sec, 0.5, &ReturnOptions::default()).unwrap();
        assert!(s.pi > 0.5 && s.pi < 1.0);
        assert!((s.pi - radial_pi(0.5, 1.0)).abs() < 1e-9);
        let grid: Vec<f64> = (1..=12).map(|i| 0.15 * i as f64).collect();
        let res = find_cycles(&vf, &sec, &grid, &ReturnOptions::default());
        assert!(!res.continuum);
        assert_eq!(res.cycles.len(), 1);
        assert!((res.cycles[0].r_star - 1.0).abs() < 1e-9);
        assert_eq!(res.cycles[0].classification, CycleClass::HyperbolicStable);
    }

    #[test]
    fn centre_is_a_continuum() {
        let vf = VectorField::planar(-y2(), x2());
        let grid: Vec<f64> = (1..=8).map(|i| 0.25 * i as f64).collect();
        let res = find_cycles(&vf, &Section::positive_x((0.1, 3.0)), &grid, &ReturnOptions::default());
        assert!(res.continuum && res.cycles.is_empty());
    }

    #[test]
    fn pi_prime_formula_examples() {
        let sec = Section::positive_x((0.1, 2.0));
        let vf = VectorField::planar(-y2(), x2());
        let v = pi_prime_formula(&vf, [1.0, 0.0], 2.0 * PI, &sec, &sec, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        let v = pi_prime_formula(&radial(1), [1.0, 0.0], 2.0 * PI, &sec, &sec, 1e-12).unwrap();
        assert!((v - (-4.0 * PI).exp()).abs() < 1e-6);
        let bad = Section::new([0.0, 0.0], [0.0, 1.0], (0.1, 2.0)).unwrap();
        assert!(pi_prime_formula(&vf, [1.0, 0.0], 2.0 * PI, &bad, &bad, 1e-12).is_err());
    }

    #[test]
    fn formula_agrees_with_finite_differences() {
        // Moderate contraction so the finite difference is well conditioned.
        let r2 = &(&x2() * &x2()) + &(&y2() * &y2());
        let g = (&c2(1) - &r2).scale(&crate::algebra::q(1, 10));
        let vf = VectorField::planar(&(&x2() * &g) - &y2(), &(&y2() * &g) + &x2());
        let sec = Section::positive_x((0.1, 2.0));
        let opts = ReturnOptions { tol: 1e-13, ..Default::default() };
        let fd = pi_prime_fd(&vf, &sec, 1.0, 1e-3, &opts).unwrap();
        let fm = pi_prime_formula(&vf, [1.0, 0.0], 2.0 * PI, &sec, &sec, 1e-13).unwrap();
        assert!((fd / fm - 1.0).abs() < 1e-5, "{fd} {fm}");
        assert!((fm - (-0.4 * PI).exp()).abs() < 1e-8);
    }
}
