//! Triangular billiards (Fagnano orbits) and Poncelet maps between
//! superellipse ovals.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::brent;

type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}
fn add(a: P2, b: P2) -> P2 {
    [a[0] + b[0], a[1] + b[1]]
}
fn mul(s: f64, a: P2) -> P2 {
    [s * a[0], s * a[1]]
}
fn dot(a: P2, b: P2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}
fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}
fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}
fn dist(a: P2, b: P2) -> f64 {
    norm(sub(a, b))
}
fn unit(a: P2) -> P2 {
    mul(1.0 / norm(a), a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleClass {
    Acute,
    Right,
    Obtuse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub vertices: [P2; 3],
    pub class: AngleClass,
}

impl Triangle {
    pub fn new(a: P2, b: P2, c: P2) -> Result<Self> {
        let v = [a, b, c];
        let area = 0.5 * cross(sub(b, a), sub(c, a)).abs();
        if !(area > 1e-12) {
            return Err(Error::domain("degenerate triangle"));
        }
        // sign of the dot product of the two edges at each vertex
        let mut class = AngleClass::Acute;
        for i in 0..3 {
            let (p, q, r) = (v[i], v[(i + 1) % 3], v[(i + 2) % 3]);
            let (e1, e2) = (sub(q, p), sub(r, p));
            let d = dot(e1, e2);
            if d.abs() <= 1e-12 * norm(e1) * norm(e2) {
                class = AngleClass::Right;
            } else if d < 0.0 {
                class = AngleClass::Obtuse;
            }
        }
        Ok(Triangle { vertices: v, class })
    }

    /// Edge i joins vertex i to vertex i + 1.
    pub fn edge(&self, i: usize) -> (P2, P2) {
        (self.vertices[i], self.vertices[(i + 1) % 3])
    }

    pub fn contains_strictly(&self, p: P2) -> bool {
        let s: Vec<f64> = (0..3)
            .map(|i| {
                let (a, b) = self.edge(i);
                cross(sub(b, a), sub(p, a))
            })
            .collect();
        s.iter().all(|x| *x > 0.0) || s.iter().all(|x| *x < 0.0)
    }

    /// Foot of the altitude from vertex i onto the opposite edge.
    pub fn altitude_foot(&self, i: usize) -> P2 {
        let (b, c) = self.edge((i + 1) % 3);
        let a = self.vertices[i];
        let e = sub(c, b);
        add(b, mul(dot(sub(a, b), e) / dot(e, e), e))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Reflection {
    pub edge: usize,
    pub point: P2,
    /// Angle between the incoming ray and the inward normal, and between
    /// the outgoing ray and the same normal.
    pub incidence: f64,
    pub reflection: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum BilliardStatus {
    Completed,
    Corner { vertex: usize, point: P2 },
}

#[derive(Clone, Debug, Serialize)]
pub struct BilliardRun {
    pub points: Vec<P2>,
    pub reflections: Vec<Reflection>,
    pub final_direction: P2,
    pub status: BilliardStatus,
}

impl BilliardRun {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,y\n");
        for p in &self.points {
            s.push_str(&format!("{},{}\n", p[0], p[1]));
        }
        s
    }

    /// Largest |incidence − reflection| over all bounces.
    pub fn reflection_residual(&self) -> f64 {
        self.reflections.iter().map(|r| (r.incidence - r.reflection).abs()).fold(0.0, f64::max)
    }
}

pub const CORNER_TOL: f64 = 1e-10;

fn run_billiard(tri: &Triangle, start: P2, dir: P2, bounces: usize, skip_edge: Option<usize>) -> BilliardRun {
    let mut p = start;
    let mut d = unit(dir);
    let mut skip = skip_edge;
    let mut out = BilliardRun { points: vec![p], reflections: vec![], final_direction: d, status: BilliardStatus::Completed };
    for _ in 0..bounces {
        // nearest forward intersection p + t d = a + s (b − a)
        let mut best: Option<(f64, usize)> = None;
        for i in 0..3 {
            if Some(i) == skip {
                continue;
            }
            let (a, b) = tri.edge(i);
            let e = sub(b, a);
            let den = cross(d, e);
            if den == 0.0 {
                continue;
            }
            let w = sub(a, p);
            let t = cross(w, e) / den;
            let s = cross(w, d) / den;
            if t > 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&s) && best.is_none_or(|(bt, _)| t < bt) {
                best = Some((t, i));
            }
        }
        let Some((t, i)) = best else { break };
        let q = add(p, mul(t, d));
        out.points.push(q);
        if let Some(v) = (0..3).find(|&v| dist(q, tri.vertices[v]) < CORNER_TOL) {
            out.status = BilliardStatus::Corner { vertex: v, point: q };
            break;
        }
        let (a, b) = tri.edge(i);
        let e = unit(sub(b, a));
        let mut nrm = [-e[1], e[0]];
        if dot(nrm, d) > 0.0 {
            nrm = mul(-1.0, nrm);
        }
        let dn = sub(d, mul(2.0 * dot(d, nrm), nrm));
        let incidence = dot(mul(-1.0, d), nrm).clamp(-1.0, 1.0).acos();
        let reflection = dot(dn, nrm).clamp(-1.0, 1.0).acos();
        out.reflections.push(Reflection { edge: i, point: q, incidence, reflection });
        p = q;
        d = unit(dn);
        skip = Some(i);
    }
    out.final_direction = d;
    out
}

/// Specular billiard flow from an interior point; stops at a corner.
pub fn billiard_trajectory(tri: &Triangle, start: P2, direction: P2, bounces: usize) -> Result<BilliardRun> {
    if !tri.contains_strictly(start) {
        return Err(Error::domain("start point must lie strictly inside the triangle"));
    }
    if !(norm(direction) > 0.0) {
        return Err(Error::domain("direction must be nonzero"));
    }
    Ok(run_billiard(tri, start, direction, bounces, None))
}

#[derive(Clone, Debug, Serialize)]
pub struct FagnanoOrbit {
    /// Altitude feet on edges opposite vertices 0, 1, 2.
    pub feet: [P2; 3],
    /// Distance between start and the point after three bounces, plus the
    /// change of direction.
    pub closure_residual: f64,
    pub reflection_residual: f64,
    pub run: BilliardRun,
}

/// The period-3 orbit through the altitude feet of an acute triangle,
/// checked by running the billiard from one foot.
pub fn fagnano_orbit(tri: &Triangle) -> Result<FagnanoOrbit> {
    if tri.class != AngleClass::Acute {
        return Err(Error::domain(format!("Fagnano orbit needs an acute triangle, got {:?}", tri.class)));
    }
    let feet = [tri.altitude_foot(0), tri.altitude_foot(1), tri.altitude_foot(2)];
    // foot 0 lies on edge 1 (vertices 1 → 2)
    let d0 = unit(sub(feet[1], feet[0]));
    let run = run_billiard(tri, feet[0], d0, 3, Some(1));
    if run.status != BilliardStatus::Completed || run.points.len() != 4 {
        return Err(Error::numeric("Fagnano orbit hit a corner"));
    }
    let closure = dist(run.points[3], feet[0]) + dist(run.final_direction, d0);
    Ok(FagnanoOrbit { feet, closure_residual: closure, reflection_residual: run.reflection_residual(), run })
}

/// Inner oval x^{2n} + y^{2n} = a^{2n} (a = `inner_scale`, default 1) inside
/// the outer oval x^{2m} + y^{2m} = 2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PonceletConfig {
    pub n: u32,
    pub m: u32,
    pub inner_scale: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PonceletStep {
    pub point: P2,
    pub tangency: P2,
    /// Angular advance in (0, 2π).
    pub advance: f64,
    pub curve_residual: f64,
    pub tangency_residual: f64,
}

impl PonceletConfig {
    pub fn new(n: u32, m: u32) -> Result<Self> {
        Self::scaled(n, m, 1.0)
    }

    pub fn scaled(n: u32, m: u32, inner_scale: f64) -> Result<Self> {
        if n < 1 || m < 1 {
            return Err(Error::domain("exponents must be at least 1"));
        }
        if !(inner_scale > 0.0) {
            return Err(Error::domain("inner scale must be positive"));
        }
        let cfg = PonceletConfig { n, m, inner_scale };
        // the inner oval must lie strictly inside the outer one
        for i in 0..720 {
            let p = cfg.inner_point(i as f64 * TAU / 720.0);
            if cfg.outer_value(p) >= 0.0 {
                return Err(Error::domain("inner oval is not inside the outer oval"));
            }
        }
        Ok(cfg)
    }

    fn radial(angle: f64, k: u32, level: f64) -> P2 {
        let (c, s) = (angle.cos(), angle.sin());
        let e = 2 * k as i32;
        let r = (level / (c.abs().powi(e) + s.abs().powi(e))).powf(1.0 / e as f64);
        [r * c, r * s]
    }

    pub fn inner_point(&self, angle: f64) -> P2 {
        Self::radial(angle, self.n, self.inner_scale.powi(2 * self.n as i32))
    }

    pub fn outer_point(&self, angle: f64) -> P2 {
        Self::radial(angle, self.m, 2.0)
    }

    fn inner_grad(&self, p: P2) -> P2 {
        let e = 2 * self.n as i32;
        [e as f64 * p[0].powi(e - 1), e as f64 * p[1].powi(e - 1)]
    }

    pub fn outer_value(&self, p: P2) -> f64 {
        let e = 2 * self.m as i32;
        p[0].powi(e) + p[1].powi(e) - 2.0
    }

    fn tangency(&self, p: P2, phi: f64) -> f64 {
        let t = self.inner_point(phi);
        let g = self.inner_grad(t);
        dot(g, sub(p, t)) / norm(g)
    }

    /// One counterclockwise step of the map P: the tangent from `p` touching
    /// the inner oval at angle φ ∈ (α, α + π), continued to the outer oval.
    pub fn step(&self, p: P2) -> Result<PonceletStep> {
        let res = self.outer_value(p);
        if res.abs() > 1e-10 {
            return Err(Error::domain(format!("point is not on the outer oval (residual {res:e})")));
        }
        let alpha = p[1].atan2(p[0]);
        let phi = brent(|f| self.tangency(p, f), alpha, alpha + PI, 1e-15)
            .ok_or_else(|| Error::numeric(format!("tangency solve failed from angle {alpha}")))?;
        let t = self.inner_point(phi);
        let u = unit(sub(t, p));
        let f = |s: f64| self.outer_value(add(t, mul(s, u)));
        let mut hi = 1.0;
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::numeric("far intersection not bracketed"));
            }
        }
        let s = brent(f, 0.0, hi, 1e-15).ok_or_else(|| Error::numeric("far intersection solve failed"))?;
        let q = add(t, mul(s, u));
        let advance = (q[1].atan2(q[0]) - alpha).rem_euclid(TAU);
        Ok(PonceletStep {
            point: q,
            tangency: t,
            advance,
            curve_residual: self.outer_value(q).abs(),
            tangency_residual: dot(unit(self.inner_grad(t)), u).abs(),
        })
    }

    pub fn orbit(&self, p0: P2, steps: usize) -> Result<Vec<PonceletStep>> {
        let mut p = p0;
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let s = self.step(p)?;
            p = s.point;
            out.push(s);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationNumber {
    pub estimate: f64,
    /// |ρ − estimate| ≤ bound for an orientation-preserving circle map.
    pub bound: f64,
    pub iterations: usize,
    pub p0: P2,
}

pub fn rotation_number(cfg: &PonceletConfig, p0: P2, iterations: usize) -> Result<RotationNumber> {
    if iterations < 100 {
        return Err(Error::domain("rotation number needs at least 100 iterations"));
    }
    let total: f64 = cfg.orbit(p0, iterations)?.iter().map(|s| s.advance).sum();
    Ok(RotationNumber { estimate: total / (TAU * iterations as f64), bound: 1.0 / iterations as f64, iterations, p0 })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Conjugacy {
    ConsistentWithRotation { rotation: f64, detail: String },
    NotConjugate { rotation: f64, periodic: P2, witness: P2, displacement: f64 },
    Inconclusive { rotation: f64, detail: String },
}

/// Kolmogorov–Smirnov distance of samples in [0, 1) from the uniform law.
pub fn ks_uniform(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

/// A circle map conjugate to a rotation by 1/4 has every orbit 4-periodic;
/// a map with both 4-periodic and non-periodic points is not conjugate.
pub fn conjugacy_diagnostic(cfg: &PonceletConfig, sample_angles: &[f64], iterations: usize) -> Result<Conjugacy> {
    if sample_angles.len() < 2 {
        return Err(Error::domain("need at least two sample points"));
    }
    let p0 = cfg.outer_point(sample_angles[0]);
    let rho = rotation_number(cfg, p0, iterations.max(100))?.estimate;
    if (rho - 0.25).abs() < 1e-3 {
        let mut disp = Vec::new();
        for a in sample_angles {
            let p = cfg.outer_point(*a);
            let orb = cfg.orbit(p, 4)?;
            disp.push((p, dist(orb[3].point, p)));
        }
        let periodic = disp.iter().find(|d| d.1 < 1e-9);
        let moving = disp.iter().filter(|d| d.1 > 1e-4).max_by(|a, b| a.1.total_cmp(&b.1));
        if let (Some(p), Some(w)) = (periodic, moving) {
            return Ok(Conjugacy::NotConjugate { rotation: rho, periodic: p.0, witness: w.0, displacement: w.1 });
        }
        let max = disp.iter().map(|d| d.1).fold(0.0, f64::max);
        if max < 1e-9 {
            return Ok(Conjugacy::ConsistentWithRotation {
                rotation: rho,
                detail: format!("all samples 4-periodic, max displacement {max:e}"),
            });
        }
    }
    let orb = cfg.orbit(p0, iterations.max(100))?;
    let xs: Vec<f64> = orb.iter().map(|s| (s.point[1].atan2(s.point[0]) / TAU).rem_euclid(1.0)).collect();
    let ks = ks_uniform(xs);
    if ks < 0.05 {
        Ok(Conjugacy::ConsistentWithRotation { rotation: rho, detail: format!("orbit equidistributed, KS = {ks:.4}") })
    } else {
        Ok(Conjugacy::Inconclusive { rotation: rho, detail: format!("KS = {ks:.4}") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::FRAC_PI_4;
    use rand_chacha::ChaCha8Rng;

    fn tri(a: P2, b: P2, c: P2) -> Triangle {
        Triangle::new(a, b, c).unwrap()
    }

    #[test]
    fn triangle_classes() {
        assert_eq!(tri([0.0, 0.0], [1.0, 0.0], [0.0, 1.0]).class, AngleClass::Right);
        assert_eq!(tri([0.0, 0.0], [4.0, 0.0], [1.0, 3.0]).class, AngleClass::Acute);
        assert_eq!(tri([0.0, 0.0], [4.0, 0.0], [-1.0, 1.0]).class, AngleClass::Obtuse);
        assert!(Triangle::new([0.0, 0.0], [1.0, 1.0], [2.0, 2.0]).is_err());
    }

    #[test]
    fn normal_incidence_returns_on_itself() {
        let s3 = 3f64.sqrt();
        let t = tri([0.0, 0.0], [2.0, 0.0], [1.0, s3]);
        let g = [1.0, s3 / 3.0];
        let run = billiard_trajectory(&t, g, [0.0, -1.0], 2).unwrap();
        assert!(dist(run.points[1], [1.0, 0.0]) < 1e-15);
        assert!(dist(run.final_direction, [0.0, 1.0]) < 1e-15);
        assert!(billiard_trajectory(&t, [5.0, 5.0], [1.0, 0.0], 2).is_err());
        assert!(billiard_trajectory(&t, g, [0.0, 0.0], 2).is_err());
    }

    #[test]
    fn reflection_law_and_speed() {
        let t = tri([0.0, 0.0], [3.0, 0.5], [1.2, 2.4]);
        let run = billiard_trajectory(&t, [1.3, 0.9], [0.37, 0.81], 200).unwrap();
        assert_eq!(run.status, BilliardStatus::Completed);
        assert!(run.reflection_residual() < 1e-12);
        assert!((norm(run.final_direction) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn corner_is_detected() {
        let t = tri([0.0, 0.0], [4.0, 0.0], [-1.0, 1.0]);
        let start = [0.5, 0.3];
        let run = billiard_trajectory(&t, start, sub([4.0, 0.0], start), 5).unwrap();
        assert!(matches!(run.status, BilliardStatus::Corner { vertex: 1, .. }));
    }

    /// Orthic triangle from line intersections: the altitude through each
    /// vertex meets the opposite side.
    fn orthic_by_intersection(t: &Triangle) -> [P2; 3] {
        let mut out = [[0.0; 2]; 3];
        for i in 0..3 {
            let a = t.vertices[i];
            let (b, c) = (t.vertices[(i + 1) % 3], t.vertices[(i + 2) % 3]);
            let e = sub(c, b);
            let nrm = [-e[1], e[0]];
            // a + u·nrm = b + v·e  → solve 2×2
            let det = cross(nrm, mul(-1.0, e));
            let r = sub(b, a);
            let u = cross(r, mul(-1.0, e)) / det;
            out[i] = add(a, mul(u, nrm));
        }
        out
    }

    #[test]
    fn fagnano_examples() {
        let s3 = 3f64.sqrt();
        let eq = tri([0.0, 0.0], [2.0, 0.0], [1.0, s3]);
        let f = fagnano_orbit(&eq).unwrap();
        assert!(dist(f.feet[0], [1.5, s3 / 2.0]) < 1e-15);
        assert!(f.closure_residual < 1e-12);
        let t = tri([0.0, 0.0], [4.0, 0.0], [1.0, 3.0]);
        let f = fagnano_orbit(&t).unwrap();
        for (a, b) in f.feet.iter().zip(orthic_by_intersection(&t)) {
            assert!(dist(*a, b) < 1e-12);
        }
        assert!(f.closure_residual < 1e-9 && f.reflection_residual < 1e-12);
        assert!(fagnano_orbit(&tri([0.0, 0.0], [1.0, 0.0], [0.0, 1.0])).is_err());
    }

    #[test]
    fn fagnano_random_acute() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 20 {
            let p = |r: &mut ChaCha8Rng| [r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
            let Ok(t) = Triangle::new(p(&mut rng), p(&mut rng), p(&mut rng)) else { continue };
            if t.class != AngleClass::Acute {
                continue;
            }
            assert!(fagnano_orbit(&t).unwrap().closure_residual < 1e-9);
            done += 1;
        }
    }

    #[test]
    fn fagnano_residual_is_smooth_under_perturbation() {
        let base = [[0.0, 0.0], [4.0, 0.0], [1.0, 3.0]];
        for h in [1e-3, 1e-2, 1e-1] {
            let t = tri(base[0], base[1], [1.0 + h, 3.0 - h]);
            let f = fagnano_orbit(&t).unwrap();
            assert!(f.closure_residual < 1e-9);
        }
    }

    #[test]
    fn poncelet_circles_quarter_turn() {
        let cfg = PonceletConfig::new(1, 1).unwrap();
        let s = cfg.step([2f64.sqrt(), 0.0]).unwrap();
        assert!(dist(s.point, [0.0, 2f64.sqrt()]) < 1e-12);
        assert!((s.advance - PI / 2.0).abs() < 1e-12);
        assert!(cfg.step([1.0, 0.0]).is_err());
        for a in [0.0, 0.3, 1.7, 4.0] {
            let r = rotation_number(&cfg, cfg.outer_point(a), 200).unwrap();
            assert!((r.estimate - 0.25).abs() < 1e-9);
        }
        assert!(rotation_number(&cfg, cfg.outer_point(0.0), 10).is_err());
    }

    #[test]
    fn poncelet_postconditions() {
        for (n, m) in [(1, 1), (2, 2), (3, 3), (2, 1)] {
            let Ok(cfg) = PonceletConfig::new(n, m) else { continue };
            for s in cfg.orbit(cfg.outer_point(0.4), 50).unwrap() {
                assert!(s.curve_residual < 1e-9);
                assert!(s.tangency_residual < 1e-9, "{s:?}");
            }
        }
    }

    #[test]
    fn superellipse_symmetric_orbit() {
        let cfg = PonceletConfig::new(2, 2).unwrap();
        // the diagonal points (±1, ±1) form the symmetric 4-cycle
        let p = [1.0, 1.0];
        let orb = cfg.orbit(p, 4).unwrap();
        assert!(dist(orb[0].point, [-1.0, 1.0]) < 1e-12);
        assert!(dist(orb[3].point, p) < 1e-12);
        // an axis point is not periodic
        let a = [2f64.powf(0.25), 0.0];
        assert!(dist(cfg.orbit(a, 4).unwrap()[3].point, a) > 1e-2);
        let r = rotation_number(&cfg, p, 400).unwrap();
        assert!((r.estimate - 0.25).abs() < 1e-6);
        let r = rotation_number(&cfg, cfg.outer_point(0.3), 4000).unwrap();
        assert!((r.estimate - 0.25).abs() < r.bound);
    }

    #[test]
    fn shrinking_inner_circle_tends_to_half_turn() {
        let mut last = 0.0;
        for a in [0.9, 0.5, 0.2, 0.05, 0.01] {
            let cfg = PonceletConfig::scaled(1, 1, a).unwrap();
            let r = rotation_number(&cfg, cfg.outer_point(0.1), 100).unwrap();
            // chord tangent to a circle of radius a inside one of radius √2
            let exact = (a / 2f64.sqrt()).acos() / PI;
            assert!((r.estimate - exact).abs() < 1e-9);
            assert!(r.estimate > last);
            last = r.estimate;
        }
        assert!(last > 0.49);
    }

    #[test]
    fn conjugacy_dichotomy() {
        let samples = [FRAC_PI_4, 0.0, 0.3, 1.1];
        let c = conjugacy_diagnostic(&PonceletConfig::new(1, 1).unwrap(), &samples, 200).unwrap();
        assert!(matches!(c, Conjugacy::ConsistentWithRotation { .. }), "{c:?}");
        for k in [2, 3] {
            let c = conjugacy_diagnostic(&PonceletConfig::new(k, k).unwrap(), &samples, 200).unwrap();
            match c {
                Conjugacy::NotConjugate { witness, periodic, .. } => {
                    assert!((witness[0].abs() - witness[1].abs()).abs() > 1e-3);
                    assert!((periodic[0] - periodic[1]).abs() < 1e-12);
                }
                other => panic!("{other:?}"),
            }
        }
        assert!(conjugacy_diagnostic(&PonceletConfig::new(1, 1).unwrap(), &[0.0], 200).is_err());
    }

    #[test]
    fn ks_statistic() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        assert!(ks_uniform(xs) < 1e-3);
        assert!(ks_uniform(vec![0.1; 50]) > 0.8);
    }
}
