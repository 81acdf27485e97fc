use std::f64::consts::PI;

use serde::Serialize;

use super::{Field, VectorField};
use crate::algebra::Poly;
use crate::error::{Error, Result};

/// Equilibria closer than this are merged.
const DEDUP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquilibriumKind {
    /// Purely imaginary eigenvalues in a Hamiltonian (divergence-free) field.
    Center,
    /// Purely imaginary eigenvalues, centre not established.
    CenterCandidate,
    Saddle,
    Node,
    Focus,
    Degenerate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Equilibrium {
    pub point: [f64; 2],
    pub kind: EquilibriumKind,
    /// Eigenvalues as (re, im) pairs.
    pub eigenvalues: [(f64, f64); 2],
    /// Poincaré index, `None` when degenerate.
    pub index: Option<i32>,
}

struct Planar {
    p: Poly,
    q: Poly,
    jac: [[Poly; 2]; 2],
}

impl Planar {
    fn new(vf: &VectorField) -> Result<Self> {
        let ps = vf
            .polys()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| Error::domain("equilibrium search needs a planar polynomial field"))?;
        let (p, q) = (ps[0].clone(), ps[1].clone());
        let jac = [[p.derivative(0), p.derivative(1)], [q.derivative(0), q.derivative(1)]];
        Ok(Planar { p, q, jac })
    }

    fn j(&self, x: &[f64]) -> [[f64; 2]; 2] {
        [
            [self.jac[0][0].eval_f64(x), self.jac[0][1].eval_f64(x)],
            [self.jac[1][0].eval_f64(x), self.jac[1][1].eval_f64(x)],
        ]
    }

    fn newton(&self, x0: [f64; 2]) -> Option<[f64; 2]> {
        let mut x = x0;
        for _ in 0..100 {
            let f = [self.p.eval_f64(&x), self.q.eval_f64(&x)];
            let j = self.j(&x);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det == 0.0 || !det.is_finite() {
                // Singular Jacobian: accept only if already a zero.
                return (f[0].abs().max(f[1].abs()) < 1e-12).then_some(x);
            }
            let dx = (j[1][1] * f[0] - j[0][1] * f[1]) / det;
            let dy = (j[0][0] * f[1] - j[1][0] * f[0]) / det;
            x = [x[0] - dx, x[1] - dy];
            if !x[0].is_finite() || !x[1].is_finite() {
                return None;
            }
            if dx.abs().max(dy.abs()) < 1e-15 * (1.0 + x[0].abs().max(x[1].abs())) {
                break;
            }
        }
        let r = self.p.eval_f64(&x).abs().max(self.q.eval_f64(&x).abs());
        (r < 1e-10).then_some(x)
    }
}

/// Grid-seeded Newton search for zeros of a planar polynomial field in
/// `bounds`, classified by the linearisation.
pub fn classify_equilibria(vf: &VectorField, bounds: [(f64, f64); 2], grid: usize) -> Result<Vec<Equilibrium>> {
    let pl = Planar::new(vf)?;
    let hamiltonian = (&pl.jac[0][0] + &pl.jac[1][1]).is_zero();
    let grid = grid.max(2);
    let mut found: Vec<[f64; 2]> = Vec::new();
    let inside = |x: &[f64; 2]| {
        let eps = 1e-9;
        (bounds[0].0 - eps..=bounds[0].1 + eps).contains(&x[0]) && (bounds[1].0 - eps..=bounds[1].1 + eps).contains(&x[1])
    };
    for i in 0..grid {
        for j in 0..grid {
            let s = [
                bounds[0].0 + (bounds[0].1 - bounds[0].0) * i as f64 / (grid - 1) as f64,
                bounds[1].0 + (bounds[1].1 - bounds[1].0) * j as f64 / (grid - 1) as f64,
            ];
            if let Some(x) = pl.newton(s) {
                if inside(&x) && !found.iter().any(|f| (f[0] - x[0]).hypot(f[1] - x[1]) < DEDUP_TOL) {
                    found.push(x);
                }
            }
        }
    }
    found.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(found
        .into_iter()
        .map(|x| {
            let j = pl.j(&x);
            let tr = j[0][0] + j[1][1];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            let scale = 1.0 + j.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
            let disc = tr * tr - 4.0 * det;
            let eig = if disc >= 0.0 {
                let s = disc.sqrt();
                [((tr + s) / 2.0, 0.0), ((tr - s) / 2.0, 0.0)]
            } else {
                let s = (-disc).sqrt();
                [(tr / 2.0, s / 2.0), (tr / 2.0, -s / 2.0)]
            };
            let kind = if det.abs() < 1e-10 * scale * scale {
                EquilibriumKind::Degenerate
            } else if det < 0.0 {
                EquilibriumKind::Saddle
            } else if disc < 0.0 && tr.abs() < 1e-10 * scale {
                if hamiltonian {
                    EquilibriumKind::Center
                } else {
                    EquilibriumKind::CenterCandidate
                }
            } else if disc < 0.0 {
                EquilibriumKind::Focus
            } else {
                EquilibriumKind::Node
            };
            let index = match kind {
                EquilibriumKind::Degenerate => None,
                EquilibriumKind::Saddle => Some(-1),
                _ => Some(1),
            };
            Equilibrium { point: x, kind, eigenvalues: eig, index }
        })
        .collect())
}

/// Winding number of the field along the circle of `radius` about `center`.
pub fn field_index(vf: &dyn Field, center: [f64; 2], radius: f64) -> Result<i32> {
    if vf.dim() != 2 {
        return Err(Error::domain("index needs a planar field"));
    }
    if radius <= 0.0 {
        return Err(Error::domain("radius must be positive"));
    }
    let at = |th: f64| -> [f64; 2] {
        let mut out = [0.0; 2];
        let x = [center[0] + radius * th.cos(), center[1] + radius * th.sin()];
        vf.eval(0.0, &x, &mut out);
        out
    };
    let n = 256;
    let samples: Vec<[f64; 2]> = (0..n).map(|k| at(2.0 * PI * k as f64 / n as f64)).collect();
    let scale = samples.iter().fold(0.0f64, |a, v| a.max(v[0].hypot(v[1])));
    let tiny = 1e-12 * scale.max(1e-300);
    let zero_err = || Error::domain(format!("field vanishes near the circle of radius {radius}; choose another radius"));
    let ang = |v: [f64; 2]| -> Result<f64> {
        if v[0].hypot(v[1]) <= tiny {
            Err(zero_err())
        } else {
            Ok(v[1].atan2(v[0]))
        }
    };
    fn wrap(d: f64) -> f64 {
        let mut d = d;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d <= -PI {
            d += 2.0 * PI;
        }
        d
    }
    // Accumulate argument increments, refining any increment ≥ π/2.
    fn seg(
        at: &dyn Fn(f64) -> [f64; 2],
        ang: &dyn Fn([f64; 2]) -> Result<f64>,
        t0: f64,
        a0: f64,
        t1: f64,
        a1: f64,
        depth: u32,
        err: &dyn Fn() -> Error,
    ) -> Result<f64> {
        let d = wrap(a1 - a0);
        if d.abs() < PI / 2.0 {
            return Ok(d);
        }
        if depth > 40 {
            return Err(err());
        }
        let tm = 0.5 * (t0 + t1);
        let am = ang(at(tm))?;
        Ok(seg(at, ang, t0, a0, tm, am, depth + 1, err)? + seg(at, ang, tm, am, t1, a1, depth + 1, err)?)
    }
    let mut total = 0.0;
    let mut a_prev = ang(samples[0])?;
    for k in 1..=n {
        let t0 = 2.0 * PI * (k - 1) as f64 / n as f64;
        let t1 = 2.0 * PI * k as f64 / n as f64;
        let a1 = ang(samples[k % n])?;
        total += seg(&at, &ang, t0, a_prev, t1, a1, 0, &zero_err)?;
        a_prev = a1;
    }
    Ok((total / (2.0 * PI)).round() as i32)
}
