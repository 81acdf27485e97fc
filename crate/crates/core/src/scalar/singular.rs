//! Positive periodic solutions of x^p x″ = f(t).

use num_traits::Signed;
use serde::Serialize;

use super::{Period, TrigPoly};
use crate::algebra::q_to_f64;
use crate::error::{Error, Result};
use crate::flow::{integrate, Event, IntegrateOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NecessaryVerdict {
    FailsSign,
    FailsMean,
    Candidate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Necessary {
    pub changes_sign: bool,
    /// Average of f over one period (exact, then rounded).
    pub mean: f64,
    pub verdict: NecessaryVerdict,
}

/// A positive periodic solution needs f to change sign and to have
/// negative mean. Sign changes are decided exactly: under u = tan(θ/2)
/// f becomes a polynomial whose odd-multiplicity real roots are counted
/// by Sturm sequences; θ = π corresponds to u = ∞.
pub fn singular_necessary(f: &TrigPoly, _period: &Period) -> Result<Necessary> {
    if f.is_zero() {
        return Err(Error::domain("f is identically zero"));
    }
    let p = f.half_angle_polynomial();
    let odd_degree = p.degree().unwrap_or(0) % 2 == 1;
    let changes_sign = odd_degree || p.count_sign_changes_on_line() > 0;
    let mean = f.mean();
    let verdict = if !changes_sign {
        NecessaryVerdict::FailsSign
    } else if !mean.is_negative() {
        NecessaryVerdict::FailsMean
    } else {
        NecessaryVerdict::Candidate
    };
    Ok(Necessary { changes_sign, mean: q_to_f64(&mean), verdict })
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ShootResult {
    Found {
        x0: f64,
        v0: f64,
        residual: f64,
        iterations: usize,
        min_x: f64,
        /// (t, x) at 65 equally spaced times over one period.
        trajectory: Vec<(f64, f64)>,
    },
    NotFound {
        reason: String,
    },
}

// x must stay above this fraction of its starting value.
const POSITIVITY_FLOOR: f64 = 1e-6;

struct Shot {
    end: [f64; 2],
    min_x: f64,
}

fn shoot(p: f64, f: &TrigPoly, period: f64, z: [f64; 2], record: bool) -> Option<(Shot, Vec<(f64, f64)>)> {
    if z[0] <= 0.0 {
        return None;
    }
    let omega = 2.0 * std::f64::consts::PI / period;
    let hs: Vec<(f64, f64, f64)> = f.terms().map(|(k, c, s)| (k as f64, q_to_f64(c), q_to_f64(s))).collect();
    let field = (2usize, |t: f64, x: &[f64], out: &mut [f64]| {
        let ph = omega * t;
        let ft: f64 = hs.iter().map(|(k, c, s)| c * (k * ph).cos() + s * (k * ph).sin()).sum();
        out[0] = x[1];
        out[1] = ft / x[0].abs().powf(p);
    });
    let floor = POSITIVITY_FLOOR * z[0];
    let ev = [Event::new(move |_, x: &[f64]| x[0] - floor, -1, true)];
    let opts = IntegrateOptions { record, max_norm: Some(1e8), ..IntegrateOptions::with_tol(1e-12) };
    let tr = integrate(&field, &z, 0.0, period, &opts, &ev).ok()?;
    if tr.terminated_by.is_some() {
        return None;
    }
    let mut samples = Vec::new();
    let mut min_x = z[0].min(tr.final_state[0]);
    if record {
        for i in 0..=64 {
            let t = period * i as f64 / 64.0;
            let x = tr.at(t)?[0];
            min_x = min_x.min(x);
            samples.push((t, x));
        }
    } else {
        min_x = min_x.min(tr.states.iter().map(|s| s[0]).fold(f64::INFINITY, f64::min));
    }
    Some((Shot { end: [tr.final_state[0], tr.final_state[1]], min_x }, samples))
}

fn residual(p: f64, f: &TrigPoly, period: f64, z: [f64; 2]) -> Option<[f64; 2]> {
    let (s, _) = shoot(p, f, period, z, false)?;
    Some([s.end[0] - z[0], s.end[1] - z[1]])
}

/// Damped Newton on (x₀, v₀) ↦ (x(T) − x₀, x′(T) − v₀); a step that
/// drives x to zero is rejected and halved.
pub fn singular_shoot(p: f64, f: &TrigPoly, period: &Period, guess: (f64, f64)) -> Result<ShootResult> {
    if !(p > 0.0) {
        return Err(Error::domain("exponent p must be positive"));
    }
    if !(guess.0 > 0.0) {
        return Err(Error::domain("initial guess needs x0 > 0"));
    }
    let nec = singular_necessary(f, period)?;
    if nec.verdict != NecessaryVerdict::Candidate {
        return Ok(ShootResult::NotFound {
            reason: format!("necessary condition fails ({:?}, mean {})", nec.verdict, nec.mean),
        });
    }
    let t = period.value();
    let mut z = [guess.0, guess.1];
    let Some(mut g) = residual(p, f, t, z) else {
        return Ok(ShootResult::NotFound { reason: "orbit from the initial guess reaches x = 0".into() });
    };
    let norm = |g: [f64; 2]| g[0].hypot(g[1]);
    for it in 0..60 {
        if norm(g) < 1e-11 {
            let (shot, trajectory) = shoot(p, f, t, z, true).expect("accepted iterate");
            return Ok(ShootResult::Found {
                x0: z[0],
                v0: z[1],
                residual: norm(g),
                iterations: it,
                min_x: shot.min_x,
                trajectory,
            });
        }
        let h = 1e-7 * z[0].abs().max(1.0);
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let mut zp = z;
            let mut zm = z;
            zp[j] += h;
            zm[j] -= h;
            let (Some(gp), Some(gm)) = (residual(p, f, t, zp), residual(p, f, t, zm)) else {
                return Ok(ShootResult::NotFound { reason: format!("singularity near ({}, {})", z[0], z[1]) });
            };
            for i in 0..2 {
                jac[i][j] = (gp[i] - gm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det.abs() < 1e-14 {
            return Ok(ShootResult::NotFound { reason: "singular shooting Jacobian".into() });
        }
        let dz = [
            -(jac[1][1] * g[0] - jac[0][1] * g[1]) / det,
            -(-jac[1][0] * g[0] + jac[0][0] * g[1]) / det,
        ];
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let zn = [z[0] + lambda * dz[0], z[1] + lambda * dz[1]];
            if let Some(gn) = residual(p, f, t, zn) {
                if norm(gn) < (1.0 - 1e-4 * lambda) * norm(g) {
                    z = zn;
                    g = gn;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Ok(ShootResult::NotFound { reason: format!("no admissible Newton step, residual {:e}", norm(g)) });
        }
    }
    Ok(ShootResult::NotFound { reason: format!("Newton did not converge, residual {:e}", norm(g)) })
}
