//! Dormand–Prince 5(4) with PI step control, free 4th-order dense output
//! and event location.

use serde::Serialize;

use super::{Field, FlowError};

/// Local error target as a fraction of the requested tolerance, so that the
/// global error over O(100) time units stays O(100·tol).
const LOCAL_SAFETY: f64 = 0.1;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
    /// Declare blow-up as soon as |x| exceeds this.
    pub max_norm: Option<f64>,
    /// Keep every step (and its dense-output segment) in the trajectory.
    pub record: bool,
}

impl IntegrateOptions {
    pub fn with_tol(tol: f64) -> Self {
        IntegrateOptions { rtol: tol, atol: tol, ..Default::default() }
    }
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rtol: 1e-10,
            atol: 1e-10,
            h0: None,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
            max_norm: None,
            record: false,
        }
    }
}

/// Scalar event function `g(t, x)`; crossings of zero are reported.
pub struct Event<'a> {
    pub g: Box<dyn Fn(f64, &[f64]) -> f64 + Sync + 'a>,
    /// +1: only increasing crossings, −1: only decreasing, 0: both.
    pub direction: i32,
    pub terminal: bool,
}

impl<'a> Event<'a> {
    pub fn new(g: impl Fn(f64, &[f64]) -> f64 + Sync + 'a, direction: i32, terminal: bool) -> Self {
        Event { g: Box::new(g), direction, terminal }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub id: usize,
    pub t: f64,
    pub state: Vec<f64>,
    pub direction: i32,
}

/// Dense-output interpolant on one accepted step.
#[derive(Clone, Debug, Serialize)]
pub struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseSegment {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.rcont;
        (0..r[0].len())
            .map(|i| r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i]))))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub x0: Vec<f64>,
    /// Accepted step times and states (only when recording).
    pub t: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    #[serde(skip)]
    pub segments: Vec<DenseSegment>,
    pub events: Vec<EventRecord>,
    pub final_t: f64,
    pub final_state: Vec<f64>,
    /// Index of the terminal event that stopped the integration.
    pub terminated_by: Option<usize>,
    pub steps: usize,
}

impl Trajectory {
    /// Dense-output state at time `t` (requires recording).
    pub fn at(&self, t: f64) -> Option<Vec<f64>> {
        self.segments
            .iter()
            .find(|s| {
                let (a, b) = (s.t0, s.t0 + s.h);
                (a.min(b)..=a.max(b)).contains(&t)
            })
            .map(|s| s.eval(t))
    }

    /// CSV with columns t, x, y[, z], event.
    pub fn to_csv(&self) -> String {
        let names = ["x", "y", "z", "w"];
        let n = self.x0.len();
        let mut out = String::from("t");
        for i in 0..n {
            out.push(',');
            out.push_str(names.get(i).copied().unwrap_or("u"));
        }
        out.push_str(",event\n");
        let mut rows: Vec<(f64, &Vec<f64>, String)> =
            self.t.iter().zip(&self.states).map(|(t, s)| (*t, s, String::new())).collect();
        for e in &self.events {
            rows.push((e.t, &e.state, e.id.to_string()));
        }
        rows.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for (t, s, ev) in rows {
            out.push_str(&format!("{t:.15e}"));
            for v in s {
                out.push_str(&format!(",{v:.15e}"));
            }
            out.push_str(&format!(",{ev}\n"));
        }
        out
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct Stepper<'f> {
    f: &'f dyn Field,
    n: usize,
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
}

impl<'f> Stepper<'f> {
    fn new(f: &'f dyn Field) -> Self {
        let n = f.dim();
        Stepper { f, n, k: Default::default(), tmp: vec![0.0; n] }
    }

    /// One step from (t, y) with `k[0] = f(t, y)` already set. Returns the
    /// new state and the error estimate vector; leaves `k[6] = f(t+h, y1)`.
    fn step(&mut self, t: f64, y: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        for k in self.k.iter_mut().skip(1) {
            k.resize(n, 0.0);
        }
        macro_rules! stage {
            ($idx:expr, $c:expr, [$($j:expr => $a:expr),*]) => {{
                for i in 0..n {
                    self.tmp[i] = y[i] + h * (0.0 $(+ $a * self.k[$j][i])*);
                }
                let (head, tail) = self.k.split_at_mut($idx);
                let _ = head;
                self.f.eval(t + $c * h, &self.tmp, &mut tail[0]);
            }};
        }
        stage!(1, C2, [0 => A21]);
        stage!(2, C3, [0 => A31, 1 => A32]);
        stage!(3, C4, [0 => A41, 1 => A42, 2 => A43]);
        stage!(4, C5, [0 => A51, 1 => A52, 2 => A53, 3 => A54]);
        stage!(5, 1.0, [0 => A61, 1 => A62, 2 => A63, 3 => A64, 4 => A65]);
        let y1: Vec<f64> = (0..n)
            .map(|i| {
                y[i] + h
                    * (A71 * self.k[0][i]
                        + A73 * self.k[2][i]
                        + A74 * self.k[3][i]
                        + A75 * self.k[4][i]
                        + A76 * self.k[5][i])
            })
            .collect();
        let (_, tail) = self.k.split_at_mut(6);
        self.f.eval(t + h, &y1, &mut tail[0]);
        let err: Vec<f64> = (0..n)
            .map(|i| {
                h * (E1 * self.k[0][i]
                    + E3 * self.k[2][i]
                    + E4 * self.k[3][i]
                    + E5 * self.k[4][i]
                    + E6 * self.k[5][i]
                    + E7 * self.k[6][i])
            })
            .collect();
        (y1, err)
    }

    fn dense(&self, t: f64, y0: &[f64], y1: &[f64], h: f64) -> DenseSegment {
        let n = self.n;
        let k = &self.k;
        let mut r: [Vec<f64>; 5] = Default::default();
        for i in 0..n {
            let ydiff = y1[i] - y0[i];
            let bspl = h * k[0][i] - ydiff;
            r[0].push(y0[i]);
            r[1].push(ydiff);
            r[2].push(bspl);
            r[3].push(ydiff - h * k[6][i] - bspl);
            r[4].push(
                h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]),
            );
        }
        DenseSegment { t0: t, h, rcont: r }
    }

    /// Single direct step, used to polish event states.
    fn direct(&mut self, t: f64, y: &[f64], h: f64) -> Vec<f64> {
        self.k[0].resize(self.n, 0.0);
        self.f.eval(t, y, &mut self.k[0]);
        self.step(t, y, h).0
    }
}

fn brent_on<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    crate::numeric::brent(f, a, b, tol).unwrap_or(b)
}

/// Integrates from `t0` to `t1` (backwards when `t1 < t0`).
pub fn integrate(
    f: &dyn Field,
    x0: &[f64],
    t0: f64,
    t1: f64,
    opts: &IntegrateOptions,
    events: &[Event<'_>],
) -> Result<Trajectory, FlowError> {
    let n = f.dim();
    assert_eq!(x0.len(), n, "initial state has wrong dimension");
    if f.at_pole(x0) {
        return Err(FlowError::Pole { t: t0, state: x0.to_vec() });
    }
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut st = Stepper::new(f);
    let mut t = t0;
    let mut y = x0.to_vec();
    st.k[0] = vec![0.0; n];
    f.eval(t, &y, &mut st.k[0]);

    let mut traj = Trajectory {
        x0: x0.to_vec(),
        t: Vec::new(),
        states: Vec::new(),
        segments: Vec::new(),
        events: Vec::new(),
        final_t: t0,
        final_state: y.clone(),
        terminated_by: None,
        steps: 0,
    };
    if opts.record {
        traj.t.push(t);
        traj.states.push(y.clone());
    }
    if span == 0.0 {
        return Ok(traj);
    }

    let sc = |a: &[f64], b: &[f64], i: usize| LOCAL_SAFETY * (opts.atol + opts.rtol * a[i].abs().max(b[i].abs()));
    let mut h = match opts.h0 {
        Some(h) => h.abs(),
        None => {
            let d0 = (0..n).map(|i| (y[i] / sc(&y, &y, i)).powi(2)).sum::<f64>().sqrt() / (n as f64).sqrt();
            let d1 = (0..n).map(|i| (st.k[0][i] / sc(&y, &y, i)).powi(2)).sum::<f64>().sqrt()
                / (n as f64).sqrt();
            let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h.min(span)
        }
    };
    h = h.min(opts.h_max).max(1e-12 * span.max(1.0));
    // Starting on (or within rounding of) an event surface is not a crossing.
    let ny0 = 1.0 + norm(&y);
    let mut g_prev: Vec<f64> = events
        .iter()
        .map(|e| {
            let g = (e.g)(t, &y);
            if g.abs() < 1e-13 * ny0 {
                0.0
            } else {
                g
            }
        })
        .collect();
    let mut err_old: f64 = 1e-4;
    let mut rejected = false;

    loop {
        if traj.steps >= opts.max_steps {
            return Err(FlowError::StepLimit(opts.max_steps));
        }
        let remaining = (t1 - t) * dir;
        if remaining <= 0.0 {
            break;
        }
        let last = h >= remaining;
        let hs = if last { remaining } else { h } * dir;
        let (y1, errv) = st.step(t, &y, hs);
        traj.steps += 1;
        let err = ((0..n).map(|i| (errv[i] / sc(&y, &y1, i)).powi(2)).sum::<f64>() / n as f64).sqrt();
        let y1_norm = norm(&y1);
        if !err.is_finite() || !y1_norm.is_finite() {
            // Non-finite stage values: shrink hard and retry.
            h *= 0.1;
            if h < 1e-14 {
                return Err(blowup_or_underflow(t, &y, norm(x0)));
            }
            rejected = true;
            continue;
        }
        if err <= 1.0 {
            let t_new = if last { t1 } else { t + hs };
            let seg = st.dense(t, &y, &y1, hs);
            let fk = st.k[6].clone();
            // Events.
            let mut first_terminal: Option<(f64, usize, Vec<f64>)> = None;
            let mut found: Vec<EventRecord> = Vec::new();
            for (id, ev) in events.iter().enumerate() {
                let g_end = (ev.g)(t_new, &y1);
                let gp = g_prev[id];
                let crossed = (gp * g_end < 0.0) || (g_end == 0.0 && gp != 0.0);
                if crossed {
                    let d = if g_end > gp { 1 } else { -1 };
                    let d = d * if dir > 0.0 { 1 } else { -1 };
                    if ev.direction == 0 || ev.direction == d {
                        let gt = |s: f64| (ev.g)(s, &seg.eval(s));
                        let mut te = if g_end == 0.0 {
                            t_new
                        } else {
                            brent_on(gt, t, t_new, 1e-15 * t_new.abs().max(1.0))
                        };
                        let mut xe = st.direct(t, &y, te - t);
                        // Newton polish in time using the field direction.
                        for _ in 0..4 {
                            let ge = (ev.g)(te, &xe);
                            let mut fx = vec![0.0; n];
                            f.eval(te, &xe, &mut fx);
                            let dt = 1e-7 * hs.abs().max(1e-6);
                            let xs: Vec<f64> = xe.iter().zip(&fx).map(|(a, b)| a + dt * b).collect();
                            let dg = ((ev.g)(te + dt, &xs) - ge) / dt;
                            if dg == 0.0 || !dg.is_finite() {
                                break;
                            }
                            let step = ge / dg;
                            if step.abs() > hs.abs() {
                                break;
                            }
                            te -= step;
                            xe = st.direct(t, &y, te - t);
                            if step.abs() < 1e-14 * te.abs().max(1.0) {
                                break;
                            }
                        }
                        let rec = EventRecord { id, t: te, state: xe.clone(), direction: d };
                        if ev.terminal
                            && first_terminal.as_ref().is_none_or(|(tt, _, _)| (te - *tt) * dir < 0.0)
                        {
                            first_terminal = Some((te, id, xe));
                        }
                        found.push(rec);
                    }
                }
                g_prev[id] = g_end;
            }
            found.sort_by(|a, b| ((a.t - b.t) * dir).partial_cmp(&0.0).unwrap());
            if let Some((te, id, xe)) = first_terminal {
                traj.events.extend(found.into_iter().filter(|r| (r.t - te) * dir <= 0.0));
                if opts.record {
                    traj.segments.push(seg);
                    traj.t.push(te);
                    traj.states.push(xe.clone());
                }
                traj.final_t = te;
                traj.final_state = xe;
                traj.terminated_by = Some(id);
                return Ok(traj);
            }
            traj.events.extend(found);
            if opts.record {
                traj.segments.push(seg);
                traj.t.push(t_new);
                traj.states.push(y1.clone());
            }
            t = t_new;
            y = y1;
            st.k[0] = fk;
            if f.at_pole(&y) {
                return Err(FlowError::Pole { t, state: y });
            }
            let ny = norm(&y);
            if let Some(cap) = opts.max_norm {
                if ny > cap {
                    return Err(FlowError::BlowUp { t, state: y, norm: ny });
                }
            }
            if last {
                break;
            }
            let fac = (err.max(1e-10).powf(0.17) / err_old.powf(0.04) / 0.9).clamp(0.2, 10.0);
            let mut hn = h / fac;
            if rejected {
                hn = hn.min(h);
            }
            h = hn.min(opts.h_max);
            err_old = err.max(1e-4);
            rejected = false;
        } else {
            let fac = (err.powf(0.17) / 0.9).min(10.0);
            h /= fac;
            rejected = true;
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(blowup_or_underflow(t, &y, norm(x0)));
        }
    }
    traj.final_t = t;
    traj.final_state = y;
    Ok(traj)
}

// Step collapse with a large growth in norm is a finite-time escape.
fn blowup_or_underflow(t: f64, y: &[f64], n0: f64) -> FlowError {
    let ny = norm(y);
    if ny > 1e8 || !ny.is_finite() || ny > 1e4 * n0.max(1.0) {
        FlowError::BlowUp { t, state: y.to_vec(), norm: ny }
    } else {
        FlowError::StepUnderflow { t, state: y.to_vec() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{x2, y2, Poly};
    use crate::flow::VectorField;
    use std::f64::consts::PI;

    #[test]
    fn linear_center_returns() {
        let vf = VectorField::planar(-y2(), x2());
        let tr = integrate(&vf, &[1.0, 0.0], 0.0, 2.0 * PI, &IntegrateOptions::with_tol(1e-12), &[]).unwrap();
        assert!((tr.final_state[0] - 1.0).abs() < 1e-9 && tr.final_state[1].abs() < 1e-9);
    }

    #[test]
    fn exponential_growth() {
        let vf = VectorField::polynomial(vec![Poly::var(0, 1)]).unwrap();
        let tr = integrate(&vf, &[1.0], 0.0, 1.0, &IntegrateOptions::with_tol(1e-13), &[]).unwrap();
        assert!((tr.final_state[0] - std::f64::consts::E).abs() < 1e-10);
        // backwards
        let tr = integrate(&vf, &[1.0], 0.0, -1.0, &IntegrateOptions::with_tol(1e-13), &[]).unwrap();
        assert!((tr.final_state[0] - (-1.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn blowup_detected() {
        // x' = x^2 from x = 1 escapes at t = 1.
        let x = Poly::var(0, 1);
        let vf = VectorField::polynomial(vec![&x * &x]).unwrap();
        let err = integrate(&vf, &[1.0], 0.0, 2.0, &IntegrateOptions::with_tol(1e-10), &[]).unwrap_err();
        match err {
            FlowError::BlowUp { t, .. } => assert!((t - 1.0).abs() < 1e-3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn events_located_precisely() {
        let vf = VectorField::planar(-y2(), x2());
        let ev = [Event::new(|_, x: &[f64]| x[1], 0, false), Event::new(|_, x: &[f64]| x[0], -1, true)];
        let opts = IntegrateOptions { record: true, ..IntegrateOptions::with_tol(1e-12) };
        let tr = integrate(&vf, &[1.0, 0.0], 0.0, 10.0, &opts, &ev).unwrap();
        assert_eq!(tr.terminated_by, Some(1));
        assert!((tr.final_t - PI / 2.0).abs() < 1e-11);
        assert!(tr.final_state[0].abs() < 1e-10);
        assert!(tr.events.iter().all(|e| e.t <= tr.final_t));
        let tr = integrate(&vf, &[1.0, 0.0], 0.0, 7.0, &opts, &ev[..1]).unwrap();
        let times: Vec<f64> = tr.events.iter().map(|e| e.t).collect();
        assert_eq!(times.len(), 2);
        assert!((times[0] - PI).abs() < 1e-11 && (times[1] - 2.0 * PI).abs() < 1e-11);
        // dense output consistency
        let mid = tr.at(1.0).unwrap();
        assert!((mid[0] - 1f64.cos()).abs() < 1e-9);
    }
}
