use rayon::prelude::*;
use serde::Serialize;

use super::{return_map, ReturnOptions, ReturnSample, Section, CLOSURE_TOL};
use crate::error::{Error, Result};
use crate::flow::Field;

#[derive(Clone, Debug, Serialize)]
pub struct PeriodScan {
    /// Closed orbits only, in grid order.
    pub samples: Vec<ReturnSample>,
    /// Grid values that did not close (or failed), with the reason.
    pub excluded: Vec<(f64, String)>,
}

/// Period function on a section rooted at a centre.
pub fn period_scan(vf: &dyn Field, sec: &Section, s_grid: &[f64], opts: &ReturnOptions) -> PeriodScan {
    let o = ReturnOptions { strict_range: false, ..opts.clone() };
    let res: Vec<_> = s_grid.par_iter().map(|&s| (s, return_map(vf, sec, s, &o))).collect();
    let mut samples = Vec::new();
    let mut excluded = Vec::new();
    for (s, r) in res {
        match r {
            Ok(rs) if (rs.pi - rs.r).abs() < CLOSURE_TOL => samples.push(rs),
            Ok(rs) => excluded.push((s, format!("orbit does not close: |Π(s) − s| = {:e}", (rs.pi - rs.r).abs()))),
            Err(e) => excluded.push((s, e.to_string())),
        }
    }
    PeriodScan { samples, excluded }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalPeriods {
    /// Number of sign changes of T′ at the final resolution.
    pub count: usize,
    pub locations: Vec<f64>,
    /// Bracket widths after each refinement round.
    pub trace: Vec<String>,
}

/// Relative change in T treated as numerical noise when taking T′.
const FLAT_TOL: f64 = 1e-9;

fn derivative_signs(s: &[f64], t: &[f64]) -> Vec<(f64, i32)> {
    let scale = t.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    (1..s.len() - 1)
        .map(|i| {
            let dt = t[i + 1] - t[i - 1];
            let sign = if dt.abs() <= FLAT_TOL * scale { 0 } else if dt > 0.0 { 1 } else { -1 };
            (s[i], sign)
        })
        .collect()
}

fn brackets(signs: &[(f64, i32)]) -> Vec<(f64, f64)> {
    let nz: Vec<&(f64, i32)> = signs.iter().filter(|p| p.1 != 0).collect();
    nz.windows(2).filter(|w| w[0].1 != w[1].1).map(|w| (w[0].0, w[1].0)).collect()
}

/// Zeros of T′ from period samples `(s, T)`. With `resample`, each bracket is
/// refined three times on a grid four times finer.
pub fn critical_periods(
    samples: &[(f64, f64)],
    resample: Option<&(dyn Fn(f64) -> Option<f64> + Sync)>,
) -> Result<CriticalPeriods> {
    if samples.len() < 8 {
        return Err(Error::domain("critical period search needs at least 8 samples"));
    }
    let mut pts = samples.to_vec();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let s: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let t: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let coarse = brackets(&derivative_signs(&s, &t));
    let mut trace = vec![format!("coarse grid: {} sign change(s)", coarse.len())];
    let mut locations = Vec::new();
    let spacing = (s[s.len() - 1] - s[0]) / (s.len() - 1) as f64;
    for (a, b) in coarse {
        let (mut lo, mut hi) = (a, b);
        let mut h = spacing;
        if let Some(f) = resample {
            for round in 1..=3 {
                h /= 4.0;
                let from = lo - h;
                let n = (((hi - lo) / h).ceil() as usize + 2).max(4);
                let grid: Vec<f64> = (0..=n).map(|i| from + i as f64 * h).collect();
                let vals: Vec<Option<f64>> = grid.par_iter().map(|&x| f(x)).collect();
                let (gs, gt): (Vec<f64>, Vec<f64>) =
                    grid.iter().zip(vals).filter_map(|(x, v)| v.map(|v| (*x, v))).unzip();
                if gs.len() < 3 {
                    break;
                }
                let br = brackets(&derivative_signs(&gs, &gt));
                let Some(&(l, r)) = br.first() else {
                    trace.push(format!("round {round}: sign change near {lo:.6} vanished"));
                    lo = f64::NAN;
                    break;
                };
                lo = l;
                hi = r;
                trace.push(format!("round {round}: bracket [{lo:.9}, {hi:.9}] width {:e}", hi - lo));
            }
        }
        if !lo.is_finite() {
            continue;
        }
        let mut loc = 0.5 * (lo + hi);
        // Parabolic vertex through the final bracket sharpens the estimate.
        if let Some(f) = resample {
            let hh = 0.5 * (hi - lo).max(h);
            if let (Some(a), Some(m), Some(b)) = (f(loc - hh), f(loc), f(loc + hh)) {
                let curv = a - 2.0 * m + b;
                if curv != 0.0 {
                    let shift = 0.5 * hh * (a - b) / curv;
                    if shift.abs() <= hh {
                        loc += shift;
                    }
                }
            }
        }
        locations.push(loc);
    }
    Ok(CriticalPeriods { count: locations.len(), locations, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{x2, y2, Poly};
    use crate::cycles::LoudParams;
    use crate::flow::VectorField;
    use std::f64::consts::PI;

    #[test]
    fn linear_centre_is_isochronous() {
        let vf = VectorField::planar(-y2(), x2());
        let grid: Vec<f64> = (1..=10).map(|i| 0.2 * i as f64).collect();
        let scan = period_scan(&vf, &Section::positive_x((0.1, 3.0)), &grid, &ReturnOptions::default());
        assert_eq!(scan.samples.len(), 10);
        assert!(scan.samples.iter().all(|s| (s.t - 2.0 * PI).abs() < 1e-9));
        let pts: Vec<(f64, f64)> = scan.samples.iter().map(|s| (s.r, s.t)).collect();
        assert_eq!(critical_periods(&pts, None).unwrap().count, 0);
    }

    #[test]
    fn homogeneous_cubic_centre_scaling() {
        // ẋ = −y³, ẏ = x³: T(s)·s² is constant and T decreases.
        let vf = VectorField::planar(-y2().pow(3), x2().pow(3));
        let grid: Vec<f64> = (1..=10).map(|i| 0.3 * i as f64).collect();
        let scan = period_scan(&vf, &Section::positive_x((0.1, 4.0)), &grid, &ReturnOptions::default());
        assert_eq!(scan.samples.len(), 10);
        let c0 = scan.samples[0].t * scan.samples[0].r.powi(2);
        for s in &scan.samples {
            assert!((s.t * s.r * s.r / c0 - 1.0).abs() < 1e-6);
        }
        let pts: Vec<(f64, f64)> = scan.samples.iter().map(|s| (s.r, s.t)).collect();
        assert_eq!(critical_periods(&pts, None).unwrap().count, 0);
    }

    #[test]
    fn isochronous_loud_centre() {
        let vf = LoudParams { d: -0.5, f: 0.5 }.field();
        let grid: Vec<f64> = (1..=9).map(|i| 0.1 * i as f64).collect();
        let scan = period_scan(&vf, &Section::positive_x((0.01, 0.99)), &grid, &ReturnOptions::default());
        assert_eq!(scan.samples.len(), 9);
        for s in &scan.samples {
            assert!((s.t - 2.0 * PI).abs() < 1e-6 * 2.0 * PI, "{s:?}");
        }
    }

    #[test]
    fn too_few_samples() {
        assert!(critical_periods(&[(0.0, 1.0); 5], None).is_err());
    }

    #[test]
    fn refinement_locates_a_minimum() {
        let f = |s: f64| Some((s - 0.37).powi(2) + 1.0);
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (0.1 * i as f64, f(0.1 * i as f64).unwrap())).collect();
        let cp = critical_periods(&pts, Some(&f)).unwrap();
        assert_eq!(cp.count, 1);
        assert!((cp.locations[0] - 0.37).abs() < 1e-6);
        let _ = Poly::zero(1);
    }
}
