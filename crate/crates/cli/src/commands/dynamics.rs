use planarlab_core::algebra::json::rational_from_json;
use planarlab_core::algebra::{format_q, parse_q, q_from_f64, Q};
use planarlab_core::builtins;
use planarlab_core::cycles::{
    critical_periods, find_cycles, melnikov_direct, melnikov_poly, period_scan, return_map, IrsCache, MelnikovSpec,
    ReturnOptions, Section, CLOSURE_TOL,
};
use planarlab_core::dulac::{certify_dulac, examples, DulacInstance};
use planarlab_core::flow::Field;
use planarlab_core::pwl::{crossing_cycles, PwlSystem};
use planarlab_core::scalar::{count_periodic, rigid_lyapunov, rigid_to_scalar, PeriodicScalarEq, RigidParams, TrigPoly};
use planarlab_core::stability::{polynomial_roots, trial_rng};
use planarlab_core::{Error, Result};
use rand::Rng;
use serde_json::json;

use super::{linspace, load_field, num, to_json};
use crate::args::{AbelArgs, CyclesArgs, DulacArgs, DulacExample, Global, MelnikovArgs, PeriodArgs, PwlArgs};
use crate::manifest::Session;
use crate::output::{Outcome, Table};

fn field_meta(vf: &planarlab_core::flow::VectorField) -> serde_json::Value {
    json!({ "name": vf.name, "degree": vf.degree(), "monomials": vf.monomial_count() })
}

pub fn cycles(a: &CyclesArgs, g: &Global, s: &mut Session) -> Result<Outcome> {
    let vf = load_field(&a.source, s)?;
    if vf.dim() != 2 {
        return Err(Error::domain("cycles needs a planar field"));
    }
    if a.windings == 0 || !(a.t_max > 0.0) {
        return Err(Error::domain("need windings ≥ 1 and a positive --t-max"));
    }
    let sec = Section::positive_x(a.range);
    let opts =
        ReturnOptions { tol: g.tol.unwrap_or(1e-11), t_max: a.t_max, windings: a.windings, ..Default::default() };
    let res = find_cycles(&vf, &sec, &linspace(a.range.0, a.range.1, a.grid)?, &opts);
    let rows = res.samples.iter().map(|r| vec![num(r.r), num(r.pi), num(r.t)]).collect::<Vec<_>>();
    Ok(Outcome::new(json!({
        "field": field_meta(&vf),
        "cycles": res.cycles,
        "continuum": res.continuum,
        "failures": res.failures,
    }))
    .table(Table::new("return_map", &["r", "pi", "t"], rows)))
}

pub fn period(a: &PeriodArgs, g: &Global, s: &mut Session) -> Result<Outcome> {
    let vf = load_field(&a.source, s)?;
    if vf.dim() != 2 {
        return Err(Error::domain("period needs a planar field"));
    }
    let sec = Section::positive_x(a.range);
    let opts = ReturnOptions { tol: g.tol.unwrap_or(1e-11), ..Default::default() };
    let scan = period_scan(&vf, &sec, &linspace(a.range.0, a.range.1, a.grid)?, &opts);
    let pts: Vec<(f64, f64)> = scan.samples.iter().map(|r| (r.r, r.t)).collect();
    let resample = |x: f64| -> Option<f64> {
        let o = ReturnOptions { strict_range: false, ..opts.clone() };
        return_map(&vf, &sec, x, &o).ok().filter(|r| (r.pi - r.r).abs() < CLOSURE_TOL).map(|r| r.t)
    };
    let crit = critical_periods(&pts, if a.refine { Some(&resample) } else { None })?;
    let rows = pts.iter().map(|(x, t)| vec![num(*x), num(*t)]).collect::<Vec<_>>();
    Ok(Outcome::new(json!({
        "field": field_meta(&vf),
        "closed_orbits": pts.len(),
        "excluded": scan.excluded,
        "critical_periods": crit,
    }))
    .table(Table::new("period", &["s", "t"], rows)))
}

/// Positive real zeros of Σ cⱼ uʲ.
fn positive_zeros(c: &[f64]) -> Result<Vec<f64>> {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    if c.len() < 2 {
        return Ok(vec![]);
    }
    let scale = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut z: Vec<f64> = polynomial_roots(&c)?
        .into_iter()
        .filter(|(re, im)| im.abs() <= 1e-9 * scale.max(1.0) && *re > 0.0)
        .map(|(re, _)| re)
        .collect();
    z.sort_by(f64::total_cmp);
    Ok(z)
}

pub fn melnikov(a: &MelnikovArgs, g: &Global) -> Result<Outcome> {
    let tol = g.tol.unwrap_or(1e-12);
    let spec = match (&a.builtin, &a.coeffs) {
        (Some(name), _) if name == "melnikov-two-cycles" => builtins::melnikov_two_cycles()?,
        (Some(name), _) => return Err(Error::Parse(format!("unknown builtin '{name}' (try melnikov-two-cycles)"))),
        (None, Some(c)) => MelnikovSpec::from_c(a.k, a.l, &c.0, 1e-13)?,
        (None, None) => return Err(Error::Parse("give --builtin or --coeffs".into())),
    };
    let cache = IrsCache::new(std::env::var_os("PLANARLAB_CACHE").map(Into::into));
    let m = melnikov_poly(&spec, &cache, tol);
    let zeros = positive_zeros(&m.c)?;
    let levels: Vec<f64> = zeros.iter().map(|u| m.level_of_rho2(*u)).collect();
    let mut checks = Vec::new();
    for &h in &a.levels.0 {
        let direct = melnikov_direct(&spec, h, tol)?;
        let formula = m.eval(h);
        checks.push(json!({"h": h, "formula": formula, "direct": direct, "relative_error": (formula / direct - 1.0).abs()}));
    }
    let radius = |h: f64| (2.0 * spec.l as f64 * h).powf(1.0 / (2 * spec.l) as f64);
    let simulated = match a.simulate {
        None => None,
        Some(eps) => {
            let vf = spec.perturbed_field(eps);
            let sec = Section::positive_x(a.section);
            let grid = linspace(a.section.0, a.section.1, 35)?;
            let res = find_cycles(&vf, &sec, &grid, &ReturnOptions { tol: tol.min(1e-11), ..Default::default() });
            Some(json!({"eps": eps, "cycles": res.cycles, "failures": res.failures}))
        }
    };
    if a.samples < 2 || !(a.h_range.0 > 0.0) {
        return Err(Error::domain("--h-range must be positive and --samples ≥ 2"));
    }
    let (l0, l1) = (a.h_range.0.ln(), a.h_range.1.ln());
    let rows = (0..a.samples)
        .map(|i| {
            let h = (l0 + (l1 - l0) * i as f64 / (a.samples - 1) as f64).exp();
            vec![num(h), num(m.eval(h))]
        })
        .collect::<Vec<_>>();
    Ok(Outcome::new(json!({
        "spec": spec,
        "n": spec.n(),
        "m": spec.m(),
        "cycle_bound": (spec.n() + spec.m()) / 2,
        "c": m.c,
        "zeros_rho2": zeros,
        "zero_levels": levels,
        "zero_radii": levels.iter().map(|h| radius(*h)).collect::<Vec<_>>(),
        "direct_checks": checks,
        "simulation": simulated,
    }))
    .table(Table::new("melnikov", &["h", "m"], rows)))
}

fn random_trig(rng: &mut impl Rng, harmonics: u32) -> Result<TrigPoly> {
    let mut terms = Vec::new();
    for k in 0..=harmonics {
        let c = q_from_f64(rng.random_range(-1.0..=1.0))?;
        let s = if k == 0 { Q::from_integer(0.into()) } else { q_from_f64(rng.random_range(-1.0..=1.0))? };
        terms.push((k, c, s));
    }
    Ok(TrigPoly::from_terms(terms))
}

pub fn abel(a: &AbelArgs, g: &Global, s: &mut Session) -> Result<Outcome> {
    let mut extra = json!({});
    let eq = match (&a.spec, a.random, &a.rigid) {
        (Some(p), _, _) => PeriodicScalarEq::from_json(&s.read_json(p)?)?,
        (None, Some(k), _) => {
            let mut rng = trial_rng(g.seed, 0);
            let a3 = if a.a3_one { TrigPoly::constant(Q::from_integer(1.into())) } else { random_trig(&mut rng, k)? };
            let (a2, a1, a0) = (random_trig(&mut rng, k)?, random_trig(&mut rng, k)?, random_trig(&mut rng, k)?);
            PeriodicScalarEq::abel(a3, a2, a1, a0)
        }
        (None, None, Some(p)) => {
            let [pa, pb, pc, pd, pe, pf] = p.0[..] else {
                return Err(Error::Parse("--rigid needs six coefficients a,b,c,d,e,f".into()));
            };
            let rp = RigidParams { a: pa, b: pb, c: pc, d: pd, e: pe, f: pf };
            let (v1, v3, v5) = rigid_lyapunov(&rp);
            extra = json!({"rigid": rp, "lyapunov": [v1, v3, v5]});
            rigid_to_scalar(&rp.to_poly()?)?
        }
        (None, None, None) => return Err(Error::Parse("give --spec FILE, --random K or --rigid a,b,c,d,e,f".into())),
    };
    let res = count_periodic(&eq, a.range, &linspace(a.range.0, a.range.1, a.grid)?)?;
    let rows = res.samples.iter().map(|(r, p)| vec![num(*r), num(*p)]).collect::<Vec<_>>();
    Ok(Outcome::new(json!({
        "equation": eq.to_json(),
        "extra": extra,
        "solutions": res.solutions,
        "count": res.solutions.len(),
        "continuum": res.continuum,
        "blowups": res.blowups,
        "failures": res.failures,
    }))
    .table(Table::new("abel", &["rho", "phi"], rows)))
}

fn load_dulac(v: &serde_json::Value) -> Result<DulacInstance> {
    let get = |k: &str| v.get(k).ok_or_else(|| Error::Parse(format!("Dulac spec needs '{k}'")));
    let s = match get("s")? {
        serde_json::Value::String(t) => parse_q(t)?,
        serde_json::Value::Number(n) => parse_q(&n.to_string())?,
        _ => return Err(Error::Parse("'s' must be a rational".into())),
    };
    Ok(DulacInstance::new_rational(rational_from_json(get("v")?)?, rational_from_json(get("p")?)?, rational_from_json(get("q")?)?, s))
}

pub fn dulac(a: &DulacArgs, s: &mut Session) -> Result<Outcome> {
    let inst = match (&a.example, &a.spec) {
        (Some(DulacExample::Polynomial), _) => examples::polynomial_lienard(&parse_q(&a.c)?),
        (Some(DulacExample::Rational), _) => examples::rational_lienard(&parse_q(&a.c)?),
        (None, Some(p)) => load_dulac(&s.read_json(p)?)?,
        (None, None) => return Err(Error::Parse("give --example or --spec FILE".into())),
    };
    let [x0, x1, y0, y1] = a.bounds.0[..] else {
        return Err(Error::Parse("--bounds needs xmin,xmax,ymin,ymax".into()));
    };
    if !(x0 < x1 && y0 < y1) {
        return Err(Error::domain("empty certification box"));
    }
    let report = certify_dulac(&inst, &[(x0, x1), (y0, y1)], a.depth);
    Ok(Outcome::new(json!({ "s": format_q(&inst.s), "report": to_json(&report) })))
}

pub fn pwl(a: &PwlArgs, s: &mut Session) -> Result<Outcome> {
    let sys = match (&a.builtin, &a.system) {
        (Some(name), _) => builtins::pwl(name)?,
        (None, Some(p)) => PwlSystem::from_json(&s.read_json(p)?)?,
        (None, None) => return Err(Error::Parse("give --builtin NAME or --system FILE".into())),
    };
    let res = crossing_cycles(&sys, a.range, &linspace(a.range.0, a.range.1, a.grid)?)?;
    let rows = res.samples.iter().map(|(x, p)| vec![num(*x), num(*p)]).collect::<Vec<_>>();
    Ok(Outcome::new(json!({
        "system": sys.to_json(),
        "cycles": res.cycles,
        "count": res.cycles.len(),
        "continuum": res.continuum,
        "failures": res.failures,
    }))
    .table(Table::new("crossing_map", &["x", "pi"], rows)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeros_of_two_cycle_target() {
        let z = positive_zeros(&[4.0, -5.0, 1.0]).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z[0] - 1.0).abs() < 1e-12 && (z[1] - 4.0).abs() < 1e-12);
        assert!(positive_zeros(&[1.0, 0.0, 1.0]).unwrap().is_empty());
        assert!(positive_zeros(&[3.0, 0.0]).unwrap().is_empty());
    }

    #[test]
    fn dulac_spec_requires_all_parts() {
        assert!(load_dulac(&json!({"p": {"vars": ["x"], "terms": []}})).is_err());
    }
}
