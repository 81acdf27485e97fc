use planarlab_core::algebra::{casas_alvero, descartes_bound, format_q, loewner_field, moments as exact_moments, CasasVerdict};
use planarlab_core::builtins;
use planarlab_core::flow::{field_index, VectorField};
use planarlab_core::geometry::{billiard_trajectory, conjugacy_diagnostic, fagnano_orbit, rotation_number, PonceletConfig, Triangle};
use planarlab_core::interval::{census_positive, IBox};
use planarlab_core::seq::{
    difference_periodicity, parse_biguint, persistence, persistence_chain, persistence_records, reverse_add_steps,
    singmaster_count, DifferenceEquation,
};
use planarlab_core::verify::{run_all, run_criterion, VerifyOptions, CRITERIA};
use planarlab_core::{Error, Result};
use serde_json::json;

use super::{load_poly, num, to_json};
use crate::args::{FewnomialCmd, FloatList, GeometryCmd, Global, LoewnerArgs, MomentsArgs, SeqCmd, VerifyArgs};
use crate::manifest::Session;
use crate::output::{Outcome, Table};

pub fn fewnomial(c: &FewnomialCmd, s: &mut Session) -> Result<Outcome> {
    match c {
        FewnomialCmd::Census { system, builtin, depth, bounds } => {
            let sys = match (system, builtin) {
                (Some(p), _) => builtins::system_from_json(&s.read_json(p)?)?,
                (None, Some(name)) => builtins::system(name)?,
                (None, None) => return Err(Error::Parse("give --system FILE or --builtin NAME".into())),
            };
            if !(bounds.0 > 0.0) {
                return Err(Error::domain("the census box must lie in the positive orthant"));
            }
            let dom = IBox::from_bounds(&vec![*bounds; sys.len()]);
            let census = census_positive(&sys, &dom, *depth);
            let rows = census
                .boxes
                .iter()
                .filter_map(|b| b.point.as_ref())
                .map(|p| p.iter().map(|x| num(*x)).collect::<Vec<_>>())
                .collect::<Vec<_>>();
            let header: Vec<String> = (0..sys.len()).map(|i| format!("x{i}")).collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            Ok(Outcome::new(json!({
                "count": census.count,
                "unresolved": census.unresolved.len(),
                "depth": depth,
                "boxes": census.boxes,
                "unresolved_boxes": census.unresolved,
            }))
            .table(Table::new("roots", &header, rows)))
        }
        FewnomialCmd::Descartes { poly } => {
            let p = load_poly(poly, s)?;
            Ok(Outcome::new(json!({ "terms": p.nterms(), "descartes_bound": descartes_bound(&p)? })))
        }
        FewnomialCmd::Casas { poly, modulus } => {
            let p = load_poly(poly, s)?;
            let v = match casas_alvero(&p, *modulus)? {
                CasasVerdict::Shares(g) => json!({ "verdict": "shares", "gcds": g }),
                CasasVerdict::FailsAt(k) => json!({ "verdict": "fails-at", "k": k }),
            };
            Ok(Outcome::new(json!({ "modulus": modulus, "result": v })))
        }
    }
}

fn points<const N: usize>(v: &FloatList, what: &str) -> Result<[f64; N]> {
    v.0.as_slice().try_into().map_err(|_| Error::Parse(format!("{what} needs {N} numbers")))
}

fn triangle(v: &FloatList) -> Result<Triangle> {
    let [ax, ay, bx, by, cx, cy] = points::<6>(v, "--triangle")?;
    Triangle::new([ax, ay], [bx, by], [cx, cy])
}

pub fn geometry(c: &GeometryCmd) -> Result<Outcome> {
    match c {
        GeometryCmd::Fagnano { triangle: t } => {
            let orb = fagnano_orbit(&triangle(t)?)?;
            let csv = orb.run.to_csv();
            Ok(Outcome::new(to_json(&orb)).table(Table::raw("polyline", csv)))
        }
        GeometryCmd::Billiard { triangle: t, start, direction, bounces } => {
            let run = billiard_trajectory(&triangle(t)?, points::<2>(start, "--start")?, points::<2>(direction, "--direction")?, *bounces)?;
            let csv = run.to_csv();
            let mut v = to_json(&run);
            v["reflection_residual"] = json!(run.reflection_residual());
            Ok(Outcome::new(v).table(Table::raw("polyline", csv)))
        }
        GeometryCmd::Rotation { n, m, inner_scale, angle, iterations } => {
            let cfg = PonceletConfig::scaled(*n, *m, *inner_scale)?;
            let r = rotation_number(&cfg, cfg.outer_point(*angle), *iterations)?;
            Ok(Outcome::new(to_json(&r)))
        }
        GeometryCmd::Conjugacy { n, m, inner_scale, samples, iterations } => {
            let cfg = PonceletConfig::scaled(*n, *m, *inner_scale)?;
            // From angle 0, so multiples of 8 samples hit every symmetry axis.
            let angles: Vec<f64> = (0..*samples).map(|i| std::f64::consts::TAU * i as f64 / *samples as f64).collect();
            Ok(Outcome::new(to_json(&conjugacy_diagnostic(&cfg, &angles, *iterations)?)))
        }
    }
}

pub fn seq(c: &SeqCmd, g: &Global, s: &mut Session) -> Result<Outcome> {
    match c {
        SeqCmd::Persistence { n: Some(n), base, .. } => {
            let n = parse_biguint(n)?;
            let chain: Vec<String> = persistence_chain(&n, *base)?.iter().map(|x| x.to_str_radix(*base)).collect();
            Ok(Outcome::new(json!({ "n": n.to_string(), "base": base, "persistence": persistence(&n, *base)?, "chain": chain })))
        }
        SeqCmd::Persistence { n: None, records, limit, .. } => {
            let k = records.ok_or_else(|| Error::Parse("give --n or --records".into()))?;
            let rec = persistence_records(k, *limit);
            let rows = rec.iter().map(|(p, n)| vec![p.to_string(), n.map(|x| x.to_string()).unwrap_or_default()]);
            let v: Vec<_> = rec.iter().map(|(p, n)| json!({ "persistence": p, "smallest_n": n })).collect();
            Ok(Outcome::new(json!({ "limit": limit, "records": v })).table(Table::new("records", &["persistence", "n"], rows)))
        }
        SeqCmd::Lychrel { n, base, cap } => {
            let r = reverse_add_steps(&parse_biguint(n)?, *base, *cap)?;
            let mut v = to_json(&r);
            v["n"] = json!(n);
            v["base"] = json!(base);
            Ok(Outcome::new(v))
        }
        SeqCmd::Singmaster { n } => {
            let count = singmaster_count(&parse_biguint(n)?)?;
            Ok(Outcome::new(json!({ "n": n, "count": count })))
        }
        SeqCmd::Diffeq { spec, builtin, unfold, trials, horizon, max_bits } => {
            let mut eq = match (spec, builtin.as_deref()) {
                (Some(p), _) => DifferenceEquation::from_json(&s.read_json(p)?)?,
                (None, Some("lyness")) => DifferenceEquation::lyness(),
                (None, Some("todd")) => DifferenceEquation::todd(),
                (None, Some("ratio")) => DifferenceEquation::ratio(),
                (None, Some(other)) => return Err(Error::Parse(format!("unknown builtin '{other}' (lyness, todd, ratio)"))),
                (None, None) => return Err(Error::Parse("give --spec FILE or --builtin NAME".into())),
            };
            if let Some(l) = unfold {
                eq = eq.unfold(*l);
            }
            let r = difference_periodicity(&eq, *trials, *horizon, g.seed, *max_bits)?;
            Ok(Outcome::new(json!({ "equation": eq.to_json(), "report": r })))
        }
    }
}

pub fn moments(a: &MomentsArgs, s: &mut Session) -> Result<Outcome> {
    let f = load_poly(&a.poly, s)?;
    let m = exact_moments(&f, a.m_max, a.cap)?;
    let rows = m.iter().enumerate().map(|(i, v)| vec![(i + 1).to_string(), format_q(v)]);
    let vals: Vec<String> = m.iter().map(format_q).collect();
    Ok(Outcome::new(json!({ "m_max": a.m_max, "moments": vals })).table(Table::new("moments", &["m", "moment"], rows)))
}

pub fn loewner(a: &LoewnerArgs, s: &mut Session) -> Result<Outcome> {
    let f = load_poly(&a.poly, s)?;
    let lf = loewner_field(&f, a.n)?;
    let index = if lf.degenerate {
        None
    } else {
        Some(field_index(&VectorField::planar(lf.p.clone(), lf.q.clone()), [0.0, 0.0], a.radius)?)
    };
    use planarlab_core::algebra::json::poly_to_json;
    Ok(Outcome::new(json!({
        "n": lf.n,
        "p": poly_to_json(&lf.p),
        "q": poly_to_json(&lf.q),
        "degenerate": lf.degenerate,
        "index": index,
        "radius": a.radius,
    })))
}

pub fn verify(a: &VerifyArgs, g: &Global) -> Result<Outcome> {
    let opts = VerifyOptions { seed: g.seed, workers: g.workers };
    let results = if a.criterion.is_empty() {
        run_all(&opts)
    } else {
        a.criterion
            .iter()
            .map(|id| {
                run_criterion(*id, &opts).ok_or_else(|| {
                    Error::Parse(format!("no criterion {id}; valid ids are 1..={}", CRITERIA.len()))
                })
            })
            .collect::<Result<_>>()?
    };
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    let text: String = results.iter().map(|r| r.line() + "\n").collect::<String>()
        + &format!("{} of {} criteria passed\n", results.len() - failed.len(), results.len());
    // Wall-clock time stays out of the summary so reruns compare equal.
    let summary: Vec<_> = results
        .iter()
        .map(|r| json!({ "id": r.id, "topic": r.topic, "passed": r.passed, "within_budget": r.within_budget, "checks": r.checks }))
        .collect();
    let rows = results.iter().map(|r| vec![r.id.to_string(), format!("{:.3}", r.seconds), r.budget_seconds.to_string()]);
    let mut o = Outcome::new(json!({ "seed": g.seed, "passed": failed.is_empty(), "criteria": summary }))
        .table(Table::new("timings", &["criterion", "seconds", "budget_seconds"], rows));
    o.text = Some(text);
    if !failed.is_empty() {
        o.exit_code = 1;
        o.failure = Some(format!("criteria failed: {failed:?}"));
    }
    Ok(o)
}
