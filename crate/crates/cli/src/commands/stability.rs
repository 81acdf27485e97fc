use planarlab_core::builtins;
use planarlab_core::flow::{classify_equilibria, Field};
use planarlab_core::stability::{
    jury, lasalle_check, mc_probability, my_verify, poly_jacobian, polynomial_roots, routh_hurwitz, scaled_rotation,
    EquationKind, LaSalleCondition,
};
use planarlab_core::{Error, Result};
use serde_json::json;

use super::{load_field, to_json};
use crate::args::{Global, StabilityCmd};
use crate::manifest::Session;
use crate::output::Outcome;

/// Known exact values of the stability probability, for z-scores.
fn reference(order: usize, kind: EquationKind) -> Option<f64> {
    match (kind, order) {
        (EquationKind::Differential, 1) => Some(0.5),
        (EquationKind::Differential, 2) => Some(0.25),
        (EquationKind::Differential, 3) => Some(1.0 / 16.0),
        (EquationKind::Difference, 2) => Some(2f64.sqrt().atan() / std::f64::consts::PI),
        _ => None,
    }
}

fn criterion(coeffs: &[f64], test: fn(&[f64]) -> Result<bool>) -> Result<Outcome> {
    let stable = test(coeffs)?;
    let roots = polynomial_roots(coeffs)?;
    Ok(Outcome::new(json!({ "coeffs": coeffs, "stable": stable, "roots": roots })))
}

pub fn run(c: &StabilityCmd, g: &Global, s: &mut Session) -> Result<Outcome> {
    match c {
        StabilityCmd::Mc { order, kind, trials } => {
            let kind: EquationKind = kind.parse()?;
            let batch = mc_probability(*order, kind, *trials, g.seed, g.workers)?;
            let mut v = to_json(&batch);
            if let Some(p) = reference(*order, kind) {
                v["reference"] = json!(p);
                v["z_score"] = json!((batch.estimate - p) / batch.stderr.max(f64::MIN_POSITIVE));
            }
            Ok(Outcome::new(v))
        }
        StabilityCmd::Routh { coeffs } => criterion(&coeffs.0, routh_hurwitz),
        StabilityCmd::Jury { coeffs } => criterion(&coeffs.0, jury),
        StabilityCmd::My { n, points, t_max } => Ok(Outcome::new(to_json(&my_verify(*n, *points, *t_max, g.seed)?))),
        StabilityCmd::Lasalle { map, rotation, condition, bounds, samples } => {
            let polys = match (map, rotation) {
                (Some(p), _) => builtins::system_from_json(&s.read_json(p)?)?,
                (None, Some(r)) => match r.0[..] {
                    [sc, th] => scaled_rotation(sc, th)?,
                    _ => return Err(Error::Parse("--rotation needs S,THETA".into())),
                },
                (None, None) => return Err(Error::Parse("give --map FILE or --rotation S,THETA".into())),
            };
            let cond = match condition.as_str() {
                "c1" | "C1" => LaSalleCondition::C1,
                "c2" | "C2" => LaSalleCondition::C2,
                other => return Err(Error::Parse(format!("unknown condition '{other}' (c1 or c2)"))),
            };
            let jac = poly_jacobian(&polys);
            let b = vec![*bounds; polys.len()];
            Ok(Outcome::new(to_json(&lasalle_check(&jac, cond, &b, *samples, g.seed)?)))
        }
        StabilityCmd::Equilibria { source, bounds, grid } => {
            let vf = load_field(source, s)?;
            if vf.dim() != 2 {
                return Err(Error::domain("equilibria needs a planar field"));
            }
            let eq = classify_equilibria(&vf, [*bounds, *bounds], *grid)?;
            let mut kinds = std::collections::BTreeMap::<String, usize>::new();
            for e in &eq {
                *kinds.entry(to_json(&e.kind).as_str().unwrap_or("other").to_string()).or_default() += 1;
            }
            Ok(Outcome::new(json!({ "count": eq.len(), "by_kind": kinds, "equilibria": eq })))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn references_only_for_closed_forms() {
        assert_eq!(reference(2, EquationKind::Differential), Some(0.25));
        assert!(reference(4, EquationKind::Differential).is_none());
        assert!((reference(2, EquationKind::Difference).unwrap() - 0.30409).abs() < 1e-4);
    }

    #[test]
    fn zero_leading_coefficient_is_bad_input() {
        assert_eq!(criterion(&[1.0, 0.0], routh_hurwitz).err().unwrap().exit_code(), 2);
    }
}
