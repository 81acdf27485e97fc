mod dynamics;
mod misc;
mod stability;

use std::path::Path;

use planarlab_core::builtins;
use planarlab_core::flow::VectorField;
use planarlab_core::{Error, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::{Command, FieldSource, Global};
use crate::manifest::Session;
use crate::output::Outcome;

pub fn dispatch(cmd: &Command, g: &Global, s: &mut Session) -> Result<Outcome> {
    if let Some(t) = g.tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::domain("--tol must lie in (0, 1)"));
        }
    }
    match cmd {
        Command::Cycles(a) => dynamics::cycles(a, g, s),
        Command::Melnikov(a) => dynamics::melnikov(a, g),
        Command::Abel(a) => dynamics::abel(a, g, s),
        Command::Dulac(a) => dynamics::dulac(a, s),
        Command::Period(a) => dynamics::period(a, g, s),
        Command::Pwl(a) => dynamics::pwl(a, s),
        Command::Stability(c) => stability::run(c, g, s),
        Command::Fewnomial(c) => misc::fewnomial(c, s),
        Command::Geometry(c) => misc::geometry(c),
        Command::Seq(c) => misc::seq(c, g, s),
        Command::Moments(a) => misc::moments(a, s),
        Command::Loewner(a) => misc::loewner(a, s),
        Command::VerifyPaper(a) => misc::verify(a, g),
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn load_field(src: &FieldSource, s: &mut Session) -> Result<VectorField> {
    match (&src.builtin, &src.field) {
        (Some(name), _) => builtins::field(name),
        (None, Some(path)) => VectorField::from_json(&s.read_json(path)?),
        (None, None) => Err(Error::Parse("give --builtin NAME or --field FILE".into())),
    }
}

fn load_poly(path: &Path, s: &mut Session) -> Result<planarlab_core::algebra::Poly> {
    Ok(planarlab_core::algebra::json::poly_from_json(&s.read_json(path)?)?.1)
}

/// `n` evenly spaced points from `a` to `b` inclusive.
fn linspace(a: f64, b: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::domain("grid needs at least two points"));
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.5, 2.0, 4).unwrap();
        assert_eq!(g, vec![0.5, 1.0, 1.5, 2.0]);
        assert!(linspace(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn field_source_needs_one_input() {
        let mut s = Session::new(None).unwrap();
        let e = load_field(&FieldSource { builtin: None, field: None }, &mut s).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
