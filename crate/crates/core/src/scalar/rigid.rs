use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use num_traits::Zero;

use super::{PeriodicScalarEq, Period, TrigPoly};
use crate::algebra::{q_from_f64, q_to_f64, qi, Poly};
use crate::error::{Error, Result};
use crate::flow::VectorField;

/// F = a + bx + cy + dx² + exy + fy² of the cubic rigid system
/// ẋ = −y + xF, ẏ = x + yF.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RigidParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl RigidParams {
    pub fn to_poly(&self) -> Result<Poly> {
        let cs = [self.a, self.b, self.c, self.d, self.e, self.f];
        let exps = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];
        let mut terms = Vec::new();
        for (v, e) in cs.iter().zip(exps) {
            terms.push((e.to_vec(), q_from_f64(*v)?));
        }
        Ok(Poly::from_terms(2, terms))
    }

    pub fn field(&self) -> Result<VectorField> {
        Ok(crate::cycles::rigid_field(&self.to_poly()?))
    }

    /// Δ = e² − 4df
    pub fn discriminant(&self) -> f64 {
        self.e * self.e - 4.0 * self.d * self.f
    }
}

/// Polar reduction r′ = Σ_j F_j(cos θ, sin θ) r^{j+1}, F_j the homogeneous
/// parts of F, expanded exactly.
pub fn rigid_to_scalar(f: &Poly) -> Result<PeriodicScalarEq> {
    if f.nvars() != 2 {
        return Err(Error::domain("rigid reduction needs F(x, y)"));
    }
    let (cos, sin) = (TrigPoly::cos(1), TrigPoly::sin(1));
    let mut terms = Vec::new();
    for j in 0..=f.degree().unwrap_or(0) {
        let part = f.homogeneous_part(j);
        let mut a = TrigPoly::zero();
        for (m, c) in part.terms() {
            let e = m.exps();
            a = a.add(&cos.pow(e[0]).mul(&sin.pow(e[1])).scale(c));
        }
        terms.push((j + 1, a));
    }
    Ok(PeriodicScalarEq::new(terms, Period::two_pi()))
}

/// (V₁, V₃, V₅) = (e^{2πa} − 1, π(d+f), π((c² − b²)d − bce)/2).
pub fn rigid_lyapunov(p: &RigidParams) -> (f64, f64, f64) {
    let RigidParams { a, b, c, d, e, f } = *p;
    ((2.0 * PI * a).exp() - 1.0, PI * (d + f), PI * ((c * c - b * b) * d - b * c * e) / 2.0)
}

/// First nonvanishing coefficient of ρ ↦ φ(2π; ρ) − ρ for r′ = F₁r² + F₂r³,
/// by exact term-by-term expansion r = Σ u_j(θ) ρ^j.
pub fn displacement_series(f1: &TrigPoly, f2: &TrigPoly, max_order: usize) -> Option<(usize, f64)> {
    let mut u: Vec<TrigPoly> = vec![TrigPoly::zero(), TrigPoly::constant(qi(1))];
    for j in 2..=max_order {
        let mut du = TrigPoly::zero();
        for i in 1..j {
            du = du.add(&u[i].mul(&u[j - i]).mul(f1));
        }
        for i in 1..j {
            for k in 1..j - i {
                let l = j - i - k;
                if l >= 1 {
                    du = du.add(&u[i].mul(&u[k]).mul(&u[l]).mul(f2));
                }
            }
        }
        if !du.mean().is_zero() {
            return Some((j, 2.0 * PI * q_to_f64(&du.mean())));
        }
        u.push(du.antiderivative().ok()?);
    }
    None
}
