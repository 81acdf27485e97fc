use serde::Serialize;

use crate::algebra::{q_from_f64, GaussPoly, GaussQ, Poly, Q};
use crate::flow::VectorField;

/// Parameters of ẋ = −y + xy, ẏ = x + Dx² + Fy².
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LoudParams {
    pub d: f64,
    pub f: f64,
}

/// Loud parameters whose period function matches that of
/// ż = iz + (zz̄)ⁿ z^{k+1}: D = −k/(2(k+n)), F = 1 + D.
pub fn equivariant_to_loud(n: u32, k: u32) -> LoudParams {
    assert!(k >= 1, "k must be positive");
    let d = -(k as f64) / (2.0 * (k + n) as f64);
    LoudParams { d, f: 1.0 + d }
}

fn exact(v: f64) -> Q {
    q_from_f64(v).expect("finite parameter")
}

pub fn loud_field(d: &Q, f: &Q) -> VectorField {
    let x = Poly::var(0, 2);
    let y = Poly::var(1, 2);
    let p = &(&x * &y) - &y;
    let q = &(&x + &(&x * &x).scale(d)) + &(&y * &y).scale(f);
    VectorField::planar(p, q).with_name("loud")
}

impl LoudParams {
    pub fn field(&self) -> VectorField {
        loud_field(&exact(self.d), &exact(self.f))
    }
}

/// Rigid system ẋ = −y + xF, ẏ = x + yF.
pub fn rigid_field(f: &Poly) -> VectorField {
    let f = f.extend_vars(2);
    let x = Poly::var(0, 2);
    let y = Poly::var(1, 2);
    VectorField::planar(&(&x * &f) - &y, &(&y * &f) + &x).with_name("rigid")
}

/// Real form of ż = iz + (zz̄)ⁿ z^{k+1}.
pub fn equivariant_field(n: u32, k: u32) -> VectorField {
    let x = GaussPoly::var(0, 2);
    let iy = GaussPoly::var(1, 2).scale(&GaussQ::i());
    let z = &x + &iy;
    let zb = &x - &iy;
    let rhs = &z.scale(&GaussQ::i()) + &(&(&z * &zb).pow(n) * &z.pow(k + 1));
    VectorField::planar(rhs.re(), rhs.im()).with_name("equivariant")
}
