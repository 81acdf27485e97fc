use nalgebra::DMatrix;
use serde::Serialize;

use super::{certify_sign, eval_box, IBox, Interval};
use crate::algebra::Poly;

/// Depth used when certifying signs on box faces.
const FACE_DEPTH: u32 = 18;

/// Component `perm[i]`, multiplied by `signs[i]`, is negative on the lower
/// face of coordinate `i` and positive on the upper one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignAssignment {
    pub perm: Vec<usize>,
    pub signs: Vec<i32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Miranda {
    Certified(SignAssignment),
    /// One line per (component, face) with the sign that could be proven.
    Inconclusive(Vec<String>),
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// Poincaré–Miranda existence test with a search over component
/// permutations and sign flips (n ≤ 3).
pub fn poincare_miranda(sys: &[Poly], b: &IBox) -> Miranda {
    let n = sys.len();
    if n != b.dim() || n == 0 || n > 3 {
        return Miranda::Inconclusive(vec![format!(
            "system of {n} components on a {}-dimensional box is not supported",
            b.dim()
        )]);
    }
    // face_sign[j][i][side]
    let face_sign: Vec<Vec<[i32; 2]>> = sys
        .iter()
        .map(|f| {
            (0..n)
                .map(|i| {
                    [
                        certify_sign(f, &b.face(i, false), FACE_DEPTH).as_i32(),
                        certify_sign(f, &b.face(i, true), FACE_DEPTH).as_i32(),
                    ]
                })
                .collect()
        })
        .collect();
    for perm in permutations(n) {
        let mut signs = Vec::with_capacity(n);
        for (i, &j) in perm.iter().enumerate() {
            let [lo, hi] = face_sign[j][i];
            if lo != 0 && hi == -lo {
                signs.push(hi);
            } else {
                break;
            }
        }
        if signs.len() == n {
            return Miranda::Certified(SignAssignment { perm, signs });
        }
    }
    let mut report = Vec::new();
    for (j, fs) in face_sign.iter().enumerate() {
        for (i, s) in fs.iter().enumerate() {
            report.push(format!("f{j} on x{i}=lo: {}, x{i}=hi: {}", sign_word(s[0]), sign_word(s[1])));
        }
    }
    Miranda::Inconclusive(report)
}

fn sign_word(s: i32) -> &'static str {
    match s {
        1 => "positive",
        -1 => "negative",
        _ => "unknown",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Krawczyk {
    UniqueRoot { root_box: IBox, point: Vec<f64> },
    Inconclusive(String),
}

pub(crate) struct Compiled {
    pub sys: Vec<Poly>,
    pub jac: Vec<Vec<Poly>>,
}

impl Compiled {
    pub fn new(sys: &[Poly]) -> Self {
        let n = sys.len();
        let sys: Vec<Poly> = sys.iter().map(|p| p.extend_vars(n)).collect();
        let jac = sys.iter().map(|f| (0..n).map(|j| f.derivative(j)).collect()).collect();
        Compiled { sys, jac }
    }

    fn n(&self) -> usize {
        self.sys.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.sys.iter().map(|f| f.eval_f64(x)).collect()
    }

    fn jac_f64(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.n();
        DMatrix::from_fn(n, n, |i, j| self.jac[i][j].eval_f64(x))
    }

    pub(crate) fn inverse_at(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let j = self.jac_f64(x);
        let inv = j.clone().try_inverse()?;
        let cond = j.norm() * inv.norm();
        (cond.is_finite() && cond < 1e12).then_some(inv)
    }

    /// Plain Newton iteration; `None` if it diverges or leaves `bound`.
    pub fn newton(&self, x0: &[f64], bound: Option<&IBox>) -> Option<Vec<f64>> {
        let mut x = x0.to_vec();
        for _ in 0..60 {
            let y = self.inverse_at(&x)?;
            let f = nalgebra::DVector::from_vec(self.eval(&x));
            let dx = &y * f;
            for (xi, d) in x.iter_mut().zip(dx.iter()) {
                *xi -= d;
            }
            if x.iter().any(|v| !v.is_finite()) {
                return None;
            }
            if let Some(b) = bound {
                if !b.contains(&x) {
                    return None;
                }
            }
            let scale = x.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            if dx.amax() <= 1e-15 * scale {
                break;
            }
        }
        let res = self.eval(&x).iter().fold(0.0f64, |a, v| a.max(v.abs()));
        (res < 1e-9).then_some(x)
    }

    /// Natural extension intersected with the mean-value form
    /// `f(m) + J(X)(X - m)`.
    pub fn enclose(&self, i: usize, b: &IBox) -> Interval {
        let nat = eval_box(&self.sys[i], b);
        let m = b.mid();
        let mbox = IBox(m.iter().map(|&v| Interval::point(v)).collect());
        let mut mv = eval_box(&self.sys[i], &mbox);
        for (j, d) in self.jac[i].iter().enumerate() {
            mv = mv + eval_box(d, b) * (b.0[j] - Interval::point(m[j]));
        }
        nat.intersect(&mv).unwrap_or(nat)
    }

    /// Some component provably has no zero in `b`.
    pub fn excludes(&self, b: &IBox) -> bool {
        (0..self.n()).any(|i| !self.enclose(i, b).contains_zero())
    }

    /// One Krawczyk image `K(X)`; `None` when the midpoint Jacobian is singular.
    fn image(&self, b: &IBox) -> Option<IBox> {
        let n = self.n();
        let m = b.mid();
        let y = self.inverse_at(&m)?;
        let mbox = IBox(m.iter().map(|&v| Interval::point(v)).collect());
        let fm: Vec<Interval> = self.sys.iter().map(|f| eval_box(f, &mbox)).collect();
        let jx: Vec<Vec<Interval>> = self
            .jac
            .iter()
            .map(|row| row.iter().map(|d| eval_box(d, b)).collect())
            .collect();
        let dx: Vec<Interval> = (0..n).map(|j| b.0[j] - Interval::point(m[j])).collect();
        let mut k = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = Interval::point(m[i]);
            for j in 0..n {
                acc = acc - Interval::point(y[(i, j)]) * fm[j];
            }
            for j in 0..n {
                // (I - Y J(X))_{ij}
                let mut c = Interval::point(if i == j { 1.0 } else { 0.0 });
                for l in 0..n {
                    c = c - Interval::point(y[(i, l)]) * jx[l][j];
                }
                acc = acc + c * dx[j];
            }
            k.push(acc);
        }
        Some(IBox(k))
    }

    pub fn krawczyk(&self, b: &IBox) -> Krawczyk {
        let Some(k) = self.image(b) else {
            return Krawczyk::Inconclusive("singular midpoint Jacobian".into());
        };
        if !k.interior_of(b) {
            return Krawczyk::Inconclusive("Krawczyk image not interior to the box".into());
        }
        let fallback = k.clone();
        let point = self.newton(&b.mid(), Some(b)).unwrap_or_else(|| k.mid());
        // Tight verified box around the Newton point.
        let scale = point.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for r in [1e-12, 1e-11, 1e-10, 4e-10] {
            let t = IBox(point.iter().map(|&v| Interval::new(v - r * scale, v + r * scale)).collect());
            if let Some(kt) = self.image(&t) {
                if kt.interior_of(&t) {
                    return Krawczyk::UniqueRoot { root_box: kt, point };
                }
            }
        }
        // Otherwise contract by iterating X ← K(X) ∩ X.
        let mut x = fallback;
        for _ in 0..80 {
            if x.max_width() <= 1e-9 {
                break;
            }
            match self.image(&x).and_then(|k| k.intersect(&x)) {
                Some(nx) if nx.max_width() < x.max_width() => x = nx,
                _ => break,
            }
        }
        Krawczyk::UniqueRoot { root_box: x, point }
    }
}

/// Subdivision depth used when the Krawczyk test fails on the whole box.
const UNIQUE_DEPTH: u32 = 48;

/// Existence and uniqueness of a root of a square system in `b` via the
/// Krawczyk operator, followed by Newton polishing to a box of width ≤ 1e-9.
///
/// When the operator does not contract on `b` itself (e.g. near-singular
/// Jacobians), `b` is subdivided: uniqueness holds if every leaf is either
/// excluded by interval evaluation or Krawczyk-verified, and all verified
/// leaves enclose the same root.
pub fn krawczyk_unique(sys: &[Poly], b: &IBox) -> Krawczyk {
    if sys.len() != b.dim() || sys.is_empty() || sys.len() > 3 {
        return Krawczyk::Inconclusive("system must be square of dimension 1..=3".into());
    }
    let c = Compiled::new(sys);
    let direct = c.krawczyk(b);
    if matches!(direct, Krawczyk::UniqueRoot { .. }) {
        return direct;
    }
    if c.inverse_at(&b.mid()).is_none() {
        return direct;
    }
    // Largest verified box around a Newton point: at most one root there.
    let mut verified: Option<(IBox, IBox, Vec<f64>)> = None;
    if let Some(p) = c.newton(&b.mid(), Some(b)) {
        let mut r = 0.5 * b.max_width();
        while r > 1e-12 {
            let t = IBox(p.iter().map(|&v| Interval::new(v - r, v + r)).collect());
            if let Krawczyk::UniqueRoot { root_box, point } = c.krawczyk(&t) {
                verified = Some((t, root_box, point));
                break;
            }
            r *= 0.5;
        }
    }
    let covered = |bx: &IBox| verified.as_ref().is_some_and(|(t, _, _)| {
        bx.0.iter().zip(&t.0).all(|(a, v)| v.lo <= a.lo && a.hi <= v.hi)
    });
    let mut stack = vec![(b.clone(), 0u32)];
    while let Some((bx, d)) = stack.pop() {
        if covered(&bx) || c.excludes(&bx) {
            continue;
        }
        match c.krawczyk(&bx) {
            Krawczyk::UniqueRoot { point, .. }
                if verified.as_ref().is_some_and(|(t, _, _)| t.contains(&point)) => {}
            Krawczyk::UniqueRoot { .. } => {
                return Krawczyk::Inconclusive("more than one root in the box".into())
            }
            Krawczyk::Inconclusive(_) if d < UNIQUE_DEPTH => {
                let (l, r) = bx.bisect();
                stack.push((r, d + 1));
                stack.push((l, d + 1));
            }
            Krawczyk::Inconclusive(_) => return direct,
        }
    }
    match verified {
        Some((_, root_box, point)) if b.contains(&point) => Krawczyk::UniqueRoot { root_box, point },
        _ => Krawczyk::Inconclusive("no verified root in the box".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c2, q, x2, y2};

    fn kou() -> Vec<Poly> {
        let k = q(61, 43);
        let p = &(&x2().pow(6) + &y2().pow(3).scale(&k)) - &y2();
        let qq = &(&y2().pow(6) + &x2().pow(3).scale(&k)) - &x2();
        vec![p, qq]
    }

    #[test]
    fn miranda_examples() {
        let b = IBox::from_bounds(&[(-1.0, 1.0), (-1.0, 1.0)]);
        assert!(matches!(poincare_miranda(&[x2(), y2()], &b), Miranda::Certified(_)));
        let sys = [&(&x2() * &x2()) + &c2(1), y2()];
        assert!(matches!(poincare_miranda(&sys, &b), Miranda::Inconclusive(_)));
        let i1 = (0.5, 1619.0 / 2500.0);
        let i5 = (0.8, 0.83);
        let b = IBox::from_bounds(&[i1, i5]);
        match poincare_miranda(&kou(), &b) {
            Miranda::Certified(a) => assert_eq!(a.perm, vec![0, 1]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn krawczyk_examples() {
        let sys = [&Poly::var(0, 1) - &Poly::constant(1, q(1, 2))];
        match krawczyk_unique(&sys, &IBox::from_bounds(&[(0.0, 1.0)])) {
            Krawczyk::UniqueRoot { root_box, .. } => {
                assert!(root_box.0[0].contains(0.5) && root_box.max_width() <= 1e-9)
            }
            other => panic!("{other:?}"),
        }
        let i3 = (0.72, 0.75857);
        match krawczyk_unique(&kou(), &IBox::from_bounds(&[i3, i3])) {
            Krawczyk::UniqueRoot { point, root_box } => {
                assert!((point[0] - 0.74035310).abs() < 1e-8);
                assert!((point[1] - 0.74035310).abs() < 1e-8);
                assert!(root_box.max_width() <= 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let b = IBox::from_bounds(&[(-1.0, 1.0), (-1.0, 1.0)]);
        assert!(matches!(krawczyk_unique(&[&x2() * &x2(), y2()], &b), Krawczyk::Inconclusive(_)));
    }
}
