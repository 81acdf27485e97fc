//! Outward-rounded interval arithmetic and box certification.

mod census;
mod certify;

pub use census::{census_positive, Census, CensusBox, CensusStatus};
pub use certify::{krawczyk_unique, poincare_miranda, Krawczyk, Miranda, SignAssignment};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::algebra::{q_from_f64, q_to_f64, Poly, RationalFn, Q};

/// Closed interval `[lo, hi]`. Every operation steps its endpoints one ulp
/// outward, so results always enclose the exact real value.
#[derive(Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

fn down(v: f64) -> f64 {
    v.next_down()
}

fn up(v: f64) -> f64 {
    v.next_up()
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Interval { lo: v, hi: v }
    }

    /// Tightest float enclosure of an exact rational.
    pub fn from_q(v: &Q) -> Self {
        let f = q_to_f64(v);
        match q_from_f64(f) {
            Ok(back) if &back == v => Interval::point(f),
            _ => Interval { lo: down(f), hi: up(f) },
        }
    }

    pub fn entire() -> Self {
        Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }

    pub fn rad(&self) -> f64 {
        up(0.5 * (self.hi - self.lo))
    }

    pub fn mag(&self) -> f64 {
        self.lo.abs().max(self.hi.abs())
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(0.0)
    }

    /// `self` lies strictly inside `other`.
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersect(&self, o: &Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn hull(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn split(&self) -> (Interval, Interval) {
        let m = self.mid();
        (Interval { lo: self.lo, hi: m }, Interval { lo: m, hi: self.hi })
    }

    pub fn powi(&self, k: u32) -> Interval {
        match k {
            0 => Interval::point(1.0),
            1 => *self,
            _ => {
                let a = self.lo.powi(k as i32);
                let b = self.hi.powi(k as i32);
                // powi may be off by a few ulps for large k; widen accordingly.
                let widen = |v: f64, dir: bool| {
                    let mut v = v;
                    for _ in 0..(k / 4 + 1) {
                        v = if dir { up(v) } else { down(v) };
                    }
                    v
                };
                if k % 2 == 0 {
                    let hi = widen(a.max(b), true);
                    if self.contains_zero() {
                        Interval { lo: 0.0, hi }
                    } else {
                        Interval { lo: widen(a.min(b), false).max(0.0), hi }
                    }
                } else {
                    Interval { lo: widen(a, false), hi: widen(b, true) }
                }
            }
        }
    }

    /// Division; `None` when the divisor contains zero.
    pub fn div(&self, o: &Interval) -> Option<Interval> {
        if o.contains_zero() {
            return None;
        }
        let c = [self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi];
        Some(Interval {
            lo: down(c.iter().cloned().fold(f64::INFINITY, f64::min)),
            hi: up(c.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
        })
    }
}

/// Rounding error of `a + b` is zero (Knuth's two-sum).
fn sum_exact(a: f64, b: f64, s: f64) -> bool {
    let bb = s - a;
    (a - (s - bb)) + (b - bb) == 0.0 && s.is_finite()
}

fn add_lo(a: f64, b: f64) -> f64 {
    let s = a + b;
    if sum_exact(a, b, s) {
        s
    } else {
        down(s)
    }
}

fn add_hi(a: f64, b: f64) -> f64 {
    let s = a + b;
    if sum_exact(a, b, s) {
        s
    } else {
        up(s)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: add_lo(self.lo, o.lo), hi: add_hi(self.hi, o.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: add_lo(self.lo, -o.hi), hi: add_hi(self.hi, -o.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let pairs = [(self.lo, o.lo), (self.lo, o.hi), (self.hi, o.lo), (self.hi, o.hi)];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for (a, b) in pairs {
            let p = a * b;
            // fma recovers the exact rounding error of the product.
            let exact = p.is_finite() && a.mul_add(b, -p) == 0.0;
            lo = lo.min(if exact { p } else { down(p) });
            hi = hi.max(if exact { p } else { up(p) });
        }
        Interval { lo, hi }
    }
}

/// Axis-aligned box.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IBox(pub Vec<Interval>);

impl IBox {
    pub fn new(iv: Vec<Interval>) -> Self {
        assert!(!iv.is_empty(), "empty box");
        IBox(iv)
    }

    pub fn from_bounds(b: &[(f64, f64)]) -> Self {
        IBox(b.iter().map(|&(l, h)| Interval::new(l, h)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn mid(&self) -> Vec<f64> {
        self.0.iter().map(Interval::mid).collect()
    }

    pub fn max_width(&self) -> f64 {
        self.0.iter().map(Interval::width).fold(0.0, f64::max)
    }

    pub fn widest(&self) -> usize {
        let mut best = 0;
        for (i, iv) in self.0.iter().enumerate() {
            if iv.width() > self.0[best].width() {
                best = i;
            }
        }
        best
    }

    /// Bisects along the widest dimension.
    pub fn bisect(&self) -> (IBox, IBox) {
        let k = self.widest();
        let (a, b) = self.0[k].split();
        let mut l = self.clone();
        let mut r = self.clone();
        l.0[k] = a;
        r.0[k] = b;
        (l, r)
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        self.0.iter().zip(p).all(|(iv, v)| iv.contains(*v))
    }

    pub fn intersects(&self, o: &IBox) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a.intersect(b).is_some())
    }

    pub fn interior_of(&self, o: &IBox) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a.interior_of(b))
    }

    pub fn intersect(&self, o: &IBox) -> Option<IBox> {
        self.0
            .iter()
            .zip(&o.0)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()
            .map(IBox)
    }

    /// Face with coordinate `i` pinned to its lower (`upper = false`) or upper end.
    pub fn face(&self, i: usize, upper: bool) -> IBox {
        let mut f = self.clone();
        let v = if upper { self.0[i].hi } else { self.0[i].lo };
        f.0[i] = Interval::point(v);
        f
    }
}

/// Natural interval extension, Horner-style in the first variable with
/// coefficients evaluated recursively in the remaining ones.
pub fn eval_box(p: &Poly, b: &IBox) -> Interval {
    assert!(p.nvars() <= b.dim(), "polynomial has more variables than the box");
    let terms: Vec<(Vec<u32>, Interval)> = p
        .terms()
        .map(|(m, c)| (m.exps().to_vec(), Interval::from_q(c)))
        .collect();
    horner(&terms, 0, &b.0[..p.nvars()])
}

fn horner(terms: &[(Vec<u32>, Interval)], var: usize, xs: &[Interval]) -> Interval {
    if terms.is_empty() {
        return Interval::point(0.0);
    }
    if var == xs.len() {
        return terms.iter().fold(Interval::point(0.0), |acc, (_, c)| acc + *c);
    }
    // Group by the exponent of `var`, descending.
    let mut groups: std::collections::BTreeMap<u32, Vec<(Vec<u32>, Interval)>> = Default::default();
    for t in terms {
        groups.entry(t.0[var]).or_default().push(t.clone());
    }
    let mut acc: Option<Interval> = None;
    let mut prev_e = 0;
    for (&e, ts) in groups.iter().rev() {
        let c = horner(ts, var + 1, xs);
        acc = Some(match acc {
            None => c,
            Some(a) => a * xs[var].powi(prev_e - e) + c,
        });
        prev_e = e;
    }
    let a = acc.unwrap();
    if prev_e > 0 {
        a * xs[var].powi(prev_e)
    } else {
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    StrictlyPositive,
    StrictlyNegative,
    Unknown,
}

impl Sign {
    pub fn as_i32(self) -> i32 {
        match self {
            Sign::StrictlyPositive => 1,
            Sign::StrictlyNegative => -1,
            Sign::Unknown => 0,
        }
    }
}

/// Proves a strict sign of `p` on `b` by bisecting (widest side first) up
/// to `max_depth` levels.
pub fn certify_sign(p: &Poly, b: &IBox, max_depth: u32) -> Sign {
    let mut stack = vec![(b.clone(), 0u32)];
    let mut sign = 0i32;
    while let Some((bx, d)) = stack.pop() {
        let v = eval_box(p, &bx);
        let s = if v.lo > 0.0 {
            1
        } else if v.hi < 0.0 {
            -1
        } else {
            0
        };
        if s != 0 {
            if sign != 0 && s != sign {
                return Sign::Unknown;
            }
            sign = s;
            continue;
        }
        // A point sign change ends the search early.
        let mv = p.eval_f64(&bx.mid());
        if (sign == 1 && mv < 0.0) || (sign == -1 && mv > 0.0) || mv == 0.0 {
            return Sign::Unknown;
        }
        if d >= max_depth {
            return Sign::Unknown;
        }
        let (l, r) = bx.bisect();
        stack.push((r, d + 1));
        stack.push((l, d + 1));
    }
    match sign {
        1 => Sign::StrictlyPositive,
        -1 => Sign::StrictlyNegative,
        _ => Sign::Unknown,
    }
}

/// Sign of a rational function: numerator and denominator are certified
/// separately.
pub fn certify_sign_rational(r: &RationalFn, b: &IBox, max_depth: u32) -> Sign {
    let d = certify_sign(r.den(), b, max_depth);
    if d == Sign::Unknown {
        return Sign::Unknown;
    }
    match (certify_sign(r.num(), b, max_depth), d) {
        (Sign::Unknown, _) => Sign::Unknown,
        (n, d) if n == d => Sign::StrictlyPositive,
        _ => Sign::StrictlyNegative,
    }
}
