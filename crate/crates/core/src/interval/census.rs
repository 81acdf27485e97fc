use rayon::prelude::*;
use serde::Serialize;

use super::certify::{poincare_miranda, Compiled, Krawczyk, Miranda, SignAssignment};
use super::{IBox, Interval};
use crate::algebra::Poly;

/// Certified roots closer than this are the same root.
const MERGE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusStatus {
    Certified,
    Unresolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct CensusBox {
    pub status: CensusStatus,
    /// Box on which the certificate was obtained (or the leaf left undecided).
    pub search_box: IBox,
    /// Verified enclosure of the root (certified entries only).
    pub root_box: Option<IBox>,
    pub point: Option<Vec<f64>>,
    /// Poincaré–Miranda sign assignment on `search_box`, when one exists.
    pub miranda: Option<SignAssignment>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub count: usize,
    pub boxes: Vec<CensusBox>,
    pub unresolved: Vec<CensusBox>,
}

enum Outcome {
    Excluded,
    Unique(IBox, Vec<f64>),
    Split(Option<(IBox, IBox, Vec<f64>)>),
}

fn process(c: &Compiled, domain: &IBox, b: &IBox) -> Outcome {
    if c.excludes(b) {
        return Outcome::Excluded;
    }
    if let Krawczyk::UniqueRoot { root_box, point } = c.krawczyk(b) {
        return Outcome::Unique(root_box, point);
    }
    // ε-inflation around Newton points catches roots sitting on box edges
    // or too close to a neighbour for the whole-box test.
    let n = b.dim();
    let mut seeds = vec![b.mid()];
    for mask in 0..(1usize << n) {
        seeds.push((0..n).map(|i| if mask >> i & 1 == 1 { b.0[i].hi } else { b.0[i].lo }).collect());
    }
    for s in seeds {
        let Some(p) = c.newton(&s, None) else { continue };
        if !(b.contains(&p) && domain.contains(&p)) {
            continue;
        }
        let mut r = 0.5 * b.max_width();
        while r > 1e-10 {
            let t = IBox(p.iter().map(|&v| Interval::new(v - r, v + r)).collect());
            if let Krawczyk::UniqueRoot { root_box, point } = c.krawczyk(&t) {
                return Outcome::Split(Some((t, root_box, point)));
            }
            r *= 0.5;
        }
    }
    Outcome::Split(None)
}

/// Counts roots of a square polynomial system in `domain` by subdivision to
/// `depth` levels. Every counted root carries a Krawczyk existence and
/// uniqueness certificate, so `count` is a certified lower bound.
pub fn census_positive(sys: &[Poly], domain: &IBox, depth: u32) -> Census {
    let c = Compiled::new(sys);
    let mut level = vec![domain.clone()];
    let mut certified: Vec<(IBox, IBox, Vec<f64>)> = Vec::new();
    let mut leaves: Vec<IBox> = Vec::new();
    for d in 0..=depth {
        if level.is_empty() {
            break;
        }
        let outcomes: Vec<(IBox, Outcome)> = level
            .into_par_iter()
            .map(|b| {
                let o = process(&c, domain, &b);
                (b, o)
            })
            .collect();
        let mut next = Vec::new();
        for (b, o) in outcomes {
            match o {
                Outcome::Excluded => {}
                Outcome::Unique(rb, p) => {
                    if domain.contains(&p) {
                        certified.push((b, rb, p));
                    }
                }
                Outcome::Split(cert) => {
                    if let Some(cert) = cert {
                        certified.push(cert);
                    }
                    if d < depth {
                        let (l, r) = b.bisect();
                        next.push(l);
                        next.push(r);
                    } else {
                        leaves.push(b);
                    }
                }
            }
        }
        level = next;
    }

    certified.sort_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
    let mut merged: Vec<(IBox, IBox, Vec<f64>)> = Vec::new();
    for cert in certified {
        let dup = merged.iter().any(|m| {
            m.2.iter().zip(&cert.2).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() < MERGE_TOL
        });
        if !dup {
            merged.push(cert);
        }
    }
    let boxes: Vec<CensusBox> = merged
        .into_iter()
        .map(|(sb, rb, p)| {
            let miranda = match poincare_miranda(&c.sys, &sb) {
                Miranda::Certified(a) => Some(a),
                Miranda::Inconclusive(_) => None,
            };
            CensusBox {
                status: CensusStatus::Certified,
                search_box: sb,
                root_box: Some(rb),
                point: Some(p),
                miranda,
            }
        })
        .collect();
    let unresolved = leaves
        .into_iter()
        .filter(|l| !boxes.iter().any(|b| b.root_box.as_ref().is_some_and(|r| r.intersects(l))))
        .map(|l| CensusBox {
            status: CensusStatus::Unresolved,
            search_box: l,
            root_box: None,
            point: None,
            miranda: None,
        })
        .collect();
    Census { count: boxes.len(), boxes, unresolved }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c2, x2, y2};

    #[test]
    fn single_root() {
        let sys = [&x2() - &c2(1), &y2() - &c2(1)];
        let c = census_positive(&sys, &IBox::from_bounds(&[(0.0, 2.0), (0.0, 2.0)]), 8);
        assert_eq!(c.count, 1);
        assert!(c.unresolved.is_empty());
    }

    #[test]
    fn trinomial_system_has_five_positive_roots() {
        let k = crate::algebra::q(61, 43);
        let p = &(&x2().pow(6) + &y2().pow(3).scale(&k)) - &y2();
        let q = &(&y2().pow(6) + &x2().pow(3).scale(&k)) - &x2();
        let c = census_positive(&[p, q], &IBox::from_bounds(&[(0.01, 2.0), (0.01, 2.0)]), 14);
        let xs = [0.59679166, 0.68913517, 0.74035310, 0.77980435, 0.81602099];
        assert_eq!(c.count, 5, "{c:#?}");
        for (b, i) in c.boxes.iter().zip(0..) {
            let p = b.point.as_ref().unwrap();
            assert!((p[0] - xs[i]).abs() < 1e-6 && (p[1] - xs[4 - i]).abs() < 1e-6);
        }
    }

    #[test]
    fn no_real_root() {
        let sys = [&(&(&x2() * &x2()) + &(&y2() * &y2())) + &c2(1), x2()];
        let c = census_positive(&sys, &IBox::from_bounds(&[(0.0, 1.0), (0.0, 1.0)]), 8);
        assert_eq!(c.count, 0);
        assert!(c.unresolved.is_empty());
    }
}
