//! The acceptance suite: thirteen end-to-end checks of the reference
//! numbers and of the structural properties the library relies on.
//!
//! Every criterion is deterministic for a given seed. Runtime budgets are
//! part of the criteria and are checked too.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{q_from_f64, x2, Poly, Q};
use crate::builtins;
use crate::cycles::{
    critical_periods, equivariant_field, find_cycles, melnikov_direct, melnikov_poly, period_scan, return_map,
    rigid_field, IrsCache, LoudParams, ReturnOptions, Section,
};
use crate::dulac::{certify_dulac, examples, m_s, DulacVerdict};
use crate::error::Result;
use crate::flow::{classify_equilibria, integrate, EquilibriumKind, IntegrateOptions, VectorField};
use crate::geometry::{conjugacy_diagnostic, fagnano_orbit, rotation_number, AngleClass, Conjugacy, PonceletConfig, Triangle};
use crate::interval::{census_positive, eval_box, IBox, Interval};
use crate::pwl::{chebyshev_system, chebyshev_zeros, crossing_cycles, crossing_return};
use crate::scalar::{
    count_periodic, displacement_series, rigid_lyapunov, rigid_to_scalar, scalar_solve, RigidParams,
};
use crate::seq::{
    persistence, persistence_records, reverse_add_steps, singmaster_count, DifferenceEquation, Periodicity,
    ReverseAdd, difference_periodicity,
};
use crate::stability::{
    chessboard_field, jury, mc_probability, my_verify, polynomial_roots, routh_hurwitz, standard_normal,
    trial_rng, EquationKind,
};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub workers: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 1, workers: None }
    }
}

/// (id, topic, runtime budget in seconds)
pub const CRITERIA: [(u32, &str, f64); 13] = [
    (1, "Monte-Carlo stability (Routh-Hurwitz)", 300.0),
    (2, "Monte-Carlo stability (Jury)", 300.0),
    (3, "stability criteria vs. root solving", 60.0),
    (4, "fewnomial root census", 120.0),
    (5, "Chebyshev piecewise-linear cycles", 120.0),
    (6, "Melnikov function", 300.0),
    (7, "period functions", 180.0),
    (8, "Dulac functions", 60.0),
    (9, "rigid systems: Lyapunov constants and centres", 120.0),
    (10, "Markus-Yamabe counterexample and chessboard", 60.0),
    (11, "billiards and Poncelet maps", 120.0),
    (12, "digit sequences and difference equations", 180.0),
    (13, "property suites", 180.0),
];

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub topic: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub seconds: f64,
    pub budget_seconds: f64,
    pub within_budget: bool,
}

impl CriterionResult {
    /// One-line summary.
    pub fn line(&self) -> String {
        let mut failed: Vec<&str> = self.checks.iter().filter(|c| !c.passed).map(|c| c.detail.as_str()).collect();
        if !self.within_budget {
            failed.push("over the runtime budget");
        }
        let mut s = format!(
            "[{}] {:>2}. {} ({:.1}s / {:.0}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.topic,
            self.seconds,
            self.budget_seconds
        );
        if !failed.is_empty() {
            s.push_str(&format!(" -- {}", failed.join("; ")));
        }
        s
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { passed, detail: detail.into() });
    }

    fn err(&mut self, what: &str, e: impl std::fmt::Display) {
        self.add(false, format!("{what}: {e}"));
    }
}

pub fn run_criterion(id: u32, opts: &VerifyOptions) -> Option<CriterionResult> {
    let &(_, topic, budget) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let mut c = Checks::default();
    let outcome = match id {
        1 => mc_routh(&mut c, opts),
        2 => mc_jury(&mut c, opts),
        3 => oracle(&mut c, opts),
        4 => fewnomial(&mut c),
        5 => chebyshev(&mut c),
        6 => melnikov(&mut c),
        7 => periods(&mut c),
        8 => dulac(&mut c),
        9 => rigid(&mut c, opts),
        10 => markus_yamabe(&mut c, opts),
        11 => geometry(&mut c, opts),
        12 => sequences(&mut c),
        13 => properties(&mut c, opts),
        _ => unreachable!(),
    };
    if let Err(e) = outcome {
        c.err("error", e);
    }
    let seconds = start.elapsed().as_secs_f64();
    let within_budget = seconds <= budget;
    let passed = within_budget && c.0.iter().all(|k| k.passed);
    Some(CriterionResult { id, topic: topic.to_string(), passed, checks: c.0, seconds, budget_seconds: budget, within_budget })
}

pub fn run_all(opts: &VerifyOptions) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|(id, _, _)| run_criterion(*id, opts)).collect()
}

fn mc_routh(c: &mut Checks, o: &VerifyOptions) -> Result<()> {
    for (n, p) in [(1, 0.5), (2, 0.25), (3, 1.0 / 16.0)] {
        let b = mc_probability(n, EquationKind::Differential, 1_000_000, o.seed, o.workers)?;
        let z = (b.estimate - p) / b.stderr;
        c.add(z.abs() <= 3.0, format!("p{n} = {:.6} ± {:.6} vs {p} (z = {z:.2})", b.estimate, b.stderr));
    }
    for (n, lo, hi) in [(4, 0.008, 0.0105), (5, 0.0004, 0.0011)] {
        let b = mc_probability(n, EquationKind::Differential, 10_000_000, o.seed, o.workers)?;
        c.add(lo <= b.estimate && b.estimate <= hi, format!("p{n} = {:.6} in [{lo}, {hi}]", b.estimate));
    }
    Ok(())
}

fn mc_jury(c: &mut Checks, o: &VerifyOptions) -> Result<()> {
    let q2 = 2f64.sqrt().atan() / PI;
    let b = mc_probability(2, EquationKind::Difference, 1_000_000, o.seed, o.workers)?;
    let z = (b.estimate - q2) / b.stderr;
    c.add(z.abs() <= 3.0, format!("q2 = {:.6} ± {:.6} vs {q2:.6} (z = {z:.2})", b.estimate, b.stderr));
    for (n, q) in [(3, 0.172), (4, 0.103), (5, 0.059)] {
        let b = mc_probability(n, EquationKind::Difference, 1_000_000, o.seed, o.workers)?;
        c.add((b.estimate - q).abs() <= 0.01, format!("q{n} = {:.6} within 0.01 of {q}", b.estimate));
    }
    Ok(())
}

/// `None` when some root lies within 1e-9 of the stability boundary.
fn roots_stable(roots: &[(f64, f64)], disc: bool) -> Option<bool> {
    let margins: Vec<f64> = roots.iter().map(|(re, im)| if disc { re.hypot(*im) - 1.0 } else { *re }).collect();
    if margins.iter().any(|m| m.abs() < 1e-9) {
        return None;
    }
    Some(margins.iter().all(|m| *m < 0.0))
}

fn oracle(c: &mut Checks, o: &VerifyOptions) -> Result<()> {
    let (mut disagree, mut skipped) = (0, 0);
    for i in 0..10_000u64 {
        let mut rng = trial_rng(o.seed ^ 0x5eed, i);
        let deg = 1 + (i % 8) as usize;
        let a: Vec<f64> = (0..=deg).map(|_| standard_normal(&mut rng)).collect();
        let roots = polynomial_roots(&a)?;
        for (disc, verdict) in [(false, routh_hurwitz(&a)?), (true, jury(&a)?)] {
            match roots_stable(&roots, disc) {
                Some(s) if s != verdict => disagree += 1,
                Some(_) => {}
                None => skipped += 1,
            }
        }
    }
    c.add(disagree == 0, format!("{disagree} disagreements over 10^4 polynomials ({skipped} in margin band)"));
    Ok(())
}

fn fewnomial(c: &mut Checks) -> Result<()> {
    let xs = [0.59679166, 0.68913517, 0.74035310, 0.77980435, 0.81602099];
    let census = census_positive(&builtins::kou(), &IBox::from_bounds(&[(0.01, 2.0), (0.01, 2.0)]), 14);
    c.add(census.count == 5, format!("{} certified roots, {} unresolved boxes", census.count, census.unresolved.len()));
    let mut pts: Vec<Vec<f64>> = census.boxes.iter().filter_map(|b| b.point.clone()).collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
    let err = if pts.len() == 5 {
        pts.iter().enumerate().map(|(i, p)| (p[0] - xs[i]).abs().max((p[1] - xs[4 - i]).abs())).fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    c.add(err < 1e-6, format!("max deviation from the reference roots {err:.2e}"));
    Ok(())
}

fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn chebyshev(c: &mut Checks) -> Result<()> {
    let sys = chebyshev_system(10, 1e-3)?;
    let res = crossing_cycles(&sys, (0.03, 1.0), &grid(0.03, 1.0, 98))?;
    c.add(res.cycles.len() == 5, format!("n = 10: {} crossing cycles", res.cycles.len()));
    let mut zs = chebyshev_zeros(10);
    zs.sort_by(f64::total_cmp);
    let (mut pos, mut margin, mut agree) = (0.0f64, f64::INFINITY, 0.0f64);
    for (cy, z) in res.cycles.iter().zip(&zs) {
        pos = pos.max((cy.point[0] - z).hypot(cy.point[1]));
        if let Ok(r) = crossing_return(&sys, cy.x, 1e-12) {
            pos = pos.max((r.mid + z).hypot(sys.c(r.mid)));
        }
        margin = margin.min((cy.pi_prime_fd - 1.0).abs());
        agree = agree.max((cy.pi_prime_fd - cy.pi_prime_formula).abs());
    }
    c.add(pos < 0.02, format!("crossings within {pos:.2e} of (±x_k, 0)"));
    c.add(margin > 1e-3, format!("min |Π′ − 1| = {margin:.3e}"));
    c.add(agree < 1e-5, format!("Π′ methods agree to {agree:.2e}"));
    let sys4 = chebyshev_system(4, 1e-3)?;
    let res4 = crossing_cycles(&sys4, (0.03, 1.0), &grid(0.03, 1.0, 60))?;
    c.add(res4.cycles.len() == 2, format!("n = 4: {} crossing cycles", res4.cycles.len()));
    Ok(())
}

fn melnikov(c: &mut Checks) -> Result<()> {
    let spec = builtins::melnikov_two_cycles()?;
    let m = melnikov_poly(&spec, &IrsCache::default(), 1e-13);
    let mut worst = 0.0f64;
    for h in [0.5, 2.0, 8.0] {
        let direct = melnikov_direct(&spec, h, 1e-12)?;
        worst = worst.max((m.eval(h) / direct - 1.0).abs());
    }
    c.add(worst < 1e-6, format!("formula vs. line integral: max relative error {worst:.2e}"));
    let vf = spec.perturbed_field(1e-3);
    let sec = Section::positive_x((0.2, 8.0));
    let g: Vec<f64> = (1..=30).map(|i| 0.2 + 0.23 * i as f64).collect();
    let res = find_cycles(&vf, &sec, &g, &ReturnOptions { tol: 1e-12, ..Default::default() });
    let bound = (spec.n() + spec.m()) / 2;
    c.add(res.cycles.len() == 2 && bound == 2, format!("{} limit cycles (bound {bound})", res.cycles.len()));
    // predicted levels: zeros of M; H = x²/2 on the section
    let levels = [m.level_of_rho2(1.0), m.level_of_rho2(4.0)];
    let dev = res
        .cycles
        .iter()
        .zip(levels)
        .map(|(cy, h)| (cy.r_star - (2.0 * h).sqrt()).abs())
        .fold(if res.cycles.len() == 2 { 0.0 } else { f64::INFINITY }, f64::max);
    c.add(dev < 0.05, format!("cycles within {dev:.3e} of the predicted ovals"));
    Ok(())
}

fn periods(c: &mut Checks) -> Result<()> {
    let opts = ReturnOptions::default();
    let lin = builtins::field("linear-centre")?;
    let scan = period_scan(&lin, &Section::positive_x((0.1, 3.0)), &grid(0.2, 2.0, 10), &opts);
    let dev = scan.samples.iter().map(|s| (s.t - 2.0 * PI).abs()).fold(0.0, f64::max);
    c.add(scan.samples.len() == 10 && dev < 1e-9, format!("linear centre: |T − 2π| ≤ {dev:.1e}"));

    let hom = builtins::field("homogeneous-cubic")?;
    let s_grid: Vec<f64> = (0..10).map(|i| 0.3 * 10f64.powf(i as f64 / 9.0)).collect();
    let scan = period_scan(&hom, &Section::positive_x((0.1, 4.0)), &s_grid, &opts);
    let ts: Vec<f64> = scan.samples.iter().map(|s| s.t * s.r * s.r).collect();
    let spread = ts.iter().map(|v| (v / ts[0] - 1.0).abs()).fold(0.0, f64::max);
    c.add(scan.samples.len() == 10 && spread < 1e-6, format!("homogeneous centre: T·s² constant to {spread:.1e} over a decade"));

    let loud = LoudParams { d: -0.5, f: 0.5 }.field();
    let scan = period_scan(&loud, &Section::positive_x((0.01, 0.99)), &grid(0.1, 0.9, 9), &opts);
    let dev = scan.samples.iter().map(|s| (s.t / (2.0 * PI) - 1.0).abs()).fold(0.0, f64::max);
    c.add(scan.samples.len() == 9 && dev < 1e-6, format!("Loud (−1/2, 1/2): relative deviation {dev:.1e}"));

    let count = |vf: &VectorField, hi: f64| -> Result<usize> {
        let g: Vec<f64> = (1..=80).map(|i| hi * i as f64 / 80.0).collect();
        let scan = period_scan(vf, &Section::positive_x((1e-3, 50.0)), &g, &opts);
        let pts: Vec<(f64, f64)> = scan.samples.iter().map(|s| (s.r, s.t)).collect();
        Ok(critical_periods(&pts, None)?.count)
    };
    let ce = count(&equivariant_field(1, 1), 2.0)?;
    let cl = count(&LoudParams { d: -0.25, f: 0.75 }.field(), 1.0)?;
    c.add(ce == cl, format!("critical periods: equivariant (1,1) {ce}, Loud (−1/4, 3/4) {cl}"));
    Ok(())
}

fn dulac(c: &mut Checks) -> Result<()> {
    let x = x2();
    let mut exact = true;
    for cv in [-1i64, 2, 5] {
        let cq = Q::from_integer(cv.into());
        let m = m_s(&examples::polynomial_lienard(&cq))?;
        exact &= m.equals(&examples::polynomial_lienard_cofactor(&cq).mul_poly(&x.pow(2)));
        let m = m_s(&examples::rational_lienard(&cq))?;
        exact &= m.equals(&examples::rational_lienard_cofactor(&cq).mul_poly(&x.pow(4)));
    }
    c.add(exact, "M_s equals both closed forms as rational functions");
    let b = [(-5.0, 5.0), (-5.0, 5.0)];
    let r = certify_dulac(&examples::polynomial_lienard(&Q::from_integer((-1).into())), &b, 20);
    c.add(r.verdict == DulacVerdict::AtMostOneCycle, format!("F = −x³ + x⁵: {:?}", r.verdict));
    let r = certify_dulac(&examples::rational_lienard(&Q::from_integer(1.into())), &b, 20);
    c.add(r.verdict == DulacVerdict::AtMostOneCycle, format!("rational Liénard, c = 1: {:?}", r.verdict));
    Ok(())
}

fn rigid(c: &mut Checks, o: &VerifyOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let rat = |r: &mut ChaCha8Rng| r.random_range(-16i32..=16) as f64 / 8.0;
    let (mut v1_err, mut v3_err, mut v5_err) = (0.0f64, 0.0f64, 0.0f64);
    let mut mismatched = 0;
    for _ in 0..100 {
        let mut p = RigidParams {
            a: rat(&mut rng) / 8.0,
            b: rat(&mut rng),
            c: rat(&mut rng),
            d: rat(&mut rng),
            e: rat(&mut rng),
            f: rat(&mut rng),
        };
        // V₁: r′ = a·r over one turn
        let (v1, _, _) = rigid_lyapunov(&p);
        let lin = rigid_to_scalar(&RigidParams { a: p.a, ..Default::default() }.to_poly()?)?;
        let rho = 0.1;
        if let Some(end) = scalar_solve(&lin, 0.0, 2.0 * PI, rho, 1e-13)?.value() {
            v1_err = v1_err.max(((end - rho) / rho - v1).abs());
        } else {
            mismatched += 1;
        }
        // V₃ and V₅ from the exact displacement series at a = 0
        p.a = 0.0;
        let eq = rigid_to_scalar(&p.to_poly()?)?;
        let (_, v3, _) = rigid_lyapunov(&p);
        match displacement_series(&eq.coefficient(2), &eq.coefficient(3), 5) {
            Some((3, v)) => v3_err = v3_err.max((v - v3).abs()),
            Some((_, _)) | None if v3 == 0.0 => {}
            _ => mismatched += 1,
        }
        p.f = -p.d;
        let eq = rigid_to_scalar(&p.to_poly()?)?;
        let (_, _, v5) = rigid_lyapunov(&p);
        match displacement_series(&eq.coefficient(2), &eq.coefficient(3), 5) {
            Some((5, v)) => v5_err = v5_err.max((v - v5).abs()),
            None if v5 == 0.0 => {}
            _ => mismatched += 1,
        }
    }
    c.add(
        mismatched == 0 && v1_err < 1e-9 && v3_err < 1e-12 && v5_err < 1e-12,
        format!("100 parameter sets: |ΔV₁| {v1_err:.1e}, |ΔV₃| {v3_err:.1e}, |ΔV₅| {v5_err:.1e}, {mismatched} order mismatches"),
    );
    let mut continua = 0;
    let mut tried = 0;
    while tried < 5 {
        let (b, cc, e) = (rat(&mut rng), rat(&mut rng), rat(&mut rng));
        if (cc * cc - b * b).abs() < 0.1 {
            continue;
        }
        let d = b * cc * e / (cc * cc - b * b);
        let p = RigidParams { a: 0.0, b, c: cc, d, e, f: -d };
        let eq = rigid_to_scalar(&p.to_poly()?)?;
        let g: Vec<f64> = (-4..=4).map(|i| 0.02 * i as f64).collect();
        if count_periodic(&eq, (-0.1, 0.1), &g)?.continuum {
            continua += 1;
        }
        tried += 1;
    }
    c.add(continua == 5, format!("centre conditions: {continua}/5 flagged as continuum"));
    Ok(())
}

fn markus_yamabe(c: &mut Checks, o: &VerifyOptions) -> Result<()> {
    let r = my_verify(3, 100, 5.0, o.seed)?;
    c.add(
        r.exact_minus_one == 100,
        format!(
            "characteristic polynomial (λ + 1)³ exactly at {}/100 points (floating eigenvalues within {:.1e})",
            r.exact_minus_one, r.max_float_deviation
        ),
    );
    c.add(r.closed_form_residual < 1e-7, format!("closed-form residual at t = 1: {:.1e}", r.closed_form_residual));
    let eq = classify_equilibria(&chessboard_field(), [(0.0, 4.0), (0.0, 4.0)], 17)?;
    let n = |k| eq.iter().filter(|e| e.kind == k).count();
    let (centres, saddles) = (n(EquilibriumKind::Center), n(EquilibriumKind::Saddle));
    c.add(centres == 5 && saddles == 4 && eq.len() == 9, format!("chessboard: {centres} centres, {saddles} saddles"));
    Ok(())
}

fn geometry(c: &mut Checks, o: &VerifyOptions) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
    let (mut done, mut worst) = (0, 0.0f64);
    while done < 20 {
        let mut p = || [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let (a, b, cc) = (p(), p(), p());
        let Ok(t) = Triangle::new(a, b, cc) else { continue };
        if t.class != AngleClass::Acute {
            continue;
        }
        worst = worst.max(fagnano_orbit(&t)?.closure_residual);
        done += 1;
    }
    c.add(worst < 1e-9, format!("Fagnano closure on 20 acute triangles: {worst:.1e}"));
    let cfg = PonceletConfig::new(1, 1)?;
    let mut dev = 0.0f64;
    for a in [0.0, 0.3, 1.7, 4.0] {
        dev = dev.max((rotation_number(&cfg, cfg.outer_point(a), 200)?.estimate - 0.25).abs());
    }
    c.add(dev < 1e-9, format!("rotation number (1,1): |ρ − 1/4| ≤ {dev:.1e}"));
    let samples = [std::f64::consts::FRAC_PI_4, 0.0, 0.3, 1.1];
    let verdict = conjugacy_diagnostic(&PonceletConfig::new(2, 2)?, &samples, 200)?;
    let label = match &verdict {
        Conjugacy::NotConjugate { displacement, .. } => format!("not conjugate (displacement {displacement:.3})"),
        Conjugacy::ConsistentWithRotation { .. } => "consistent with rotation".into(),
        Conjugacy::Inconclusive { detail, .. } => format!("inconclusive ({detail})"),
    };
    c.add(matches!(verdict, Conjugacy::NotConjugate { .. }), format!("conjugacy (2,2): {label}"));
    Ok(())
}

fn sequences(c: &mut Checks) -> Result<()> {
    let n = |v: u64| num_bigint::BigUint::from(v);
    let p = persistence(&n(68889), 10)?;
    c.add(p == 7, format!("persistence(68889) = {p}"));
    let rec: Vec<Option<u64>> = persistence_records(7, 100_000).into_iter().map(|(_, v)| v).collect();
    let want = [10, 25, 39, 77, 679, 6788, 68889].map(Some);
    c.add(rec == want, format!("smallest n by persistence: {rec:?}"));
    let pal = |v: u64, steps: u32, value: &str| -> Result<bool> {
        Ok(reverse_add_steps(&n(v), 10, 1000)? == ReverseAdd::Palindrome { steps, value: value.into() })
    };
    c.add(pal(183, 4, "13431")?, "183 → 13431 in 4 steps");
    c.add(pal(89, 24, "8813200023188")?, "89 → 8813200023188 in 24 steps");
    let r = reverse_add_steps(&n(196), 10, 1000)?;
    c.add(matches!(r, ReverseAdd::NoneWithin { cap: 1000, .. }), "196 reaches no palindrome within 1000 steps");
    let (s1, s2) = (singmaster_count(&n(120))?, singmaster_count(&n(3003))?);
    c.add(s1 == 6 && s2 == 8, format!("multiplicities: 120 → {s1}, 3003 → {s2}"));
    for (eq, p) in [(DifferenceEquation::lyness(), 5), (DifferenceEquation::ratio(), 6), (DifferenceEquation::todd(), 8)] {
        let r = difference_periodicity(&eq, 5, 200, 1, 4096)?;
        let ok = matches!(r.verdict, Periodicity::Periodic { p: got, .. } if got == p);
        c.add(ok, format!("period {p} equation: {:?}", r.verdict));
    }
    Ok(())
}

fn random_poly(rng: &mut ChaCha8Rng) -> Result<Poly> {
    let terms = rng.random_range(1..=6);
    let mut t = Vec::new();
    for _ in 0..terms {
        let e = vec![rng.random_range(0..=4u32), rng.random_range(0..=4u32)];
        t.push((e, q_from_f64(rng.random_range(-8i32..=8) as f64 / 4.0)?));
    }
    Ok(Poly::from_terms(2, t))
}

/// Number of sampled point/box pairs with p(point) outside eval_box(p, box),
/// judged in exact arithmetic.
pub fn containment_violations(cases: usize, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    for _ in 0..cases {
        let p = random_poly(&mut rng)?;
        let mut iv = Vec::new();
        let mut pt = Vec::new();
        for _ in 0..2 {
            let a: f64 = rng.random_range(-3.0..3.0);
            let w: f64 = rng.random_range(0.0..2.0);
            iv.push(Interval::new(a, a + w));
            pt.push(a + w * rng.random_range(0.0..=1.0));
        }
        let enc = eval_box(&p, &IBox::new(iv));
        let ptq: Vec<Q> = pt.iter().map(|v| q_from_f64(*v)).collect::<Result<_>>()?;
        let v = p.eval_exact(&ptq);
        let inside = (!enc.lo.is_finite() || q_from_f64(enc.lo)? <= v) && (!enc.hi.is_finite() || v <= q_from_f64(enc.hi)?);
        if !inside {
            bad += 1;
        }
    }
    Ok(bad)
}

/// Largest |H(x(t)) − H(x(0))| / tol over t ≤ 100 for a few Hamiltonians.
pub fn hamiltonian_drift(tol: f64) -> Result<f64> {
    let x = x2();
    let y = crate::algebra::y2();
    let hs = [
        &(&x * &x) + &(&y * &y),
        &(&(&x * &x) + &(&y * &y)) + &x.pow(4).scale(&Q::new(1.into(), 2.into())),
        &(&x.pow(4) + &y.pow(2)) - &(&x * &x).scale(&Q::new(1.into(), 2.into())),
        &(&x.pow(2) + &y.pow(4)) + &(&x * &y).scale(&Q::new(1.into(), 4.into())),
    ];
    let mut worst = 0.0f64;
    for h in &hs {
        let vf = VectorField::planar(h.derivative(1), -h.derivative(0));
        for x0 in [[0.3, 0.1], [1.0, 0.0], [0.2, -0.7]] {
            let opts = IntegrateOptions { record: true, ..IntegrateOptions::with_tol(tol) };
            let tr = integrate(&vf, &x0, 0.0, 100.0, &opts, &[])?;
            let h0 = h.eval_f64(&x0);
            for s in &tr.states {
                worst = worst.max((h.eval_f64(s) - h0).abs() / tol);
            }
        }
    }
    Ok(worst)
}

/// Counts strict-monotonicity violations of Π over 5 fields × 20 section points.
pub fn return_map_monotonicity() -> Result<(usize, usize)> {
    let x = x2();
    let y = crate::algebra::y2();
    let c = |v: f64| Poly::constant(2, q_from_f64(v).unwrap());
    let fields: Vec<(VectorField, (f64, f64))> = vec![
        // van der Pol
        (VectorField::planar(y.clone(), &(&(-&x) + &y.scale(&Q::new(1.into(), 2.into()))) - &(&(&x * &x) * &y).scale(&Q::new(1.into(), 2.into()))), (0.1, 4.0)),
        // linear focus
        (VectorField::planar(&x.scale(&q_from_f64(0.1)?) - &y, &x + &y.scale(&q_from_f64(0.1)?)), (0.1, 3.0)),
        (LoudParams { d: -0.5, f: 0.5 }.field(), (0.05, 0.95)),
        (rigid_field(&(&c(0.05) - &(&(&x * &x) + &(&y * &y)))), (0.05, 1.5)),
        (builtins::melnikov_two_cycles()?.perturbed_field(1e-3), (0.3, 7.0)),
    ];
    let opts = ReturnOptions { strict_range: false, ..Default::default() };
    let (mut bad, mut defined) = (0, 0);
    for (vf, range) in &fields {
        let sec = Section::positive_x(*range);
        let pis: Vec<Option<f64>> =
            grid(range.0, range.1, 20).iter().map(|&r| return_map(vf, &sec, r, &opts).ok().map(|s| s.pi)).collect();
        let ok: Vec<f64> = pis.into_iter().flatten().collect();
        defined += ok.len();
        bad += ok.windows(2).filter(|w| !(w[1] > w[0])).count();
    }
    Ok((bad, defined))
}

fn properties(c: &mut Checks, o: &VerifyOptions) -> Result<()> {
    let bad = containment_violations(10_000, o.seed)?;
    c.add(bad == 0, format!("interval containment: {bad} violations in 10^4 cases"));
    let tol = 1e-10;
    let drift = hamiltonian_drift(tol)?;
    c.add(drift < 100.0, format!("Hamiltonian drift up to t = 100: {drift:.1}·tol"));
    let (bad, defined) = return_map_monotonicity()?;
    c.add(bad == 0 && defined == 100, format!("return-map monotonicity: {bad} violations, {defined}/100 returns"));
    let runs: Vec<u64> = [1, 2, 8]
        .iter()
        .map(|w| mc_probability(3, EquationKind::Differential, 200_000, o.seed, Some(*w)).map(|b| b.successes))
        .collect::<Result<_>>()?;
    c.add(runs.windows(2).all(|w| w[0] == w[1]), format!("MC successes for 1, 2, 8 workers: {runs:?}"));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_criterion() {
        assert!(run_criterion(0, &VerifyOptions::default()).is_none());
        assert!(run_criterion(14, &VerifyOptions::default()).is_none());
    }

    #[test]
    fn failing_check_fails_the_criterion() {
        let mut c = Checks::default();
        c.add(true, "a");
        c.add(false, "b");
        let r = CriterionResult {
            id: 1,
            topic: "t".into(),
            passed: c.0.iter().all(|k| k.passed),
            checks: c.0,
            seconds: 0.0,
            budget_seconds: 1.0,
            within_budget: true,
        };
        assert!(!r.passed);
        assert!(r.line().starts_with("[FAIL]") && r.line().ends_with("-- b"));
    }

    #[test]
    fn overrun_is_reported() {
        let r = CriterionResult {
            id: 2,
            topic: "t".into(),
            passed: false,
            checks: vec![],
            seconds: 2.0,
            budget_seconds: 1.0,
            within_budget: false,
        };
        assert!(r.line().ends_with("-- over the runtime budget"));
    }
}
