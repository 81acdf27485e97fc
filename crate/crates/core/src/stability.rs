//! Stability of random linear equations (Routh–Hurwitz / Jury, Monte Carlo
//! estimates), the Markus–Yamabe counterexample and La Salle-type
//! spectral-radius samplers.

use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{c2, q_from_f64, x2, y2, Poly, Q};
use crate::error::{Error, Result};
use crate::flow::{integrate, IntegrateOptions, VectorField};

fn check_leading(coeffs: &[f64]) -> Result<()> {
    match coeffs.last() {
        Some(a) if *a != 0.0 && a.is_finite() => Ok(()),
        _ => Err(Error::domain("leading coefficient must be finite and nonzero")),
    }
}

/// All roots of Σ A_k λ^k (coefficients in ascending order) have negative
/// real part. Any vanishing pivot, i.e. a marginal case, counts as unstable.
pub fn routh_hurwitz(coeffs: &[f64]) -> Result<bool> {
    check_leading(coeffs)?;
    Ok(routh_unchecked(coeffs))
}

fn routh_unchecked(coeffs: &[f64]) -> bool {
    let n = coeffs.len() - 1;
    let s = coeffs[n].signum();
    // descending, normalised to a positive leading coefficient
    let a: Vec<f64> = coeffs.iter().rev().map(|c| c * s).collect();
    let mut prev: Vec<f64> = a.iter().step_by(2).copied().collect();
    let mut cur: Vec<f64> = a.iter().skip(1).step_by(2).copied().collect();
    for _ in 0..n {
        let p = cur.first().copied().unwrap_or(0.0);
        if !(p > 0.0) {
            return false;
        }
        let r = prev[0] / p;
        let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
        let next: Vec<f64> = (0..prev.len().saturating_sub(1)).map(|j| at(&prev, j + 1) - r * at(&cur, j + 1)).collect();
        prev = cur;
        cur = next;
    }
    true
}

/// All roots of Σ A_k λ^k lie in the open unit disk (Schur–Cohn reduction,
/// equivalent to the Jury table). Roots on the circle count as unstable.
pub fn jury(coeffs: &[f64]) -> Result<bool> {
    check_leading(coeffs)?;
    Ok(jury_unchecked(coeffs))
}

fn jury_unchecked(coeffs: &[f64]) -> bool {
    let mut a = coeffs.to_vec();
    while a.len() > 1 {
        let n = a.len() - 1;
        let (a0, an) = (a[0], a[n]);
        if !(a0.abs() < an.abs()) {
            return false;
        }
        // (a_n p(z) − a_0 z^n p(1/z)) / z
        a = (0..n).map(|k| an * a[k + 1] - a0 * a[n - k - 1]).collect();
    }
    true
}

/// (1 − λ)ⁿ p((1 + λ)/(1 − λ)), mapping the unit disk onto the left half-plane.
pub fn mobius_transform(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len() - 1;
    let binom_poly = |k: usize, sign: f64| -> Vec<f64> {
        let mut p = vec![1.0];
        for _ in 0..k {
            let mut q = vec![0.0; p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i] += c;
                q[i + 1] += sign * c;
            }
            p = q;
        }
        p
    };
    let mut out = vec![0.0; n + 1];
    for (k, a) in coeffs.iter().enumerate() {
        let (u, v) = (binom_poly(k, 1.0), binom_poly(n - k, -1.0));
        for (i, x) in u.iter().enumerate() {
            for (j, y) in v.iter().enumerate() {
                out[i + j] += a * x * y;
            }
        }
    }
    out
}

/// Roots of Σ A_k λ^k as (re, im) pairs, from companion-matrix eigenvalues.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<(f64, f64)>> {
    check_leading(coeffs)?;
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(vec![]);
    }
    let lead = coeffs[n];
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == 0 {
            -coeffs[n - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    Ok(m.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationKind {
    /// x⁽ⁿ⁾-type linear ODE: Routh–Hurwitz.
    Differential,
    /// Linear recurrence: Jury.
    Difference,
}

impl std::str::FromStr for EquationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diff" | "differential" => Ok(EquationKind::Differential),
            "ddiff" | "difference" => Ok(EquationKind::Difference),
            _ => Err(Error::Parse(format!("unknown equation kind '{s}' (diff|ddiff)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialBatch {
    pub order: usize,
    pub kind: EquationKind,
    pub trials: u64,
    pub seed: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
}

/// Inverse standard normal CDF (Wichura's AS 241, PPND16); relative error
/// below 1e-13 in double precision.
pub fn normal_quantile(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r
            + 45921.953931549871457)
            * r
            + 13731.693765509461125)
            * r
            + 1971.5909503065514427)
            * r
            + 133.14166789178437745)
            * r
            + 3.387132872796366608;
        let den = ((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r
            + 21213.794301586595867)
            * r
            + 5394.1960214247511077)
            * r
            + 687.1870074920579083)
            * r
            + 42.313330701600911252)
            * r
            + 1.0;
        return q * num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let v = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734;
        let den = ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966)
            * r
            + 0.14810397642748007459)
            * r
            + 0.68976733498510000455)
            * r
            + 1.6763848301838038494)
            * r
            + 2.05319162663775882187)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386)
            * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772;
        let den = ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5)
            * r
            + 7.868691311456132591e-4)
            * r
            + 0.0148753612908506148525)
            * r
            + 0.13692988092273580531)
            * r
            + 0.59983220655588793769)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -v
    } else {
        v
    }
}

/// Generator for trial `index`: one ChaCha8 key per seed, one stream per trial.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Standard normal from one 64-bit draw.
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64);
    normal_quantile(u)
}

/// Coefficients A₀..Aₙ of trial `index`.
pub fn trial_coefficients(n: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = trial_rng(seed, index);
    (0..=n).map(|_| standard_normal(&mut rng)).collect()
}

/// Monte-Carlo estimate of the probability that a degree-n equation with
/// i.i.d. N(0,1) coefficients is asymptotically stable. The result depends
/// only on (n, kind, trials, seed), never on `workers`.
pub fn mc_probability(n: usize, kind: EquationKind, trials: u64, seed: u64, workers: Option<usize>) -> Result<TrialBatch> {
    if trials == 0 {
        return Err(Error::domain("need at least one trial"));
    }
    if n == 0 {
        return Err(Error::domain("order must be at least 1"));
    }
    let key = ChaCha8Rng::seed_from_u64(seed).get_seed();
    let trial = |i: u64| -> bool {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(i);
        let mut buf = [0.0; 16];
        let a = &mut buf[..=n];
        for c in a.iter_mut() {
            *c = standard_normal(&mut rng);
        }
        // a zero leading coefficient has probability zero
        if a[n] == 0.0 {
            return false;
        }
        match kind {
            EquationKind::Differential => routh_unchecked(a),
            EquationKind::Difference => jury_unchecked(a),
        }
    };
    const CHUNK: u64 = 4096;
    let run = || {
        (0..trials.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| (c * CHUNK..((c + 1) * CHUNK).min(trials)).filter(|&i| trial(i)).count() as u64)
            .sum::<u64>()
    };
    if n >= 16 {
        return Err(Error::Resource("Monte-Carlo order is limited to 15".into()));
    }
    let successes = match workers {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Resource(e.to_string()))?
            .install(run),
        None => run(),
    };
    let est = successes as f64 / trials as f64;
    Ok(TrialBatch {
        order: n,
        kind,
        trials,
        seed,
        successes,
        estimate: est,
        stderr: (est * (1.0 - est) / trials as f64).sqrt(),
    })
}

/// ẋ = −x + z₁(x + y z₁)², ẏ = −y − (x + y z₁)², ż_i = −z_i (i = 1..n−2).
pub fn cimen_field(n: usize) -> Result<VectorField> {
    if n < 3 {
        return Err(Error::domain("the counterexample needs n >= 3"));
    }
    let v = |i| Poly::var(i, n);
    let (x, y, z1) = (v(0), v(1), v(2));
    let u = &x + &(&y * &z1);
    let u2 = u.pow(2);
    let mut comps = vec![&(-&x) + &(&z1 * &u2), &(-&y) - &u2];
    for i in 2..n {
        comps.push(-v(i));
    }
    Ok(VectorField::polynomial(comps)?.with_name(&format!("cimen{n}")))
}

/// Characteristic polynomial det(λI − M) (ascending, monic) by
/// Faddeev–LeVerrier in exact arithmetic.
pub fn char_poly_exact(m: &[Vec<Q>]) -> Vec<Q> {
    let n = m.len();
    let mul = |a: &[Vec<Q>], b: &[Vec<Q>]| -> Vec<Vec<Q>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).fold(Q::zero(), |s, k| s + &a[i][k] * &b[k][j])).collect())
            .collect()
    };
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut mk: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect();
    for k in 1..=n {
        let am = mul(m, &mk);
        let tr = (0..n).fold(Q::zero(), |s, i| s + &am[i][i]);
        c[n - k] = -tr / Q::from_integer((k as i64).into());
        mk = am;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c[n - k];
        }
    }
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct MarkusYamabeReport {
    pub n: usize,
    pub points: usize,
    /// Points at which det(λI − DF) = (λ + 1)ⁿ exactly.
    pub exact_minus_one: usize,
    /// Largest |λ + 1| over floating-point eigenvalues (ill-conditioned:
    /// DF + I is nilpotent).
    pub max_float_deviation: f64,
    pub t_check: f64,
    pub closed_form_residual: f64,
    /// log(|x(t_max)| / |x(t_max − 1)|), compared with 1.9.
    pub growth_rate: f64,
    pub t_max: f64,
    pub passed: bool,
}

/// The closed-form solution (18eᵗ, −12e²ᵗ, e⁻ᵗ, …, e⁻ᵗ).
pub fn cimen_solution(n: usize, t: f64) -> Vec<f64> {
    let mut v = vec![18.0 * t.exp(), -12.0 * (2.0 * t).exp()];
    v.extend(std::iter::repeat((-t).exp()).take(n - 2));
    v
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Checks the Jacobian spectrum on `points` random points of [−5, 5]ⁿ and the
/// unbounded explicit solution.
pub fn my_verify(n: usize, points: usize, t_max: f64, seed: u64) -> Result<MarkusYamabeReport> {
    if !(t_max >= 2.0) {
        return Err(Error::domain("t_max must be at least 2"));
    }
    let vf = cimen_field(n)?;
    let comps = vf.polys().expect("polynomial field").to_vec();
    let jac: Vec<Vec<Poly>> = comps.iter().map(|c| (0..n).map(|j| c.derivative(j)).collect()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let target: Vec<Q> = {
        // (λ + 1)ⁿ ascending
        let mut p = vec![Q::one()];
        for _ in 0..n {
            let mut q = vec![Q::zero(); p.len() + 1];
            for (i, c) in p.iter().enumerate() {
                q[i] += c;
                q[i + 1] += c;
            }
            p = q;
        }
        p
    };
    let mut exact = 0;
    let mut max_dev: f64 = 0.0;
    for _ in 0..points {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
        let xq: Vec<Q> = x.iter().map(|v| q_from_f64(*v)).collect::<Result<_>>()?;
        let m: Vec<Vec<Q>> = jac.iter().map(|r| r.iter().map(|p| p.eval_exact(&xq)).collect()).collect();
        if char_poly_exact(&m) == target {
            exact += 1;
        }
        let mf = DMatrix::from_fn(n, n, |i, j| jac[i][j].eval_f64(&x));
        for z in mf.complex_eigenvalues().iter() {
            max_dev = max_dev.max((z.re + 1.0).hypot(z.im));
        }
    }
    let x0 = cimen_solution(n, 0.0);
    let opts = IntegrateOptions { record: true, ..IntegrateOptions::with_tol(1e-13) };
    let tr = integrate(&vf, &x0, 0.0, t_max, &opts, &[])?;
    let at = |t: f64| tr.at(t).ok_or_else(|| Error::numeric(format!("no dense output at t = {t}")));
    let t_check = 1.0;
    let exact_sol = cimen_solution(n, t_check);
    let num = at(t_check)?;
    let residual = num.iter().zip(&exact_sol).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let growth = (norm(&at(t_max)?) / norm(&at(t_max - 1.0)?)).ln();
    let passed = exact == points && residual < 1e-7 && growth >= 1.9;
    Ok(MarkusYamabeReport {
        n,
        points,
        exact_minus_one: exact,
        max_float_deviation: max_dev,
        t_check,
        closed_form_residual: residual,
        growth_rate: growth,
        t_max,
        passed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LaSalleCondition {
    /// ρ(DF) < 1
    C1,
    /// ρ(|DF|) < 1, entrywise absolute value
    C2,
}

#[derive(Clone, Debug, Serialize)]
pub struct LaSalleReport {
    pub condition: LaSalleCondition,
    pub max_radius: f64,
    pub witness: Vec<f64>,
    pub samples: usize,
    /// Points where power iteration stalled and a full eigen-solve was used.
    pub fallbacks: usize,
    /// max_radius < 1 on all samples; a sampled indication, not a proof.
    pub holds_on_samples: bool,
}

const POWER_MAX_ITER: usize = 10_000;

/// Dominant |eigenvalue| by power iteration; `None` if it does not settle.
pub fn power_radius(m: &DMatrix<f64>) -> Option<f64> {
    let n = m.nrows();
    let mut v = DMatrix::from_element(n, 1, 1.0 / (n as f64).sqrt());
    // a fixed irregular start avoids orthogonality to the dominant vector
    for i in 0..n {
        v[i] += 1e-3 * (i as f64 + 1.0).sqrt();
    }
    let mut last = f64::NAN;
    for _ in 0..POWER_MAX_ITER {
        let w = m * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return Some(0.0);
        }
        let rq = v.dot(&w) / v.dot(&v);
        v = w / nw;
        if (rq.abs() - last).abs() < 1e-14 * rq.abs().max(1e-300) && (nw - rq.abs()).abs() < 1e-10 * nw {
            return Some(rq.abs());
        }
        last = rq.abs();
    }
    None
}

pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Exact Jacobian of a polynomial map, evaluated in floating point.
pub fn poly_jacobian(map: &[Poly]) -> impl Fn(&[f64]) -> DMatrix<f64> + Sync + '_ {
    let n = map.len();
    let jac: Vec<Vec<Poly>> = map.iter().map(|c| (0..n).map(|j| c.derivative(j)).collect()).collect();
    move |x: &[f64]| DMatrix::from_fn(n, n, |i, j| jac[i][j].eval_f64(x))
}

/// Central-difference Jacobian of a black-box map.
pub fn fd_jacobian<F: Fn(&[f64]) -> Vec<f64> + Sync>(f: F, n: usize) -> impl Fn(&[f64]) -> DMatrix<f64> + Sync {
    move |x: &[f64]| {
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1.0);
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp), f(&xm));
            for i in 0..n {
                m[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        m
    }
}

/// Samples ρ(DF) or ρ(|DF|) uniformly over `bounds` and reports the largest.
pub fn lasalle_check(
    jac: &(dyn Fn(&[f64]) -> DMatrix<f64> + Sync),
    condition: LaSalleCondition,
    bounds: &[(f64, f64)],
    samples: usize,
    seed: u64,
) -> Result<LaSalleReport> {
    if samples == 0 || bounds.is_empty() {
        return Err(Error::domain("need a non-empty box and at least one sample"));
    }
    if bounds.iter().any(|(a, b)| !(a <= b)) {
        return Err(Error::domain("box bounds must satisfy lo <= hi"));
    }
    let results: Vec<(f64, Vec<f64>, bool)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let x: Vec<f64> =
                bounds.iter().map(|(a, b)| if a == b { *a } else { rng.random_range(*a..*b) }).collect();
            let mut m = jac(&x);
            if condition == LaSalleCondition::C2 {
                m = m.abs();
            }
            match power_radius(&m) {
                Some(r) => (r, x, false),
                None => (spectral_radius(&m), x, true),
            }
        })
        .collect();
    let fallbacks = results.iter().filter(|r| r.2).count();
    let (max_radius, witness, _) =
        results.into_iter().fold((f64::NEG_INFINITY, vec![], false), |acc, r| if r.0 > acc.0 { r } else { acc });
    Ok(LaSalleReport { condition, max_radius, witness, samples, fallbacks, holds_on_samples: max_radius < 1.0 })
}

/// ẋ = F(y), ẏ = −F(x) with F(u) = (u − 1)(u − 2)(u − 3).
pub fn chessboard_field() -> VectorField {
    let f = |v: Poly| &(&(&v - &c2(1)) * &(&v - &c2(2))) * &(&v - &c2(3));
    VectorField::planar(f(y2()), -f(x2())).with_name("chessboard")
}

/// Linear map x ↦ s·R(θ)x as polynomials.
pub fn scaled_rotation(s: f64, theta: f64) -> Result<Vec<Poly>> {
    let (c, si) = (q_from_f64(s * theta.cos())?, q_from_f64(s * theta.sin())?);
    Ok(vec![&x2().scale(&c) - &y2().scale(&si), &x2().scale(&si) + &y2().scale(&c)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;
    use crate::flow::{classify_equilibria, EquilibriumKind};
    use proptest::prelude::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn roots_stable(roots: &[(f64, f64)], disc: bool) -> Option<bool> {
        let margins: Vec<f64> =
            roots.iter().map(|(re, im)| if disc { re.hypot(*im) - 1.0 } else { *re }).collect();
        if margins.iter().any(|m| m.abs() < 1e-9) {
            return None;
        }
        Some(margins.iter().all(|m| *m < 0.0))
    }

    #[test]
    fn routh_examples() {
        assert!(routh_hurwitz(&[1.0, 1.0]).unwrap());
        assert!(routh_hurwitz(&[1.0, 1.0, 1.0]).unwrap());
        assert!(!routh_hurwitz(&[1.0, 1.0, 1.0, 1.0]).unwrap());
        assert!(!routh_hurwitz(&[-1.0, 1.0]).unwrap());
        assert!(routh_hurwitz(&[-1.0, -3.0, -3.0, -1.0]).unwrap());
        assert!(routh_hurwitz(&[1.0, 0.0]).is_err());
        assert!(routh_hurwitz(&[]).is_err());
        // the factorisation oracle for the marginal cubic
        let r = polynomial_roots(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!(r.iter().any(|(re, im)| re.abs() < 1e-12 && (im - 1.0).abs() < 1e-12));
    }

    #[test]
    fn jury_examples() {
        assert!(jury(&[0.0, 1.0]).unwrap());
        assert!(!jury(&[-1.0, 0.0, 1.0]).unwrap());
        assert!(jury(&[0.0, -1.0, 2.0]).unwrap());
        assert!(jury(&[5.0]).unwrap());
        assert!(jury(&[1.0, 0.0]).is_err());
        assert!(jury(&[0.25, -1.0, 1.0]).unwrap()); // (λ − 1/2)²
        assert!(!jury(&[1.0, 2.0, 1.0]).unwrap()); // double root at −1
    }

    #[test]
    fn criteria_agree_with_root_solving() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        for i in 0..4000 {
            let deg = 1 + i % 8;
            let a: Vec<f64> = (0..=deg).map(|_| standard_normal(&mut rng)).collect();
            let roots = polynomial_roots(&a).unwrap();
            if let Some(s) = roots_stable(&roots, false) {
                assert_eq!(routh_hurwitz(&a).unwrap(), s, "{a:?}");
                checked += 1;
            }
            if let Some(s) = roots_stable(&roots, true) {
                assert_eq!(jury(&a).unwrap(), s, "{a:?}");
            }
        }
        assert!(checked > 3900);
    }

    #[test]
    fn quantile_matches_reference() {
        let n = Normal::new(0.0, 1.0).unwrap();
        for p in [1e-300, 1e-20, 1e-5, 0.01, 0.2, 0.4, 0.5, 0.6, 0.975, 1.0 - 1e-10] {
            let (a, b) = (normal_quantile(p), n.inverse_cdf(p));
            assert!((a - b).abs() <= 1e-9 * b.abs().max(1.0), "{p}: {a} vs {b}");
        }
        // high-precision reference values of √2·erfinv(2p − 1)
        for (p, z) in [
            (0.01, -2.32634787404084109307509639163),
            (1e-5, -4.26489079392282461023374886652),
            (0.2, -0.841621233572914165522490625772),
            (1e-20, -9.2623400897981532129387785062),
        ] {
            assert!((normal_quantile(p) - z).abs() < 1e-13 * z.abs(), "{p}: {}", normal_quantile(p) - z);
        }
        assert_eq!(normal_quantile(0.5), 0.0);
    }

    #[test]
    fn low_order_probabilities() {
        let b = mc_probability(1, EquationKind::Differential, 200_000, 1, None).unwrap();
        assert!((b.estimate - 0.5).abs() < 3.0 * b.stderr);
        let b = mc_probability(2, EquationKind::Differential, 200_000, 2, None).unwrap();
        assert!((b.estimate - 0.25).abs() < 3.0 * b.stderr);
        let b = mc_probability(2, EquationKind::Difference, 200_000, 3, None).unwrap();
        let q2 = 2f64.sqrt().atan() / std::f64::consts::PI;
        assert!((b.estimate - q2).abs() < 3.0 * b.stderr, "{b:?}");
        assert_eq!(b.estimate, b.successes as f64 / b.trials as f64);
        assert!(mc_probability(2, EquationKind::Difference, 0, 3, None).is_err());
    }

    #[test]
    fn mc_is_worker_independent() {
        let runs: Vec<u64> = [1, 2, 8]
            .iter()
            .map(|w| mc_probability(3, EquationKind::Differential, 50_000, 99, Some(*w)).unwrap().successes)
            .collect();
        assert!(runs.windows(2).all(|w| w[0] == w[1]));
        // and matches the single-trial generator
        let manual = (0..50_000u64).filter(|i| routh_hurwitz(&trial_coefficients(3, 99, *i)).unwrap()).count();
        assert_eq!(manual as u64, runs[0]);
    }

    #[test]
    fn stderr_scales_and_bound_holds() {
        let a = mc_probability(2, EquationKind::Differential, 20_000, 5, None).unwrap();
        let b = mc_probability(2, EquationKind::Differential, 80_000, 5, None).unwrap();
        let ratio = a.stderr / b.stderr;
        assert!((ratio - 2.0).abs() < 0.4, "{ratio}");
        for n in 1..=5 {
            let t = mc_probability(n, EquationKind::Differential, 100_000, 10 + n as u64, None).unwrap();
            assert!(t.estimate - 3.0 * t.stderr < 0.5f64.powi(n as i32));
        }
    }

    #[test]
    fn markus_yamabe() {
        for n in [3, 4] {
            let r = my_verify(n, 100, 5.0, 1).unwrap();
            assert_eq!(r.exact_minus_one, 100);
            assert!(r.closed_form_residual < 1e-7, "{r:?}");
            assert!(r.growth_rate >= 1.9);
            assert!(r.passed);
        }
        assert!(my_verify(2, 10, 5.0, 1).is_err());
        let s = cimen_solution(3, 1.0);
        let e = std::f64::consts::E;
        assert!((s[0] - 18.0 * e).abs() < 1e-12 && (s[1] + 12.0 * e * e).abs() < 1e-12 && (s[2] - 1.0 / e).abs() < 1e-15);
    }

    #[test]
    fn faddeev_leverrier() {
        let m = vec![vec![qi(2), qi(1)], vec![qi(1), qi(2)]];
        assert_eq!(char_poly_exact(&m), vec![qi(3), qi(-4), qi(1)]);
    }

    #[test]
    fn lasalle_examples() {
        let half = vec![Poly::var(0, 1).scale(&crate::algebra::q(1, 2))];
        let j = poly_jacobian(&half);
        for c in [LaSalleCondition::C1, LaSalleCondition::C2] {
            let r = lasalle_check(&j, c, &[(-1.0, 1.0)], 50, 0).unwrap();
            assert!((r.max_radius - 0.5).abs() < 1e-12 && r.holds_on_samples);
        }
        let rot = scaled_rotation(0.9, std::f64::consts::FRAC_PI_4).unwrap();
        let j = poly_jacobian(&rot);
        let r1 = lasalle_check(&j, LaSalleCondition::C1, &[(-1.0, 1.0); 2], 50, 0).unwrap();
        assert!((r1.max_radius - 0.9).abs() < 1e-9 && r1.holds_on_samples);
        let r2 = lasalle_check(&j, LaSalleCondition::C2, &[(-1.0, 1.0); 2], 50, 0).unwrap();
        assert!((r2.max_radius - 0.9 * 2f64.sqrt()).abs() < 1e-9 && !r2.holds_on_samples);
        let id = fd_jacobian(|x: &[f64]| x.to_vec(), 2);
        let r = lasalle_check(&id, LaSalleCondition::C1, &[(0.0, 1.0); 2], 10, 0).unwrap();
        assert!((r.max_radius - 1.0).abs() < 1e-8 && !r.holds_on_samples);
        assert!(lasalle_check(&id, LaSalleCondition::C1, &[(1.0, 0.0); 2], 10, 0).is_err());
    }

    #[test]
    fn chessboard_classification() {
        let eq = classify_equilibria(&chessboard_field(), [(0.0, 4.0), (0.0, 4.0)], 17).unwrap();
        let count = |k| eq.iter().filter(|e| e.kind == k).count();
        assert_eq!((count(EquilibriumKind::Center), count(EquilibriumKind::Saddle)), (5, 4));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn mobius_duality(a in proptest::collection::vec(-3.0f64..3.0, 2..8)) {
            prop_assume!(a.last().unwrap().abs() > 0.1);
            let roots = polynomial_roots(&a).unwrap();
            prop_assume!(roots.iter().all(|(re, im)| (re.hypot(*im) - 1.0).abs() > 1e-6));
            let t = mobius_transform(&a);
            prop_assume!(t.last().unwrap().abs() > 1e-6);
            prop_assert_eq!(jury(&a).unwrap(), routh_hurwitz(&t).unwrap());
        }
    }
}
