//! Digit dynamics (multiplicative persistence, reverse-and-add), Pascal
//! triangle multiplicities and periodicity of rational difference equations.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{format_q, parse_q, qi, Q};
use crate::error::{Error, Result};

fn check_base(base: u32) -> Result<()> {
    if (2..=256).contains(&base) {
        Ok(())
    } else {
        Err(Error::domain(format!("base must be in 2..=256, got {base}")))
    }
}

/// Digits of n in base b, most significant first; 0 has the single digit 0.
pub fn digits(n: &BigUint, base: u32) -> Result<Vec<u8>> {
    check_base(base)?;
    if n.is_zero() {
        return Ok(vec![0]);
    }
    Ok(n.to_radix_be(base))
}

pub fn from_digits(d: &[u8], base: u32) -> Result<BigUint> {
    check_base(base)?;
    BigUint::from_radix_be(d, base).ok_or_else(|| Error::domain("digit out of range for the base"))
}

/// rev_b(n): the digits of n read backwards (leading zeros dropped).
pub fn reverse(n: &BigUint, base: u32) -> Result<BigUint> {
    let mut d = digits(n, base)?;
    d.reverse();
    from_digits(&d, base)
}

pub fn is_palindrome(n: &BigUint, base: u32) -> Result<bool> {
    let d = digits(n, base)?;
    Ok(d.iter().eq(d.iter().rev()))
}

/// Product of the base-b digits.
pub fn digit_product(n: &BigUint, base: u32) -> Result<BigUint> {
    Ok(digits(n, base)?.into_iter().fold(BigUint::one(), |acc, d| acc * d))
}

/// Π^0(n), Π^1(n), … up to the first repeated value.
pub fn persistence_chain(n: &BigUint, base: u32) -> Result<Vec<BigUint>> {
    let mut chain = vec![n.clone()];
    loop {
        let next = digit_product(chain.last().unwrap(), base)?;
        if &next == chain.last().unwrap() {
            return Ok(chain);
        }
        chain.push(next);
    }
}

/// First m with Π^m(n) = Π^{m+1}(n).
pub fn persistence(n: &BigUint, base: u32) -> Result<u32> {
    Ok(persistence_chain(n, base)?.len() as u32 - 1)
}

fn persistence_u64(mut n: u64) -> u32 {
    let mut steps = 0;
    while n >= 10 {
        let mut p = 1;
        let mut m = n;
        while m > 0 {
            p *= m % 10;
            m /= 10;
        }
        n = p;
        steps += 1;
    }
    steps
}

/// Smallest base-10 n < `limit` with persistence s, for s = 1..=max_steps.
pub fn persistence_records(max_steps: u32, limit: u64) -> Vec<(u32, Option<u64>)> {
    let mut out: Vec<(u32, Option<u64>)> = (1..=max_steps).map(|s| (s, None)).collect();
    let mut missing = max_steps as usize;
    for n in 0..limit {
        let s = persistence_u64(n);
        if s >= 1 && s <= max_steps && out[s as usize - 1].1.is_none() {
            out[s as usize - 1].1 = Some(n);
            missing -= 1;
            if missing == 0 {
                break;
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum ReverseAdd {
    Palindrome { steps: u32, value: String },
    NoneWithin { cap: u32, digits: usize },
}

/// Iterates n ↦ n + rev_b(n) (at least once) until a base-b palindrome.
pub fn reverse_add_steps(n: &BigUint, base: u32, cap: u32) -> Result<ReverseAdd> {
    if cap < 1 {
        return Err(Error::domain("cap must be at least 1"));
    }
    let mut x = n.clone();
    for k in 1..=cap {
        x = &x + reverse(&x, base)?;
        if is_palindrome(&x, base)? {
            return Ok(ReverseAdd::Palindrome { steps: k, value: x.to_str_radix(base) });
        }
    }
    Ok(ReverseAdd::NoneWithin { cap, digits: digits(&x, base)?.len() })
}

/// The orbit n, f(n), …, f^steps(n) of reverse-and-add.
pub fn reverse_add_orbit(n: &BigUint, base: u32, steps: u32) -> Result<Vec<BigUint>> {
    let mut out = vec![n.clone()];
    for _ in 0..steps {
        let x = out.last().unwrap();
        out.push(x + reverse(x, base)?);
    }
    Ok(out)
}

fn binom(n: &BigUint, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of positions (row, col) of Pascal's triangle holding N. Entries
/// with 2 ≤ col ≤ row/2 are found by bisection on the row for each col;
/// C(N, 1) and C(N, N − 1) are added directly.
pub fn singmaster_count(n: &BigUint) -> Result<u32> {
    if *n < BigUint::from(2u32) {
        return Err(Error::domain("N must be at least 2"));
    }
    let mut count = if *n == BigUint::from(2u32) { 1 } else { 2 };
    let mut k = 2u64;
    // central entries grow without bound, so k is bounded by C(2k, k) ≤ N
    while binom(&BigUint::from(2 * k), k) <= *n {
        let (mut lo, mut hi) = (BigUint::from(2 * k), n.clone());
        while lo < hi {
            let mid: BigUint = (&lo + &hi) >> 1;
            if binom(&mid, k) < *n {
                lo = mid + 1u32;
            } else {
                hi = mid;
            }
        }
        if binom(&lo, k) == *n {
            count += if lo == BigUint::from(2 * k) { 1 } else { 2 };
        }
        k += 1;
    }
    Ok(count)
}

/// x_{n+k} = (A₀ + A₁x_n + … + A_k x_{n+k−1}) / (B₀ + B₁x_n + … + B_k x_{n+k−1}).
#[derive(Clone, Debug, PartialEq)]
pub struct DifferenceEquation {
    pub k: usize,
    pub a: Vec<Q>,
    pub b: Vec<Q>,
}

impl DifferenceEquation {
    pub fn new(a: Vec<Q>, b: Vec<Q>) -> Result<Self> {
        if a.len() != b.len() || a.len() < 2 {
            return Err(Error::domain("need A_0..A_k and B_0..B_k with k >= 1"));
        }
        if a.iter().chain(&b).any(|c| c.is_negative()) {
            return Err(Error::domain("coefficients must be non-negative"));
        }
        let sum = |v: &[Q]| v.iter().fold(Q::zero(), |s, c| s + c);
        if sum(&a).is_zero() || sum(&b).is_zero() {
            return Err(Error::domain("ΣA_i and ΣB_i must be positive"));
        }
        if a[1].is_zero() && b[1].is_zero() {
            return Err(Error::domain("A_1 and B_1 cannot both vanish"));
        }
        Ok(DifferenceEquation { k: a.len() - 1, a, b })
    }

    /// Build from integer coefficients.
    pub fn from_ints(a: &[i64], b: &[i64]) -> Result<Self> {
        Self::new(a.iter().map(|v| qi(*v)).collect(), b.iter().map(|v| qi(*v)).collect())
    }

    /// x_{n+2} = (1 + x_{n+1}) / x_n
    pub fn lyness() -> Self {
        Self::from_ints(&[1, 0, 1], &[0, 1, 0]).unwrap()
    }

    /// x_{n+2} = x_{n+1} / x_n
    pub fn ratio() -> Self {
        Self::from_ints(&[0, 0, 1], &[0, 1, 0]).unwrap()
    }

    /// x_{n+3} = (1 + x_{n+1} + x_{n+2}) / x_n
    pub fn todd() -> Self {
        Self::from_ints(&[1, 0, 1, 1], &[0, 1, 0, 0]).unwrap()
    }

    /// The ℓ-fold version: x_{n+kℓ} uses x_n, x_{n+ℓ}, …, x_{n+(k−1)ℓ}.
    pub fn unfold(&self, l: usize) -> Self {
        if l <= 1 {
            return self.clone();
        }
        let k = self.k * l;
        let mut a = vec![Q::zero(); k + 1];
        let mut b = vec![Q::zero(); k + 1];
        a[0] = self.a[0].clone();
        b[0] = self.b[0].clone();
        for i in 1..=self.k {
            a[(i - 1) * l + 1] = self.a[i].clone();
            b[(i - 1) * l + 1] = self.b[i].clone();
        }
        DifferenceEquation { k, a, b }
    }

    pub fn next(&self, window: &[Q]) -> Option<Q> {
        let lin = |c: &[Q]| window.iter().zip(&c[1..]).fold(c[0].clone(), |s, (x, c)| s + x * c);
        let den = lin(&self.b);
        if den.is_zero() {
            return None;
        }
        Some(lin(&self.a) / den)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "a": self.a.iter().map(format_q).collect::<Vec<_>>(),
            "b": self.b.iter().map(format_q).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let list = |key: &str| -> Result<Vec<Q>> {
            v.get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("difference equation needs an array '{key}'")))?
                .iter()
                .map(|c| match c {
                    Value::String(s) => parse_q(s),
                    Value::Number(n) => parse_q(&n.to_string()),
                    _ => Err(Error::Parse(format!("bad coefficient {c}"))),
                })
                .collect()
        };
        let eq = Self::new(list("a")?, list("b")?)?;
        if let Some(k) = v.get("k").and_then(Value::as_u64) {
            if k as usize != eq.k {
                return Err(Error::Parse(format!("k = {k} does not match {} coefficients", eq.k + 1)));
            }
        }
        Ok(eq)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Periodicity {
    /// Every trial orbit recurred with least common period p (empirical).
    Periodic { p: usize, empirical: bool },
    AperiodicUpTo { horizon: usize, reason: String },
    UndefinedOrbit { trial: usize, step: usize },
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicityReport {
    pub verdict: Periodicity,
    /// Minimal period of each trial orbit, if found.
    pub trial_periods: Vec<Option<usize>>,
}

/// Iterates from `trials` random positive rational windows in exact
/// arithmetic. Iterates larger than `max_bits` abort the trial.
pub fn difference_periodicity(
    eq: &DifferenceEquation,
    trials: usize,
    horizon: usize,
    seed: u64,
    max_bits: u64,
) -> Result<PeriodicityReport> {
    if trials == 0 || horizon == 0 {
        return Err(Error::domain("need at least one trial and a positive horizon"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut periods = Vec::new();
    let mut aperiodic: Option<String> = None;
    for t in 0..trials {
        let init: Vec<Q> =
            (0..eq.k).map(|_| Q::new(rng.random_range(1..=97i64).into(), rng.random_range(1..=89i64).into())).collect();
        let mut xs = init.clone();
        let mut period = None;
        for n in 0..horizon {
            let Some(x) = eq.next(&xs[n..n + eq.k]) else {
                return Ok(PeriodicityReport {
                    verdict: Periodicity::UndefinedOrbit { trial: t, step: n + eq.k },
                    trial_periods: periods,
                });
            };
            if x.numer().bits() > max_bits || x.denom().bits() > max_bits {
                aperiodic.get_or_insert(format!("trial {t}: iterate exceeded {max_bits} bits at step {}", n + eq.k));
                break;
            }
            xs.push(x);
            let p = n + 1;
            if period.is_none() && xs[p..p + eq.k] == init[..] {
                period = Some(p);
            }
        }
        // once the window recurs the whole orbit repeats; confirm on the horizon
        if let Some(p) = period {
            if (0..xs.len() - p).any(|i| xs[i] != xs[i + p]) {
                period = None;
            }
        }
        if period.is_none() && aperiodic.is_none() {
            aperiodic = Some(format!("trial {t}: no recurrence within {horizon} steps"));
        }
        periods.push(period);
    }
    let verdict = match aperiodic {
        Some(reason) => Periodicity::AperiodicUpTo { horizon, reason },
        None => {
            let p = periods.iter().flatten().fold(1usize, |acc, p| acc.lcm(p));
            Periodicity::Periodic { p, empirical: true }
        }
    };
    Ok(PeriodicityReport { verdict, trial_periods: periods })
}

pub fn parse_biguint(s: &str) -> Result<BigUint> {
    s.trim().parse::<BigUint>().map_err(|e| Error::Parse(format!("bad natural number '{s}': {e}")))
}

pub fn to_u64(n: &BigUint) -> Option<u64> {
    n.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn persistence_examples() {
        assert_eq!(persistence(&b(7), 10).unwrap(), 0);
        assert_eq!(persistence(&b(10), 10).unwrap(), 1);
        assert_eq!(persistence(&b(0), 10).unwrap(), 0);
        let chain: Vec<u64> = persistence_chain(&b(68889), 10).unwrap().iter().map(|v| v.to_u64().unwrap()).collect();
        assert_eq!(chain, vec![68889, 27648, 2688, 768, 336, 54, 20, 0]);
        assert_eq!(persistence(&b(68889), 10).unwrap(), 7);
        assert!(persistence(&b(5), 1).is_err());
        // base 2: any number with a zero digit drops to 0
        assert_eq!(persistence(&b(0b101), 2).unwrap(), 1);
    }

    #[test]
    fn persistence_record_table() {
        let rec: Vec<u64> = persistence_records(7, 100_000).into_iter().map(|(_, n)| n.unwrap()).collect();
        assert_eq!(rec, vec![10, 25, 39, 77, 679, 6788, 68889]);
    }

    fn smooth_235_free(mut m: u64) -> bool {
        let mut e = [0u32; 4];
        for (i, p) in [2u64, 3, 5, 7].iter().enumerate() {
            while m % p == 0 {
                m /= p;
                e[i] += 1;
            }
        }
        m == 1 && !(e[0] > 0 && e[2] > 0)
    }

    #[test]
    fn persistent_products_factor_specially() {
        for n in 10..1_000_000u64 {
            if persistence_u64(n) <= 4 {
                continue;
            }
            let chain = persistence_chain(&b(n), 10).unwrap();
            for v in &chain[1..] {
                let v = v.to_u64().unwrap();
                if persistence_u64(v) > 3 {
                    assert!(smooth_235_free(v), "{n} → {v}");
                }
            }
        }
    }

    #[test]
    fn reverse_and_add() {
        assert_eq!(
            reverse_add_steps(&b(183), 10, 100).unwrap(),
            ReverseAdd::Palindrome { steps: 4, value: "13431".into() }
        );
        assert_eq!(
            reverse_add_steps(&b(89), 10, 100).unwrap(),
            ReverseAdd::Palindrome { steps: 24, value: "8813200023188".into() }
        );
        assert!(matches!(reverse_add_steps(&b(196), 10, 1000).unwrap(), ReverseAdd::NoneWithin { cap: 1000, .. }));
        assert!(matches!(reverse_add_steps(&b(0b10110), 2, 1000).unwrap(), ReverseAdd::NoneWithin { .. }));
        assert!(reverse_add_steps(&b(1), 10, 0).is_err());
    }

    #[test]
    fn binary_lychrel_pattern() {
        let orbit = reverse_add_orbit(&b(0b10110), 2, 4 * 30).unwrap();
        for m in 1..=30usize {
            let expect = format!("10{}01{}", "1".repeat(m + 1), "0".repeat(m + 1));
            assert_eq!(orbit[4 * m].to_str_radix(2), expect);
        }
    }

    #[test]
    fn singmaster_examples() {
        assert_eq!(singmaster_count(&b(120)).unwrap(), 6);
        assert_eq!(singmaster_count(&b(3003)).unwrap(), 8);
        assert_eq!(singmaster_count(&b(6)).unwrap(), 3);
        assert_eq!(singmaster_count(&b(2)).unwrap(), 1);
        assert_eq!(singmaster_count(&b(3)).unwrap(), 2);
        assert!(singmaster_count(&b(1)).is_err());
        // 3003 sits far beyond u64 rows only through C(N,1); a big N still works
        let big = binom(&b(10_000), 3);
        assert!(singmaster_count(&big).unwrap() >= 4);
    }

    #[test]
    fn singmaster_matches_brute_force() {
        let mut counts: HashMap<u64, u32> = HashMap::new();
        for r in 2..=2000u64 {
            let mut c = 1u64;
            for k in 1..=r / 2 {
                c = c * (r - k + 1) / k;
                if c > 1_000_000 {
                    break;
                }
                *counts.entry(c).or_default() += if 2 * k == r { 1 } else { 2 };
            }
        }
        for (n, c) in counts {
            let extra = if n > 2000 { 2 } else { 0 };
            assert_eq!(singmaster_count(&b(n)).unwrap(), c + extra, "N = {n}");
        }
    }

    #[test]
    fn difference_equation_periods() {
        for (eq, p) in [(DifferenceEquation::lyness(), 5), (DifferenceEquation::ratio(), 6), (DifferenceEquation::todd(), 8)] {
            let r = difference_periodicity(&eq, 5, 200, 1, 4096).unwrap();
            assert_eq!(r.verdict, Periodicity::Periodic { p, empirical: true });
        }
        for l in [2, 3] {
            let eq = DifferenceEquation::lyness().unfold(l);
            assert_eq!(eq.k, 2 * l);
            let r = difference_periodicity(&eq, 5, 200, 2, 4096).unwrap();
            assert_eq!(r.verdict, Periodicity::Periodic { p: 5 * l, empirical: true });
        }
    }

    #[test]
    fn aperiodic_and_invalid_equations() {
        // x_{n+2} = (1 + x_{n+1}) / (1 + x_n) is not periodic
        let eq = DifferenceEquation::from_ints(&[1, 0, 1], &[1, 1, 0]).unwrap();
        let r = difference_periodicity(&eq, 3, 60, 0, 100_000).unwrap();
        assert!(matches!(r.verdict, Periodicity::AperiodicUpTo { .. }));
        let r = difference_periodicity(&eq, 3, 500, 0, 512).unwrap();
        assert!(matches!(r.verdict, Periodicity::AperiodicUpTo { ref reason, .. } if reason.contains("bits")));
        assert!(DifferenceEquation::from_ints(&[1, 0, 1], &[0, 0, 1]).is_err());
        assert!(DifferenceEquation::from_ints(&[-1, 1], &[1, 0]).is_err());
        assert!(DifferenceEquation::from_ints(&[0, 0], &[0, 1]).is_err());
        let back = DifferenceEquation::from_json(&DifferenceEquation::todd().to_json()).unwrap();
        assert_eq!(back, DifferenceEquation::todd());
    }

    proptest! {
        #[test]
        fn digit_roundtrip(d in proptest::collection::vec(0u8..16, 1..40), base in prop::sample::select(vec![2u32, 10, 16])) {
            let d: Vec<u8> = d.into_iter().map(|x| x % base as u8).collect();
            let n = from_digits(&d, base).unwrap();
            let first = d.iter().position(|x| *x != 0);
            let expect = match first { Some(i) => d[i..].to_vec(), None => vec![0] };
            prop_assert_eq!(digits(&n, base).unwrap(), expect);
        }

        #[test]
        fn reverse_is_an_involution(n in 1u64..u64::MAX, base in prop::sample::select(vec![2u32, 10, 16])) {
            let n = b(n);
            prop_assume!(!(&n % base).is_zero());
            prop_assert_eq!(reverse(&reverse(&n, base).unwrap(), base).unwrap(), n);
        }
    }
}
