//! First-order Melnikov function of ẋ = y^{2k−1} + εP, ẏ = −x^{2ℓ−1} + εQ
//! around the ovals of H = x^{2ℓ}/(2ℓ) + y^{2k}/(2k).

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Mutex;

use serde::Serialize;

use crate::algebra::{q_from_f64, Poly, Q};
use crate::error::{Error, Result};
use crate::flow::{integrate, Event, IntegrateOptions, VectorField};
use crate::numeric;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MelnikovSpec {
    pub k: u32,
    pub l: u32,
    /// a₁..a_{2k−1}
    pub a: Vec<f64>,
    /// b₁..b_{2ℓ−1}
    pub b: Vec<f64>,
}

impl MelnikovSpec {
    pub fn new(k: u32, l: u32, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if !(k > l && l >= 1) {
            return Err(Error::domain(format!("need k > l >= 1, got k = {k}, l = {l}")));
        }
        if a.len() != (2 * k - 1) as usize || b.len() != (2 * l - 1) as usize {
            return Err(Error::domain(format!(
                "expected {} a-coefficients and {} b-coefficients",
                2 * k - 1,
                2 * l - 1
            )));
        }
        Ok(MelnikovSpec { k, l, a, b })
    }

    /// Degree of the unperturbed ẋ component.
    pub fn n(&self) -> u32 {
        2 * self.k - 1
    }

    pub fn m(&self) -> u32 {
        2 * self.l - 1
    }

    /// Hamiltonian H = x^{2ℓ}/(2ℓ) + y^{2k}/(2k).
    pub fn hamiltonian(&self, x: f64, y: f64) -> f64 {
        let (k, l) = (self.k as i32, self.l as i32);
        x.powi(2 * l) / (2 * l) as f64 + y.powi(2 * k) / (2 * k) as f64
    }

    /// Perturbation components (R, S) = (Σ a_j/j y^{2k−1−j} x^j, Σ b_j/j x^{2ℓ−1−j} y^j).
    pub fn perturbation(&self) -> (Poly, Poly) {
        let mut r = Poly::zero(2);
        for (i, &a) in self.a.iter().enumerate() {
            let j = i as u32 + 1;
            let c = q_from_f64(a).unwrap() / Q::from_integer(j.into());
            r = &r + &Poly::monomial(vec![j, 2 * self.k - 1 - j], c);
        }
        let mut s = Poly::zero(2);
        for (i, &b) in self.b.iter().enumerate() {
            let j = i as u32 + 1;
            let c = q_from_f64(b).unwrap() / Q::from_integer(j.into());
            s = &s + &Poly::monomial(vec![2 * self.l - 1 - j, j], c);
        }
        (r, s)
    }

    /// The perturbed field for a given ε.
    pub fn perturbed_field(&self, eps: f64) -> VectorField {
        let (r, s) = self.perturbation();
        let e = q_from_f64(eps).unwrap();
        let x = Poly::var(0, 2);
        let y = Poly::var(1, 2);
        let p = &y.pow(2 * self.k - 1) + &r.scale(&e);
        let q = &(-x.pow(2 * self.l - 1)) + &s.scale(&e);
        VectorField::planar(p, q).with_name("melnikov-perturbed")
    }

    /// Inverse of [`melnikov_poly`]: coefficients a, b realising the given
    /// c₀..c_{k+ℓ−1} (even-index a, b are set to zero).
    pub fn from_c(k: u32, l: u32, c: &[f64], tol: f64) -> Result<Self> {
        if c.len() != (k + l) as usize {
            return Err(Error::domain(format!("expected {} c-coefficients", k + l)));
        }
        let mut a = vec![0.0; (2 * k - 1) as usize];
        let mut b = vec![0.0; (2 * l - 1) as usize];
        for i in 0..k {
            a[2 * i as usize] = c[(l + i) as usize] / i_rs(k, l, i, k - i - 1, tol);
        }
        for i in 0..l {
            b[2 * i as usize] = c[(l - 1 - i) as usize] / i_rs(k, l, l - i - 1, i, tol);
        }
        MelnikovSpec::new(k, l, a, b)
    }
}

/// I_{r,s} = ∬_{G(1)} x^{2r} y^{2s} dx dy over G(1) = {H ≤ 1}.
///
/// Outer adaptive quadrature in x (after x = X(1 − v^{2k}), which removes
/// the square-root-type endpoint singularity), inner integral in closed form.
pub fn i_rs(k: u32, l: u32, r: u32, s: u32, tol: f64) -> f64 {
    assert!(k > l && l >= 1, "need k > l >= 1");
    region_moment(k, l, r, s, tol)
}

// Same integral without the k > ℓ restriction.
fn region_moment(k: u32, l: u32, r: u32, s: u32, tol: f64) -> f64 {
    let (kf, lf) = (k as f64, l as f64);
    let xmax = (2.0 * lf).powf(1.0 / (2.0 * lf));
    let p = 2.0 * kf;
    let integrand = |v: f64| {
        let u = v.powf(p);
        let x = xmax * (1.0 - u);
        let h = (1.0 - x.powi(2 * l as i32) / (2.0 * lf)).max(0.0);
        let y = (2.0 * kf * h).powf(1.0 / (2.0 * kf));
        let dx = xmax * p * v.powf(p - 1.0);
        x.powi(2 * r as i32) * 2.0 * y.powi(2 * s as i32 + 1) / (2 * s + 1) as f64 * dx
    };
    let (v, _) = numeric::integrate(integrand, 0.0, 1.0, 0.0, tol.max(1e-15));
    2.0 * v
}

/// Memoises I_{r,s}; persisted as JSON when a directory is configured.
#[derive(Default)]
pub struct IrsCache {
    dir: Option<PathBuf>,
    values: Mutex<BTreeMap<String, f64>>,
}

impl IrsCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        let mut values = BTreeMap::new();
        if let Some(d) = &dir {
            if let Ok(text) = std::fs::read_to_string(d.join("irs_cache.json")) {
                values = serde_json::from_str(&text).unwrap_or_default();
            }
        }
        IrsCache { dir, values: Mutex::new(values) }
    }

    fn persist(&self, values: &BTreeMap<String, f64>) {
        if let Some(d) = &self.dir {
            if std::fs::create_dir_all(d).is_ok() {
                if let Ok(text) = serde_json::to_string_pretty(values) {
                    let _ = std::fs::write(d.join("irs_cache.json"), text);
                }
            }
        }
    }
}

pub fn i_rs_cached(cache: &IrsCache, k: u32, l: u32, r: u32, s: u32, tol: f64) -> f64 {
    let key = format!("k{k}_l{l}_r{r}_s{s}_tol{tol:e}");
    if let Some(v) = cache.values.lock().unwrap().get(&key) {
        return *v;
    }
    let v = i_rs(k, l, r, s, tol);
    let mut map = cache.values.lock().unwrap();
    map.insert(key, v);
    cache.persist(&map);
    v
}

#[derive(Clone, Debug, Serialize)]
pub struct MelnikovPoly {
    pub spec: MelnikovSpec,
    /// c₀..c_{k+ℓ−1}: coefficients of the polynomial in ρ².
    pub c: Vec<f64>,
}

impl MelnikovPoly {
    /// M(h) = w^{2kℓ} ρ^{1−2ℓ} Σ c_j ρ^{2j}, with h = w^{2kℓ}, ρ = w^{k−ℓ}.
    pub fn eval(&self, h: f64) -> f64 {
        let (k, l) = (self.spec.k as f64, self.spec.l as f64);
        let w = h.powf(1.0 / (2.0 * k * l));
        let rho = w.powf(k - l);
        let poly: f64 = self.c.iter().rev().fold(0.0, |acc, c| acc * rho * rho + c);
        h * rho.powf(1.0 - 2.0 * l) * poly
    }

    /// Converts a positive root ρ² of the c-polynomial into the level h.
    pub fn level_of_rho2(&self, rho2: f64) -> f64 {
        let (k, l) = (self.spec.k as f64, self.spec.l as f64);
        let w = rho2.sqrt().powf(1.0 / (k - l));
        w.powf(2.0 * k * l)
    }
}

/// Assembles c_j: c_{ℓ+i} = a_{2i+1} I_{i,k−i−1}, c_{ℓ−1−i} = b_{2i+1} I_{ℓ−i−1,i}.
pub fn melnikov_poly(spec: &MelnikovSpec, cache: &IrsCache, tol: f64) -> MelnikovPoly {
    let (k, l) = (spec.k, spec.l);
    let mut c = vec![0.0; (k + l) as usize];
    for i in 0..k {
        let a = spec.a[2 * i as usize];
        if a != 0.0 {
            c[(l + i) as usize] = a * i_rs_cached(cache, k, l, i, k - i - 1, tol);
        }
    }
    for i in 0..l {
        let b = spec.b[2 * i as usize];
        if b != 0.0 {
            c[(l - 1 - i) as usize] = b * i_rs_cached(cache, k, l, l - i - 1, i, tol);
        }
    }
    MelnikovPoly { spec: spec.clone(), c }
}

/// Melnikov function evaluated by quadrature: integrates S·ẋ − R·ẏ along
/// one turn of the unperturbed oval H = h through (x₀, 0).
pub fn melnikov_direct(spec: &MelnikovSpec, h: f64, tol: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain("energy level must be positive"));
    }
    let (r, s) = spec.perturbation();
    let x0 = (2.0 * spec.l as f64 * h).powf(1.0 / (2.0 * spec.l as f64));
    let base = spec.perturbed_field(0.0);
    let field = (3usize, |_t: f64, x: &[f64], out: &mut [f64]| {
        let f = base.eval_vec(&x[..2]);
        out[0] = f[0];
        out[1] = f[1];
        out[2] = s.eval_f64(&x[..2]) * f[0] - r.eval_f64(&x[..2]) * f[1];
    });
    // clockwise flow: stop when the orbit comes back down onto the positive x-axis
    let ev = [Event::new(|_, x: &[f64]| if x[0] > 0.0 { x[1] } else { 1.0 }, -1, true)];
    let tr = integrate(&field, &[x0, 0.0, 0.0], 0.0, 1e3, &IntegrateOptions::with_tol(tol), &ev)?;
    if tr.terminated_by != Some(0) {
        return Err(Error::numeric("oval did not close"));
    }
    Ok(tr.final_state[2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::{find_cycles, ReturnOptions, Section};
    use statrs::function::gamma::gamma;

    /// Closed form via the Dirichlet integral.
    fn i_rs_oracle(k: u32, l: u32, r: u32, s: u32) -> f64 {
        let (k, l) = (k as f64, l as f64);
        let al = (2.0 * r as f64 + 1.0) / (2.0 * l);
        let be = (2.0 * s as f64 + 1.0) / (2.0 * k);
        4.0 * (2.0 * l).powf(al) / (2.0 * l) * (2.0 * k).powf(be) / (2.0 * k) * gamma(al) * gamma(be)
            / gamma(al + be + 1.0)
    }

    /// ∮ S dx − R dy along the oval through (x0, 0), following the
    /// unperturbed flow for one turn.
    fn line_integral(spec: &MelnikovSpec, h: f64) -> f64 {
        melnikov_direct(spec, h, 1e-12).unwrap()
    }

    #[test]
    fn i_rs_matches_closed_form() {
        for (k, l, r, s) in [(2, 1, 0, 0), (2, 1, 0, 1), (2, 1, 1, 0), (3, 2, 1, 2), (4, 1, 2, 3)] {
            let v = i_rs(k, l, r, s, 1e-13);
            let o = i_rs_oracle(k, l, r, s);
            assert!((v / o - 1.0).abs() < 1e-10, "{k} {l} {r} {s}: {v} vs {o}");
        }
    }

    #[test]
    fn area_matches_one_dimensional_reduction() {
        let sq2 = 2f64.sqrt();
        let (area, _) = numeric::integrate(
            |x| 2.0 * (4.0 * (1.0 - x * x / 2.0)).max(0.0).powf(0.25),
            -sq2,
            sq2,
            1e-13,
            1e-13,
        );
        assert!((i_rs(2, 1, 0, 0, 1e-13) / area - 1.0).abs() < 1e-8);
    }

    #[test]
    fn swapping_axes_preserves_moments() {
        for (k, l, r, s) in [(2, 1, 0, 0), (3, 1, 1, 2), (3, 2, 2, 0)] {
            let a = i_rs(k, l, r, s, 1e-13);
            let b = region_moment(l, k, s, r, 1e-13);
            assert!((a / b - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn higher_moments_are_bounded() {
        let xmax2 = 2f64.sqrt().powi(2);
        for s in 0..3 {
            for r in 0..3 {
                assert!(i_rs(2, 1, r + 1, s, 1e-12) < i_rs(2, 1, r, s, 1e-12) * xmax2);
            }
        }
    }

    #[test]
    fn coefficients_scale_linearly() {
        let spec = MelnikovSpec::new(3, 1, vec![0.3, 0.1, -0.8, 0.0, 1.1], vec![-0.4]).unwrap();
        let m = melnikov_poly(&spec, &IrsCache::default(), 1e-12);
        let lam = 2.75;
        let scaled = MelnikovSpec {
            a: spec.a.iter().map(|v| v * lam).collect(),
            b: spec.b.iter().map(|v| v * lam).collect(),
            ..spec.clone()
        };
        let ms = melnikov_poly(&scaled, &IrsCache::default(), 1e-12);
        for (c, cs) in m.c.iter().zip(&ms.c) {
            assert!((cs - lam * c).abs() <= 1e-14 * cs.abs().max(1e-300));
        }
    }

    #[test]
    fn cache_persists_to_disk() {
        let dir = tempfile::tempdir().unwrap();
        let cache = IrsCache::new(Some(dir.path().to_path_buf()));
        let v = i_rs_cached(&cache, 2, 1, 0, 1, 1e-12);
        let reloaded = IrsCache::new(Some(dir.path().to_path_buf()));
        assert_eq!(reloaded.values.lock().unwrap().len(), 1);
        assert_eq!(i_rs_cached(&reloaded, 2, 1, 0, 1, 1e-12), v);
    }

    #[test]
    fn zero_coefficients_give_zero_polynomial() {
        let spec = MelnikovSpec::new(2, 1, vec![0.0; 3], vec![0.0]).unwrap();
        let m = melnikov_poly(&spec, &IrsCache::default(), 1e-12);
        assert!(m.c.iter().all(|c| *c == 0.0));
        assert!(MelnikovSpec::new(1, 1, vec![0.0], vec![0.0]).is_err());
        assert!(MelnikovSpec::new(2, 1, vec![0.0; 2], vec![0.0]).is_err());
    }

    #[test]
    fn formula_matches_line_integral() {
        let spec = MelnikovSpec::new(2, 1, vec![1.0, 0.0, 0.0], vec![0.0]).unwrap();
        let m = melnikov_poly(&spec, &IrsCache::default(), 1e-13);
        assert_eq!(m.c.iter().filter(|c| **c != 0.0).count(), 1);
        for h in [0.5, 1.0, 2.0] {
            let direct = line_integral(&spec, h);
            assert!((m.eval(h) / direct - 1.0).abs() < 1e-6, "h = {h}: {} vs {direct}", m.eval(h));
        }
        // A mixed specification exercises every index.
        let spec = MelnikovSpec::new(3, 2, vec![0.7, 0.0, -1.3, 0.0, 0.4], vec![0.9, 0.0, -0.6]).unwrap();
        let m = melnikov_poly(&spec, &IrsCache::default(), 1e-13);
        for h in [0.3, 1.0, 2.5] {
            let direct = line_integral(&spec, h);
            assert!((m.eval(h) - direct).abs() < 1e-6 * direct.abs().max(1.0), "h = {h}");
        }
    }

    #[test]
    fn prescribed_zeros_produce_cycles() {
        // (ρ² − 1)(ρ² − 4) = ρ⁴ − 5ρ² + 4
        let spec = MelnikovSpec::from_c(2, 1, &[4.0, -5.0, 1.0], 1e-13).unwrap();
        let m = melnikov_poly(&spec, &IrsCache::default(), 1e-13);
        assert!((m.c[0] - 4.0).abs() < 1e-12 && (m.c[1] + 5.0).abs() < 1e-12);
        let levels = [m.level_of_rho2(1.0), m.level_of_rho2(4.0)];
        assert!((levels[0] - 1.0).abs() < 1e-12 && (levels[1] - 16.0).abs() < 1e-9);
        let vf = spec.perturbed_field(1e-3);
        let sec = Section::positive_x((0.2, 8.0));
        let grid: Vec<f64> = (1..=30).map(|i| 0.2 + 0.23 * i as f64).collect();
        let res = find_cycles(&vf, &sec, &grid, &ReturnOptions { tol: 1e-12, ..Default::default() });
        assert_eq!(res.cycles.len(), 2, "{:?}", res.cycles);
        // H = x²/2 on the x-axis
        let predicted = [2f64.sqrt(), 32f64.sqrt()];
        for (c, p) in res.cycles.iter().zip(predicted) {
            assert!((c.r_star - p).abs() < 0.05, "{} vs {p}", c.r_star);
        }
    }
}
