use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::Normalization;
use crate::error::{invalid, Error, Result};
use crate::field::Field;
use crate::point::{dist, dot, Point};
use crate::quadrature::{gauss_on, sphere_rule};

/// `J₊ = ∫₀^∞ (1 - cos ρ) ρ^{-1-2s} dρ`.
fn cosine_integral(s: f64) -> f64 {
    // r = r_split τ^β flattens r^{1-2s}; a steeper map only samples the round-off of the second difference
    let beta = 1.0 / (2.0 - 2.0 * s);
    // [0, 1] with ρ = τ^β
    let head: f64 = gauss_on(0.0, 1.0, 64)
        .into_iter()
        .map(|(tau, w)| {
            let rho = tau.powf(beta);
            let jac = beta * tau.powf(beta - 1.0);
            // 1 - cos ρ = 2 sin²(ρ/2) keeps precision for small ρ
            w * 2.0 * (0.5 * rho).sin().powi(2) * rho.powf(-1.0 - 2.0 * s) * jac
        })
        .sum();
    let k = 400usize;
    let t = 2.0 * PI * k as f64;
    let mut body = 0.0;
    // [1, π] then half periods up to T
    let mut edges = vec![1.0];
    edges.extend((1..=2 * k).map(|j| j as f64 * PI));
    for e in edges.windows(2) {
        for (rho, w) in gauss_on(e[0], e[1], 20) {
            body += w * (1.0 - rho.cos()) * rho.powf(-1.0 - 2.0 * s);
        }
    }
    let a = 1.0 + 2.0 * s;
    let tail = t.powf(-2.0 * s) / (2.0 * s)
        - (a * t.powf(-a - 1.0) - a * (a + 1.0) * (a + 2.0) * t.powf(-a - 3.0));
    head + body + tail
}

/// `C_{s,n} = (∫_{R^n} (1 - cos(a ζ₁)) / |ζ|^{n+2s} dζ)^{-1}` with `a = 1` (angular) or `a = 2π`.
///
/// The radial integral is done numerically with an analytic tail; the angular moment
/// `∫_{S^{n-1}} |ω₁|^{2s}` is a Beta integral.
pub fn normalization_const(s: f64, n: usize, convention: Normalization) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid("normalization constant needs s in (0, 1)"));
    }
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize, bool), f64>>> = OnceLock::new();
    let key = (s.to_bits(), n, convention == Normalization::PaperCycles);
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return Ok(*v);
    }
    let nf = n as f64;
    let moment = 2.0 * PI.powf((nf - 1.0) / 2.0) * gamma(s + 0.5) / gamma(nf / 2.0 + s);
    let a = match convention {
        Normalization::Angular => 1.0,
        Normalization::PaperCycles => 2.0 * PI,
    };
    let c = 1.0 / (moment * a.powf(2.0 * s) * cosine_integral(s));
    cache.lock().unwrap().insert(key, c);
    Ok(c)
}

/// Where the integrand of [`frac_laplacian`] loses smoothness.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum Kinks {
    #[default]
    None,
    /// Distances `|z|` at which `u(x ± z)` is non-smooth for every direction.
    Radii(Vec<f64>),
    /// `u` is non-smooth across the sphere `|y - center| = radius`.
    Sphere { center: Point, radius: f64 },
}

/// Quadrature settings for [`frac_laplacian`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracLapConfig {
    /// Inner radius; `None` picks `0.1·min(1, distance to the nearest kink)`.
    pub r_split: Option<f64>,
    pub inner_order: usize,
    pub outer_order: usize,
    /// Radial cutoff beyond which the analytic power-law tail is used.
    pub r_cut: f64,
    /// Longest outer panel.
    pub max_panel: f64,
    /// Gauss points per polar angle of the sphere rule (`n >= 2`).
    pub sphere_order: usize,
    /// Mean of `u` far from `x`; estimated on `[r_cut, 2 r_cut]` when absent.
    pub far_mean: Option<f64>,
    pub kinks: Kinks,
    pub normalization: Normalization,
}

impl Default for FracLapConfig {
    fn default() -> Self {
        FracLapConfig {
            r_split: None,
            inner_order: 48,
            outer_order: 16,
            r_cut: 1000.0,
            max_panel: 0.5,
            sphere_order: 16,
            far_mean: None,
            kinks: Kinks::None,
            normalization: Normalization::Angular,
        }
    }
}

impl FracLapConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(r) = self.r_split {
            if !(r > 0.0) {
                return Err(invalid("r_split must be positive"));
            }
        }
        if self.inner_order < 4 || self.outer_order < 4 {
            return Err(invalid("quadrature orders must be at least 4"));
        }
        if !(self.r_cut > 0.0) || !(self.max_panel > 0.0) {
            return Err(invalid("r_cut and max_panel must be positive"));
        }
        Ok(())
    }
}

fn ray_sphere(x: &[f64], w: &[f64], c: &[f64], r: f64) -> Vec<f64> {
    let f: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
    let b = dot(&f, w);
    let disc = b * b - (dot(&f, &f) - r * r);
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    [-b - sq, -b + sq].into_iter().filter(|t| *t > 0.0).collect()
}

/// `(-Δ)^s u(x) = C_{s,n} · ½ ∫ (2u(x) - u(x+z) - u(x-z)) / |z|^{n+2s} dz`.
pub fn frac_laplacian(u: &dyn Field, s: f64, x: &[f64], cfg: &FracLapConfig) -> Result<f64> {
    cfg.validate()?;
    let n = x.len();
    if u.dim() != n {
        return Err(invalid("field and point dimensions differ"));
    }
    let c = normalization_const(s, n, cfg.normalization)?;
    if let Kinks::Sphere { center, radius } = &cfg.kinks {
        if (dist(x, center) - radius).abs() <= 1e-12 * radius.max(1.0) {
            return Err(Error::Domain("evaluation point lies on a kink of u".into()));
        }
    }
    if let Kinks::Radii(r) = &cfg.kinks {
        if r.iter().any(|v| !(*v > 0.0)) {
            return Err(invalid("kink radii must be positive"));
        }
    }
    let ux = u.eval(x);
    let sphere = sphere_rule(n, cfg.sphere_order);
    let inner = gauss_on(0.0, 1.0, cfg.inner_order);
    let outer = gauss_on(0.0, 1.0, cfg.outer_order);
    // r = r_split τ^β flattens r^{1-2s}; a steeper map only samples the round-off of the second difference
    let beta = 1.0 / (2.0 - 2.0 * s);
    let mut xp = Point::zeros(n);
    let mut xm = Point::zeros(n);
    let mut second = |w: &[f64], r: f64| {
        for i in 0..n {
            xp[i] = x[i] + r * w[i];
            xm[i] = x[i] - r * w[i];
        }
        2.0 * ux - u.eval(&xp) - u.eval(&xm)
    };

    let mut total = 0.0;
    for (w, ww) in &sphere {
        let mut breaks: Vec<f64> = match &cfg.kinks {
            Kinks::None => Vec::new(),
            Kinks::Radii(r) => r.clone(),
            Kinks::Sphere { center, radius } => {
                let neg: Vec<f64> = w.iter().map(|v| -v).collect();
                let mut b = ray_sphere(x, w, center, *radius);
                b.extend(ray_sphere(x, &neg, center, *radius));
                b
            }
        };
        breaks.retain(|b| *b < cfg.r_cut);
        breaks.sort_by(f64::total_cmp);
        let first = breaks.first().copied().unwrap_or(f64::INFINITY);
        let r_split = cfg
            .r_split
            .unwrap_or(0.1 * first.min(1.0))
            .min(0.5 * first)
            .min(0.5 * cfg.r_cut);

        let mut line = 0.0;
        for &(tau, wt) in &inner {
            let r = r_split * tau.powf(beta);
            let jac = r_split * beta * tau.powf(beta - 1.0);
            if r > 0.0 {
                line += wt * jac * second(w, r) * r.powf(-1.0 - 2.0 * s);
            }
        }

        let mut edges = vec![r_split];
        let mut len = r_split;
        let mut bi = 0;
        while *edges.last().unwrap() < cfg.r_cut {
            let last = *edges.last().unwrap();
            len = (2.0 * len).min(cfg.max_panel);
            let mut next = (last + len).min(cfg.r_cut);
            while bi < breaks.len() && breaks[bi] <= last {
                bi += 1;
            }
            if bi < breaks.len() && breaks[bi] < next {
                next = breaks[bi];
            }
            edges.push(next);
        }
        for e in edges.windows(2) {
            let (a, b) = (e[0], e[1]);
            for &(t, wt) in &outer {
                let r = a + (b - a) * t * t * (3.0 - 2.0 * t);
                let jac = (b - a) * 6.0 * t * (1.0 - t);
                line += wt * jac * second(w, r) * r.powf(-1.0 - 2.0 * s);
            }
        }

        let m = match cfg.far_mean {
            Some(m) => m,
            None => {
                let mut acc = 0.0;
                let mut wsum = 0.0;
                let panels = (cfg.r_cut / cfg.max_panel).ceil().max(1.0) as usize;
                let h = cfg.r_cut / panels as f64;
                for j in 0..panels {
                    let a = cfg.r_cut + j as f64 * h;
                    for (r, wt) in gauss_on(a, a + h, 4) {
                        acc += wt * (2.0 * ux - second(w, r));
                        wsum += 2.0 * wt;
                    }
                }
                acc / wsum
            }
        };
        line += (2.0 * ux - 2.0 * m) * cfg.r_cut.powf(-2.0 * s) / (2.0 * s);
        total += ww * line;
    }
    Ok(c * 0.5 * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    fn closed_form(s: f64, n: usize) -> f64 {
        let nf = n as f64;
        s * 4f64.powf(s) * gamma(nf / 2.0 + s) / (PI.powf(nf / 2.0) * gamma(1.0 - s))
    }

    #[test]
    fn constants_match_closed_form() {
        for n in [1, 2, 3, 5] {
            for s in [0.1, 0.3, 0.5, 0.75, 0.95] {
                let v = normalization_const(s, n, Normalization::Angular).unwrap();
                let e = closed_form(s, n);
                assert!((v / e - 1.0).abs() < 1e-9, "n={n} s={s}: {v} vs {e}");
            }
        }
        let p = normalization_const(0.5, 1, Normalization::PaperCycles).unwrap();
        assert!((p - 1.0 / (2.0 * PI * PI)).abs() < 1e-12);
        let a = normalization_const(0.5, 1, Normalization::Angular).unwrap();
        assert!((a - 1.0 / PI).abs() < 1e-12);
        let s = 0.3;
        let r = normalization_const(s, 2, Normalization::Angular).unwrap()
            / normalization_const(s, 2, Normalization::PaperCycles).unwrap();
        assert!((r - (2.0 * PI).powf(2.0 * s)).abs() < 1e-10);
        assert!(normalization_const(1.0, 1, Normalization::Angular).is_err());
    }

    #[test]
    fn constant_field_vanishes() {
        let u = FnField::new(2, |_: &[f64]| 3.0);
        let v = frac_laplacian(&u, 0.4, &[0.1, 0.2], &FracLapConfig::default()).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn cosine_is_an_eigenfunction_in_2d() {
        let u = FnField::new(2, |x: &[f64]| x[0].cos());
        let cfg = FracLapConfig {
            far_mean: Some(0.0),
            max_panel: 1.0,
            r_cut: 400.0,
            ..FracLapConfig::default()
        };
        let x = [0.3, -0.1];
        let v = frac_laplacian(&u, 0.6, &x, &cfg).unwrap();
        assert!((v - x[0].cos()).abs() < 1e-3, "{v}");
    }

    #[test]
    fn kink_point_rejected() {
        let u = FnField::new(1, |x: &[f64]| (1.0 - x[0] * x[0]).max(0.0).sqrt());
        let cfg = FracLapConfig {
            kinks: Kinks::Sphere {
                center: Point::zeros(1),
                radius: 1.0,
            },
            ..FracLapConfig::default()
        };
        assert!(frac_laplacian(&u, 0.5, &[1.0], &cfg).is_err());
    }
}
