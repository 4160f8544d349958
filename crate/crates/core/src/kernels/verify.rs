use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::Kernel;
use crate::error::{invalid, Error, Result};
use crate::geometry::{direction_grid, kelvin_point, radial_extent, DomainKind, DomainSpec};
use crate::point::{dist, dot, norm, Point};

/// Kernel assumptions that can be probed numerically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    /// Positivity and the upper bound by the whole-space profile.
    H1,
    /// Far-field decay exponent along interior rays.
    H2,
    /// Kelvin comparison for dilated spheres (exterior-type domains).
    H3,
    /// Decay exponent towards the vertex.
    H2t,
    /// Kelvin comparison for shrinking spheres (star-shaped domains).
    H3t,
}

impl std::str::FromStr for Hypothesis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H1" => Ok(Hypothesis::H1),
            "H2" => Ok(Hypothesis::H2),
            "H3" => Ok(Hypothesis::H3),
            "H2t" => Ok(Hypothesis::H2t),
            "H3t" => Ok(Hypothesis::H3t),
            other => Err(invalid(format!("unknown hypothesis {other}"))),
        }
    }
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::H1 => "H1",
            Hypothesis::H2 => "H2",
            Hypothesis::H3 => "H3",
            Hypothesis::H2t => "H2t",
            Hypothesis::H3t => "H3t",
        }
    }
}

/// Sampling controls for [`verify_hypotheses`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    /// Margins at or above `-tolerance` pass.
    pub tolerance: f64,
    pub rays: usize,
    /// Radii for the far-field fit.
    pub far_radii: (f64, f64),
    /// Radii for the near-vertex fit, as fractions of the domain's length scale.
    pub near_radii: (f64, f64),
    /// Allowed deviation of the fitted exponent.
    pub theta_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            samples: 1000,
            seed: 0,
            tolerance: 1e-12,
            rays: 8,
            far_radii: (1e2, 1e4),
            near_radii: (1e-4, 1e-2),
            theta_tol: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub hypothesis: String,
    pub min_margin: f64,
    pub theta_fit: Option<f64>,
    pub theta_expected: Option<f64>,
    /// Fitted constant of the upper bound (H1) or worst-ray slope (H2, H2t).
    pub constant_fit: Option<f64>,
    /// Minimum of the second comparison inequality (H3, H3t).
    pub second_margin: Option<f64>,
    pub samples: usize,
    pub pass: bool,
}

fn is_exterior_type(d: &DomainSpec) -> bool {
    matches!(
        d.kind,
        DomainKind::FreeSpace
            | DomainKind::HalfSpaceK { .. }
            | DomainKind::ExteriorBallK { .. }
            | DomainKind::HalfLine { .. }
    )
}

/// Cone index `k` of the domain's cross-section at its anchor (`0` for full spheres).
fn cone_k(d: &DomainSpec) -> usize {
    match &d.kind {
        DomainKind::HalfSpaceK { k, .. }
        | DomainKind::BallK { k, .. }
        | DomainKind::ExteriorBallK { k, .. } => *k,
        DomainKind::HalfLine { .. } => 1,
        _ => 0,
    }
}

/// Kernel with the convention `K = 0` off the closed domain.
fn kval(kern: &dyn Kernel, x: &[f64], y: &[f64]) -> f64 {
    let d = kern.domain();
    let tol = 1e-12 * d.length_scale().max(1.0);
    if !d.contains_closed(x, tol) || !d.contains_closed(y, tol) || dist(x, y) == 0.0 {
        return 0.0;
    }
    kern.eval_raw(x, y)
}

/// Interior directions at the anchor, kept away from the cross-section's boundary.
fn interior_rays(d: &DomainSpec, count: usize) -> Vec<Point> {
    let n = d.dim;
    let k = cone_k(d);
    let frame = d.frame();
    if n == 1 {
        return match &d.kind {
            DomainKind::HalfLine { direction, .. } => vec![Point::new(&[*direction])],
            _ => vec![Point::new(&[1.0])],
        };
    }
    let margin = if k == 0 { -1.0 } else { 0.3 / (k as f64).sqrt() };
    let cand: Vec<Point> = direction_grid(n, 4096)
        .into_iter()
        .filter(|w| frame.axes[..k].iter().all(|a| dot(a, w) > margin))
        .collect();
    if cand.len() <= count {
        return cand;
    }
    (0..count).map(|i| cand[i * cand.len() / count].clone()).collect()
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Exponent `θ` with `K(x0, P + tω) ≈ C t^{sign·θ}` by least squares on `ln K` vs `ln t`
/// over `t ∈ [t0, t1]` (9 log-spaced radii). `sign = -1` for decay at infinity.
pub fn fit_theta(kern: &dyn Kernel, x0: &[f64], p: &[f64], dir: &[f64], t0: f64, t1: f64, sign: f64) -> Option<f64> {
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for i in 0..9 {
        let t = t0 * (t1 / t0).powf(i as f64 / 8.0);
        let y: Vec<f64> = p.iter().zip(dir).map(|(a, b)| a + t * b).collect();
        let v = kval(kern, x0, &y);
        if !(v > 0.0) {
            return None;
        }
        lx.push(t.ln());
        ly.push(v.ln());
    }
    Some(sign * fit_slope(&lx, &ly))
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Point {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let l = norm(&v);
        if l > 1e-8 {
            return Point(v.iter().map(|c| c / l).collect());
        }
    }
}

/// A point of the open domain at distance `r` from `p`, or `None` after 200 attempts.
fn sample_at_radius(rng: &mut ChaCha8Rng, d: &DomainSpec, p: &[f64], r: f64) -> Option<Point> {
    for _ in 0..200 {
        let w = random_direction(rng, d.dim);
        let x = Point(p.iter().zip(w.iter()).map(|(a, b)| a + r * b).collect());
        if d.contains(&x) {
            return Some(x);
        }
    }
    None
}

fn log_uniform(rng: &mut ChaCha8Rng, a: f64, b: f64) -> f64 {
    a * (b / a).powf(rng.random::<f64>())
}

/// Numerically probes one kernel hypothesis.
///
/// `H3` on a domain that is star-shaped about its anchor (balls, `1/2^k`-balls, intervals) is
/// checked in its shrinking-sphere form and reported as `H3t`; likewise `H2` falls back to `H2t`
/// on bounded domains.
pub fn verify_hypotheses(kern: &dyn Kernel, which: Hypothesis, cfg: &VerifyConfig) -> Result<HypothesisReport> {
    let d = kern.domain().clone();
    let n = d.dim;
    let s = kern.order();
    let e = n as f64 - 2.0 * s;
    let p = d.anchor();
    let scale = d.length_scale();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let which = match which {
        Hypothesis::H3 if !is_exterior_type(&d) => Hypothesis::H3t,
        Hypothesis::H2 if d.is_bounded() => Hypothesis::H2t,
        w => w,
    };
    let (d_omega, rho_omega) = radial_extent(&d, &p);
    let k = cone_k(&d) as f64;
    let gamma_exp = if s.fract() == 0.0 { k } else { s * k };

    let mut report = HypothesisReport {
        hypothesis: which.name().to_string(),
        min_margin: f64::INFINITY,
        theta_fit: None,
        theta_expected: None,
        constant_fit: None,
        second_margin: None,
        samples: 0,
        pass: false,
    };
    // sampling radii for generic points
    let (r_lo, r_hi) = if d.is_bounded() {
        (d_omega.max(1e-3 * scale), rho_omega)
    } else {
        (d_omega.max(1e-2 * scale) * 1.001, (d_omega.max(scale)) * 100.0)
    };

    match which {
        Hypothesis::H1 => {
            let critical = e.abs() < 1e-14;
            let mut sup: f64 = 0.0;
            let mut min_k = f64::INFINITY;
            let mut count = 0;
            for _ in 0..cfg.samples {
                let (ra, rb) = (log_uniform(&mut rng, r_lo, r_hi), log_uniform(&mut rng, r_lo, r_hi));
                let (Some(x), Some(y)) = (
                    sample_at_radius(&mut rng, &d, &p, ra),
                    sample_at_radius(&mut rng, &d, &p, rb),
                ) else {
                    continue;
                };
                let v = kval(kern, &x, &y);
                count += 1;
                min_k = min_k.min(v);
                let bound = if critical {
                    // C0 with C1 = 1: K ≤ ln[C0 (1+|x-P|)(1+|y-P|)/|x-y|]
                    let a = (1.0 + dist(&x, &p)) * (1.0 + dist(&y, &p)) / dist(&x, &y);
                    v.exp() / a
                } else {
                    v * dist(&x, &y).powf(e)
                };
                sup = sup.max(bound);
            }
            if count == 0 {
                return Err(Error::Domain("empty admissible set".into()));
            }
            report.samples = count;
            report.min_margin = min_k;
            report.constant_fit = Some(sup);
            report.pass = min_k > 0.0 && sup.is_finite();
        }
        Hypothesis::H2 | Hypothesis::H2t => {
            let far = which == Hypothesis::H2;
            let expected = if far { e + gamma_exp } else { gamma_exp };
            let rays = interior_rays(&d, cfg.rays);
            if rays.is_empty() {
                return Err(Error::Domain("no interior rays".into()));
            }
            let axis = {
                let mut a = Point::zeros(n);
                for r in &rays {
                    for i in 0..n {
                        a[i] += r[i];
                    }
                }
                let l = a.norm();
                if l > 1e-12 {
                    Point(a.iter().map(|v| v / l).collect())
                } else {
                    rays[0].clone()
                }
            };
            let r0 = if d.is_bounded() {
                0.5 * (d_omega + rho_omega)
            } else {
                2.0 * d_omega.max(scale)
            };
            let x0 = Point(p.iter().zip(axis.iter()).map(|(a, b)| a + r0 * b).collect());
            let (t0, t1) = if far {
                (cfg.far_radii.0 * scale.max(d_omega), cfg.far_radii.1 * scale.max(d_omega))
            } else {
                (cfg.near_radii.0 * scale, cfg.near_radii.1 * scale)
            };
            let mut fits = Vec::new();
            for w in &rays {
                match fit_theta(kern, &x0, &p, w, t0, t1, if far { -1.0 } else { 1.0 }) {
                    Some(t) => fits.push(t),
                    None => return Err(Error::Domain("kernel vanished along an interior ray".into())),
                }
            }
            let mean = fits.iter().sum::<f64>() / fits.len() as f64;
            let worst = fits
                .iter()
                .copied()
                .max_by(|a, b| (a - expected).abs().total_cmp(&(b - expected).abs()))
                .unwrap();
            // lower bound K ≥ C3/|x-y|^{n-2s} on comparable pairs inside the cone
            let mut min_scaled = f64::INFINITY;
            for i in 0..cfg.samples.min(200) {
                let w = &rays[i % rays.len()];
                let t = log_uniform(&mut rng, t0, t1);
                let x = Point(p.iter().zip(w.iter()).map(|(a, b)| a + t * b).collect());
                let w2 = &rays[(i + 1) % rays.len()];
                let t2 = t * rng.random_range(0.7..1.4);
                let y = Point(p.iter().zip(w2.iter()).map(|(a, b)| a + t2 * b).collect());
                let r = dist(&x, &y);
                if r == 0.0 {
                    continue;
                }
                let scaled = if e.abs() < 1e-14 { kval(kern, &x, &y) } else { kval(kern, &x, &y) * r.powf(e) };
                min_scaled = min_scaled.min(scaled);
            }
            report.samples = fits.len();
            report.theta_fit = Some(mean);
            report.theta_expected = Some(expected);
            report.constant_fit = Some(worst);
            report.min_margin = min_scaled;
            report.pass = (worst - expected).abs() < cfg.theta_tol && min_scaled > 0.0;
        }
        Hypothesis::H3 | Hypothesis::H3t => {
            let dilate = which == Hypothesis::H3;
            let mut first = f64::INFINITY;
            let mut second = f64::INFINITY;
            let mut count = 0;
            for _ in 0..cfg.samples {
                let lambda = if dilate {
                    let lo = if d_omega > 0.0 { d_omega * 1.001 } else { 0.1 * scale };
                    log_uniform(&mut rng, lo, 10.0 * lo.max(scale))
                } else if rho_omega.is_finite() {
                    rho_omega * rng.random_range(0.05..0.95)
                } else {
                    log_uniform(&mut rng, 0.1 * scale, 10.0 * scale)
                };
                let outer_r = |rng: &mut ChaCha8Rng| lambda * log_uniform(rng, 1.0 + 1e-6, 10.0);
                let (x, y1, y2) = if dilate {
                    // x, y outside B_λ; x^λ ∈ Ω ∩ B_λ
                    let x = { let r = outer_r(&mut rng); sample_at_radius(&mut rng, &d, &p, r) };
                    let y1 = { let r = outer_r(&mut rng); sample_at_radius(&mut rng, &d, &p, r) };
                    let y2 = { let r = outer_r(&mut rng); sample_at_radius(&mut rng, &d, &p, r) };
                    (x, y1, y2)
                } else {
                    // x ∈ Ω ∩ B_λ; y1 with y1^λ ∈ Ω \ B̄_λ; y2 ∈ Ω ∩ B_λ
                    let inner = |rng: &mut ChaCha8Rng| lambda * log_uniform(rng, 1e-2, 1.0 - 1e-6);
                    let x = { let r = inner(&mut rng); sample_at_radius(&mut rng, &d, &p, r) };
                    let lo = if rho_omega.is_finite() { lambda * lambda / rho_omega } else { 1e-2 * lambda };
                    let r1 = log_uniform(&mut rng, lo.max(1e-2 * lambda), lambda * (1.0 - 1e-6));
                    let y1 = sample_at_radius(&mut rng, &d, &p, r1);
                    let y2 = { let r = inner(&mut rng); sample_at_radius(&mut rng, &d, &p, r) };
                    (x, y1, y2)
                };
                let Some(x) = x else { continue };
                let xl = kelvin_point(&x, &p, lambda)?;
                if dilate && !d.contains(&xl) {
                    continue;
                }
                let wx = (lambda / dist(&x, &p)).powf(e);
                if let Some(y) = y1 {
                    let yl = kelvin_point(&y, &p, lambda)?;
                    let admissible = if dilate { true } else { d.contains(&yl) };
                    if admissible && dist(&x, &y) > 0.0 {
                        let m = kval(kern, &x, &y) - wx * kval(kern, &xl, &y);
                        first = first.min(m);
                        count += 1;
                    }
                }
                if let Some(y) = y2 {
                    let yl = kelvin_point(&y, &p, lambda)?;
                    let admissible = if dilate { d.contains(&yl) } else { true };
                    if admissible && dist(&x, &y) > 0.0 && dist(&xl, &y) > 0.0 {
                        let wy = (lambda / dist(&y, &p)).powf(e);
                        let wxy = (lambda * lambda / (dist(&x, &p) * dist(&y, &p))).powf(e);
                        let lhs = kval(kern, &x, &y) - wx * kval(kern, &xl, &y);
                        let rhs = wxy * kval(kern, &xl, &yl) - wy * kval(kern, &x, &yl);
                        second = second.min(lhs - rhs);
                    }
                }
            }
            if count == 0 {
                return Err(Error::Domain("empty admissible set".into()));
            }
            report.samples = count;
            report.min_margin = first;
            report.second_margin = second.is_finite().then_some(second);
            report.pass = first >= -cfg.tolerance && second >= -cfg.tolerance;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::GreenKernel;

    fn cfg(samples: usize) -> VerifyConfig {
        VerifyConfig { samples, seed: 7, ..Default::default() }
    }

    #[test]
    fn h3_on_ball_runs_shrinking_form() {
        let k = GreenKernel::new(1.0, DomainSpec::ball([0.0; 3], 1.0).unwrap()).unwrap();
        let r = verify_hypotheses(&k, Hypothesis::H3, &cfg(1000)).unwrap();
        assert_eq!(r.hypothesis, "H3t");
        assert!(r.pass, "{r:?}");
        assert!(r.min_margin >= -1e-12);
        assert!(r.second_margin.unwrap() >= -1e-12);
    }

    #[test]
    fn h3_on_half_space() {
        let k = GreenKernel::new(1.0, DomainSpec::half_space_k(3, 1).unwrap()).unwrap();
        let r = verify_hypotheses(&k, Hypothesis::H3, &cfg(1000)).unwrap();
        assert_eq!(r.hypothesis, "H3");
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn decay_exponents() {
        let k = GreenKernel::new(1.0, DomainSpec::half_space_k(3, 2).unwrap()).unwrap();
        let r = verify_hypotheses(&k, Hypothesis::H2, &cfg(100)).unwrap();
        assert!((r.theta_fit.unwrap() - 3.0).abs() < 0.05, "{r:?}");
        assert!(r.pass);
        let b = GreenKernel::new(1.0, DomainSpec::ball_k(3, 1, 1.0).unwrap()).unwrap();
        let r = verify_hypotheses(&b, Hypothesis::H2t, &cfg(100)).unwrap();
        assert!((r.theta_fit.unwrap() - 1.0).abs() < 0.05, "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn h1_constant_matches_newtonian() {
        let k = GreenKernel::new(1.0, DomainSpec::half_space_k(3, 1).unwrap()).unwrap();
        let r = verify_hypotheses(&k, Hypothesis::H1, &cfg(500)).unwrap();
        assert!(r.pass);
        let c = k.leading_constant();
        assert!(r.constant_fit.unwrap() <= c * (1.0 + 1e-12));
    }

    #[test]
    fn slope_fit_is_exact_on_power_law() {
        let xs: Vec<f64> = (0..5).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.0).collect();
        assert!((fit_slope(&xs, &ys) - 2.5).abs() < 1e-14);
    }
}
