//! Gauss rules, sphere rules and polar quadrature centred at an evaluation point.

use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Error, Result};
use crate::geometry::{DomainKind, DomainSpec};
use crate::point::{dist, dot, Point};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if m == 1 {
                p1 = z;
                p0 = 1.0;
            } else {
                for k in 2..=m {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
            }
            dp = m as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if m == 1 {
            return (vec![0.0], vec![2.0]);
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[m - 1 - i] = w[i];
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_on(a: f64, b: f64, m: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(m);
    let h = 0.5 * (b - a);
    x.iter()
        .zip(&w)
        .map(|(xi, wi)| (a + h * (xi + 1.0), h * wi))
        .collect()
}

/// Directions and weights on `S^{n-1}` summing to its area. Uniform in the azimuth
/// (`2m` points), Gauss–Legendre in each polar angle (`m` points).
pub fn sphere_rule(n: usize, m: usize) -> Vec<(Point, f64)> {
    match n {
        0 => Vec::new(),
        1 => vec![(Point::new(&[1.0]), 1.0), (Point::new(&[-1.0]), 1.0)],
        2 => {
            let k = 2 * m;
            (0..k)
                .map(|j| {
                    let th = TAU * (j as f64 + 0.5) / k as f64;
                    (Point::new(&[th.cos(), th.sin()]), TAU / k as f64)
                })
                .collect()
        }
        _ => {
            let lower = sphere_rule(n - 1, m);
            let mut out = Vec::with_capacity(lower.len() * m);
            for (th, wt) in gauss_on(0.0, PI, m) {
                let (s, c) = th.sin_cos();
                let jac = s.powi(n as i32 - 2);
                for (w, ww) in &lower {
                    let mut p = Point::zeros(n);
                    for i in 0..n - 1 {
                        p[i] = s * w[i];
                    }
                    p[n - 1] = c;
                    out.push((p, wt * jac * ww));
                }
            }
            out
        }
    }
}

/// Polar quadrature on a domain: directions from [`sphere_rule`], and along each ray either
/// a layered Gauss rule (when the ray starts inside the domain) or a plain Gauss rule.
///
/// The layered rule splits `[0, e]` at `e/8, e/4, e/2` and substitutes `t = (e/8)τ³` on the
/// innermost layer, so integrands like `|y - x|^{2s-n}` or `ln|y - x|` are resolved.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub domain: DomainSpec,
    pub order: usize,
    pub truncation: Option<f64>,
    sphere: Vec<(Point, f64)>,
    radial: Vec<(f64, f64)>,
}

/// Rule for a bounded domain with `order` Gauss points per layer and polar angle.
pub fn quadrature_for(domain: &DomainSpec, order: usize) -> Result<QuadratureRule> {
    if !domain.is_bounded() {
        return Err(invalid("unbounded domain needs a truncation radius"));
    }
    QuadratureRule::build(domain, order, order, None)
}

/// Rule for `domain ∩ B_radius(anchor)`.
pub fn quadrature_for_truncated(
    domain: &DomainSpec,
    order: usize,
    radius: f64,
) -> Result<QuadratureRule> {
    if !(radius > 0.0) {
        return Err(invalid("truncation radius must be positive"));
    }
    QuadratureRule::build(domain, order, order, Some(radius))
}

impl QuadratureRule {
    pub fn build(
        domain: &DomainSpec,
        order: usize,
        angular: usize,
        truncation: Option<f64>,
    ) -> Result<Self> {
        if order < 2 || angular < 2 {
            return Err(invalid("quadrature order must be at least 2"));
        }
        if !domain.is_bounded() && truncation.is_none() {
            return Err(invalid("unbounded domain needs a truncation radius"));
        }
        if let DomainKind::FreeSpace = domain.kind {
            if truncation.is_none() {
                return Err(Error::Unsupported("free space without truncation".into()));
            }
        }
        Ok(QuadratureRule {
            domain: domain.clone(),
            order,
            truncation,
            sphere: sphere_rule(domain.dim, angular),
            radial: gauss_on(0.0, 1.0, order),
        })
    }

    /// Same rule with a different angular resolution.
    pub fn with_angular(mut self, angular: usize) -> Self {
        self.sphere = sphere_rule(self.domain.dim, angular.max(2));
        self
    }

    fn bounding_radius(&self) -> f64 {
        let d = &self.domain;
        let anchor = d.anchor();
        let own = match &d.kind {
            DomainKind::Ball { radius, .. } | DomainKind::BallK { radius, .. } => *radius,
            DomainKind::TruncatedCone { r_max, .. } => *r_max,
            DomainKind::Polygon2D { vertices } => vertices
                .iter()
                .map(|v| dist(v, &anchor))
                .fold(0.0, f64::max),
            DomainKind::Interval { a, b } => 0.5 * (b - a),
            _ => 0.0,
        };
        match self.truncation {
            Some(t) if own == 0.0 || t < own => t,
            _ => own,
        }
    }

    /// Intervals of the ray `x + tω` inside the (truncated) domain.
    fn ray(&self, x: &[f64], w: &[f64]) -> Vec<(f64, f64)> {
        let anchor = self.domain.anchor();
        let reach = dist(x, &anchor) + self.bounding_radius();
        let t_max = reach * (1.0 + 1e-12) + 1e-300;
        let mut iv = self.domain.ray_intervals(x, w, t_max);
        if let Some(tr) = self.truncation {
            let f: Vec<f64> = x.iter().zip(anchor.iter()).map(|(a, b)| a - b).collect();
            let b = dot(&f, w);
            let disc = b * b - (dot(&f, &f) - tr * tr);
            if disc <= 0.0 {
                return Vec::new();
            }
            let (lo, hi) = (-b - disc.sqrt(), -b + disc.sqrt());
            iv = iv
                .into_iter()
                .filter_map(|(s, e)| {
                    let (s, e) = (s.max(lo), e.min(hi));
                    (e > s).then_some((s, e))
                })
                .collect();
        }
        iv
    }

    /// Points and weights for integrals over the domain, refined towards `x`.
    pub fn points_about(&self, x: &[f64]) -> Vec<(Point, f64)> {
        let n = self.domain.dim;
        let mut out = Vec::new();
        let push = |w: &Point, ws: f64, t: f64, wt: f64, out: &mut Vec<(Point, f64)>| {
            let y = Point(x.iter().zip(w.iter()).map(|(xi, wi)| xi + t * wi).collect());
            out.push((y, ws * wt * t.powi(n as i32 - 1)));
        };
        for (w, ws) in &self.sphere {
            for (s, e) in self.ray(x, w) {
                if s == 0.0 {
                    let l = e / 8.0;
                    for &(tau, wt) in &self.radial {
                        push(
                            w,
                            *ws,
                            l * tau * tau * tau,
                            3.0 * l * tau * tau * wt,
                            &mut out,
                        );
                    }
                    for (a, b) in [(e / 8.0, e / 4.0), (e / 4.0, e / 2.0), (e / 2.0, e)] {
                        for &(tau, wt) in &self.radial {
                            push(w, *ws, a + (b - a) * tau, (b - a) * wt, &mut out);
                        }
                    }
                } else {
                    let mid = 0.5 * (s + e);
                    for (a, b) in [(s, mid), (mid, e)] {
                        for &(tau, wt) in &self.radial {
                            push(w, *ws, a + (b - a) * tau, (b - a) * wt, &mut out);
                        }
                    }
                }
            }
        }
        out
    }

    /// A rule without a distinguished point, centred at the domain's anchor.
    pub fn nodes_weights(&self) -> (Vec<Point>, Vec<f64>) {
        self.points_about(&self.domain.anchor()).into_iter().unzip()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.integrate_singular(f, &self.domain.anchor())
    }

    /// `∫ f` for `f` singular (integrably) at `x`.
    pub fn integrate_singular(&self, f: impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
        self.points_about(x).iter().map(|(y, w)| w * f(y)).sum()
    }

    /// `∫ f` for `f` singular at both `x` and `y`, split by the partition of unity
    /// `|z-y|⁴ / (|z-x|⁴ + |z-y|⁴)`.
    pub fn integrate_two_point(&self, f: impl Fn(&[f64]) -> f64, x: &[f64], y: &[f64]) -> f64 {
        if dist(x, y) == 0.0 {
            return self.integrate_singular(f, x);
        }
        let chi = |z: &[f64]| {
            let a = dist(z, x).powi(4);
            let b = dist(z, y).powi(4);
            b / (a + b)
        };
        let near_x: f64 = self
            .points_about(x)
            .iter()
            .map(|(z, w)| {
                let c = chi(z);
                if c == 0.0 {
                    0.0
                } else {
                    w * c * f(z)
                }
            })
            .sum();
        let near_y: f64 = self
            .points_about(y)
            .iter()
            .map(|(z, w)| {
                let c = 1.0 - chi(z);
                if c == 0.0 {
                    0.0
                } else {
                    w * c * f(z)
                }
            })
            .sum();
        near_x + near_y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(7);
        let s: f64 = w.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        let m12: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(12)).sum();
        assert!((m12 - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_areas() {
        for (n, area) in [(2, TAU), (3, 4.0 * PI), (4, 2.0 * PI * PI)] {
            let s: f64 = sphere_rule(n, 16).iter().map(|p| p.1).sum();
            assert!((s - area).abs() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn ball_volume_and_singular_moment() {
        let b = DomainSpec::ball([0.0, 0.0, 0.0], 1.0).unwrap();
        let q = quadrature_for(&b, 32).unwrap();
        assert!((q.integrate(|_| 1.0) - 4.0 * PI / 3.0).abs() < 1e-6);
        let v = q.integrate_singular(|y| 1.0 / crate::point::norm(y), &[0.0; 3]);
        assert!((v - TAU).abs() < 1e-4);
    }

    #[test]
    fn log_integral_on_unit_interval() {
        let d = DomainSpec::interval(0.0, 1.0).unwrap();
        let q = quadrature_for(&d, 32).unwrap();
        let v = q.integrate_singular(|y| -(y[0] - 0.5f64).abs().ln(), &[0.5]);
        assert!((v - (1.0 + 2f64.ln())).abs() < 1e-6);
    }

    #[test]
    fn off_center_point_and_two_point_split() {
        let b = DomainSpec::ball([0.0, 0.0, 0.0], 1.0).unwrap();
        let q = quadrature_for(&b, 24).unwrap();
        let x = [0.3, -0.2, 0.5];
        assert!((q.integrate_singular(|_| 1.0, &x) - 4.0 * PI / 3.0).abs() < 1e-6);
        let y = [-0.4, 0.1, 0.0];
        let v = q.integrate_two_point(|_| 1.0, &x, &y);
        assert!((v - 4.0 * PI / 3.0).abs() < 1e-6);
    }

    #[test]
    fn unbounded_needs_truncation() {
        let h = DomainSpec::half_space_k(2, 1).unwrap();
        assert!(quadrature_for(&h, 8).is_err());
        let q = quadrature_for_truncated(&h, 16, 1.0).unwrap();
        assert!((q.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-10);
    }
}
