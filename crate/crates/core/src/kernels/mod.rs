//! Fundamental solutions, image Green kernels, the fractional Laplacian and checks of the
//! kernel hypotheses.

mod fraclap;
mod iterated;
mod verify;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::geometry::{DomainKind, DomainSpec, Frame};
use crate::point::{dist, dot, Point};

pub use fraclap::{frac_laplacian, normalization_const, FracLapConfig, Kinks};
pub use iterated::{green_iterated, IteratedKernel};
pub use verify::{fit_theta, verify_hypotheses, Hypothesis, HypothesisReport, VerifyConfig};

/// Normalization of the fractional Laplacian's constant.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Normalization {
    /// Defined through `1 - cos ζ₁`; the symbol is `|ξ|^{2s}`.
    #[default]
    Angular,
    /// Defined through `1 - cos(2πζ₁)`; the symbol is `(|ξ|/2π)^{2s}`.
    PaperCycles,
}

/// A Green function `G(x, y)` on a domain.
pub trait Kernel: Sync {
    fn domain(&self) -> &DomainSpec;
    /// Operator order `s` of `(-Δ)^s`.
    fn order(&self) -> f64;
    /// Evaluation without domain checks; `x != y` is assumed.
    fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64;

    fn dim(&self) -> usize {
        self.domain().dim
    }

    /// `Some((G¹, k))` when the kernel is the `k`-fold composition of a second-order kernel.
    fn factors(&self) -> Option<(&GreenKernel, usize)> {
        None
    }

    /// Checked evaluation: both points in the closed domain and distinct.
    fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let d = self.domain();
        if x.len() != d.dim || y.len() != d.dim {
            return Err(invalid("point dimension does not match the domain"));
        }
        let tol = 1e-12 * d.length_scale().max(1.0);
        for (name, p) in [("x", x), ("y", y)] {
            if !d.contains_closed(p, tol) {
                return Err(Error::OutsideDomain(format!("{name} = {p:?}")));
            }
        }
        if dist(x, y) == 0.0 {
            return Err(Error::Domain("kernel is singular at x = y".into()));
        }
        Ok(self.eval_raw(x, y))
    }
}

/// Whole-space constant `c_{n,s}` of `Γ_s`: `c/|x|^{n-2s}` for `2s < n`, `c ln(1/|x|)` for `2s = n`.
pub fn fundamental_constant(s: f64, n: usize, norm: Normalization) -> Result<f64> {
    let nf = n as f64;
    if !(s > 0.0) || 2.0 * s > nf + 1e-15 {
        return Err(invalid("fundamental solution needs 0 < 2s <= n"));
    }
    let c = if is_critical(s, n) {
        1.0 / (2f64.powf(nf - 1.0) * std::f64::consts::PI.powf(nf / 2.0) * gamma(nf / 2.0))
    } else {
        gamma(nf / 2.0 - s) / (4f64.powf(s) * std::f64::consts::PI.powf(nf / 2.0) * gamma(s))
    };
    Ok(match norm {
        Normalization::PaperCycles if s.fract() != 0.0 => c * (2.0 * std::f64::consts::PI).powf(2.0 * s),
        _ => c,
    })
}

fn is_critical(s: f64, n: usize) -> bool {
    (2.0 * s - n as f64).abs() < 1e-14
}

/// `Γ_s(x, y)` with the angular normalization.
pub fn fundamental(s: f64, n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != n || y.len() != n {
        return Err(invalid("point dimension does not match n"));
    }
    let c = fundamental_constant(s, n, Normalization::Angular)?;
    let r = dist(x, y);
    if r == 0.0 {
        return Err(Error::Domain("fundamental solution is singular at x = y".into()));
    }
    Ok(radial_profile(c, s, n, r))
}

#[inline]
fn radial_profile(c: f64, s: f64, n: usize, r: f64) -> f64 {
    let e = n as f64 - 2.0 * s;
    if e.abs() < 1e-14 {
        -c * r.ln()
    } else if e == 1.0 {
        c / r
    } else if e == 2.0 {
        c / (r * r)
    } else {
        c * r.powf(-e)
    }
}

/// Green function of `(-Δ)^s` on one of the explicitly solvable domains.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreenKernel {
    pub s: f64,
    pub domain: DomainSpec,
    #[serde(default)]
    pub normalization: Normalization,
    /// Overrides the leading constant (`c_{n,s}`, or `c` of the one-dimensional log kernels).
    #[serde(default)]
    pub constant: Option<f64>,
}

impl GreenKernel {
    pub fn new(s: f64, domain: DomainSpec) -> Result<Self> {
        let k = GreenKernel {
            s,
            domain,
            normalization: Normalization::Angular,
            constant: None,
        };
        k.validate()?;
        Ok(k)
    }

    pub fn with_normalization(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.constant = Some(c);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        let n = self.domain.dim;
        let s = self.s;
        if !(s > 0.0) || 2.0 * s > n as f64 + 1e-15 {
            return Err(invalid("kernel order needs 0 < 2s <= n"));
        }
        let integer = s.fract() == 0.0;
        match &self.domain.kind {
            DomainKind::FreeSpace => Ok(()),
            DomainKind::HalfSpaceK { .. } if integer => Ok(()),
            DomainKind::Ball { .. } | DomainKind::BallK { .. } | DomainKind::ExteriorBallK { .. }
                if s == 1.0 =>
            {
                Ok(())
            }
            DomainKind::Ball { .. } | DomainKind::BallK { .. } if integer => Err(Error::Unsupported(
                "ball kernels of order s >= 2 are built with green_iterated".into(),
            )),
            DomainKind::Interval { .. } | DomainKind::HalfLine { .. } if s == 0.5 => Ok(()),
            _ => Err(Error::Unsupported(format!(
                "no explicit Green function of order {s} on this domain"
            ))),
        }
    }

    /// The constant in front of the kernel.
    pub fn leading_constant(&self) -> f64 {
        if let Some(c) = self.constant {
            return c;
        }
        match self.domain.kind {
            DomainKind::Interval { .. } | DomainKind::HalfLine { .. } => 1.0,
            _ => fundamental_constant(self.s, self.domain.dim, self.normalization)
                .expect("validated order"),
        }
    }

    /// Whole-space `Γ_s` with this kernel's constant.
    pub fn gamma_s(&self, r: f64) -> f64 {
        radial_profile(self.leading_constant(), self.s, self.domain.dim, r)
    }
}

/// Signed sum over the `2^k` reflections of `y` in the first `k` frame axes about `p`.
/// `term(z)` is evaluated at each reflected copy `z = R_J y`.
fn image_sum(y: &[f64], k: usize, frame: &Frame, p: &[f64], mut term: impl FnMut(&[f64]) -> f64) -> f64 {
    let n = y.len();
    let v: Vec<f64> = y.iter().zip(p).map(|(a, b)| a - b).collect();
    let coef: Vec<f64> = frame.axes[..k].iter().map(|a| dot(a, &v)).collect();
    let mut z = Point::zeros(n);
    let mut total = 0.0;
    for mask in 0u32..(1u32 << k) {
        z.copy_from_slice(y);
        for (i, ci) in coef.iter().enumerate() {
            if mask & (1 << i) != 0 {
                let a = &frame.axes[i];
                for j in 0..n {
                    z[j] -= 2.0 * ci * a[j];
                }
            }
        }
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        total += sign * term(&z);
    }
    total
}

/// `Σ_J (-1)^{|J|} [Γ(x, R_J y) - Γ(|y'|x'/R, R R_J y'/|y'|)]`, primes relative to `p`.
fn ball_k_value(kern: &GreenKernel, k: usize, frame: &Frame, p: &[f64], radius: f64, x: &[f64], y: &[f64]) -> f64 {
    let yp = dist(y, p);
    let n = x.len();
    let mut img = Point::zeros(n);
    image_sum(y, k, frame, p, |z| {
        let direct = kern.gamma_s(dist(x, z));
        // |(|y'|/R) x' - (R/|y'|) z'|, which tends to R as y' → 0
        let d = if yp == 0.0 {
            radius
        } else {
            let a = yp / radius;
            let b = radius / yp;
            for j in 0..n {
                img[j] = a * (x[j] - p[j]) - b * (z[j] - p[j]);
            }
            img.norm()
        };
        direct - kern.gamma_s(d)
    })
}

impl Kernel for GreenKernel {
    fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    fn order(&self) -> f64 {
        self.s
    }

    fn eval_raw(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.domain.kind {
            DomainKind::FreeSpace => self.gamma_s(dist(x, y)),
            DomainKind::HalfSpaceK { k, vertex, .. } => {
                let frame = self.domain.frame();
                image_sum(y, *k, &frame, vertex, |z| self.gamma_s(dist(x, z)))
            }
            DomainKind::Ball { center, radius } => {
                ball_k_value(self, 0, &Frame::identity(x.len()), center, *radius, x, y)
            }
            DomainKind::BallK {
                k, vertex, radius, ..
            } => ball_k_value(self, *k, &self.domain.frame(), vertex, *radius, x, y),
            DomainKind::ExteriorBallK {
                k, vertex, radius, ..
            } => {
                let n = x.len();
                let xr = dist(x, vertex);
                let yr = dist(y, vertex);
                let inv = |q: &[f64], r: f64| -> Point {
                    let f = radius * radius / (r * r);
                    Point(q.iter().zip(vertex.iter()).map(|(a, b)| f * (a - b) + b).collect())
                };
                let xs = inv(x, xr);
                let ys = inv(y, yr);
                let e = n as f64 - 2.0 * self.s;
                let pre = if e == 0.0 {
                    1.0
                } else {
                    (radius * radius / (xr * yr)).powf(e)
                };
                pre * ball_k_value(self, *k, &self.domain.frame(), vertex, *radius, &xs, &ys)
            }
            DomainKind::Interval { a, b } => {
                let m = 0.5 * (a + b);
                let r = 0.5 * (b - a);
                interval_half(self.leading_constant(), r, x[0] - m, y[0] - m)
            }
            DomainKind::HalfLine { origin, direction } => {
                half_line_half(self.leading_constant(), (x[0] - origin) * direction, (y[0] - origin) * direction)
            }
            _ => f64::NAN,
        }
    }
}

/// `c ln((r² - xy + √((r²-x²)(r²-y²))) / (r|x-y|))` on `(-r, r)`.
pub fn interval_half(c: f64, r: f64, x: f64, y: f64) -> f64 {
    let num = 0.5 * ((r - x) * (r + y) + (r + x) * (r - y))
        + ((r - x) * (r + x) * (r - y) * (r + y)).max(0.0).sqrt();
    c * (num / (r * (x - y).abs())).ln()
}

/// `c ln((x + y + 2√(xy)) / |x - y|)` on `(0, ∞)`.
pub fn half_line_half(c: f64, x: f64, y: f64) -> f64 {
    let sx = x.max(0.0).sqrt();
    let sy = y.max(0.0).sqrt();
    // (√x + √y)² / |√x - √y||√x + √y|
    c * ((sx + sy) / (sx - sy).abs()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn fundamental_values() {
        let v = fundamental(1.0, 3, &[0.0; 3], &[1.0, 0.0, 0.0]).unwrap();
        assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-15);
        assert_eq!(fundamental(1.0, 2, &[0.0; 2], &[0.0, 1.0]).unwrap(), 0.0);
        assert!(fundamental(1.0, 3, &[0.0; 3], &[0.0; 3]).is_err());
        let c4 = fundamental_constant(2.0, 4, Normalization::Angular).unwrap();
        assert!((c4 - 1.0 / (8.0 * PI * PI)).abs() < 1e-15);
        let c1 = fundamental_constant(0.5, 1, Normalization::Angular).unwrap();
        assert!((c1 - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn image_examples() {
        let h = GreenKernel::new(1.0, DomainSpec::half_space_k(3, 1).unwrap()).unwrap();
        let h = GreenKernel {
            domain: DomainSpec::new(
                3,
                DomainKind::HalfSpaceK {
                    k: 1,
                    vertex: Point::zeros(3),
                    frame: Some(Frame {
                        axes: vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
                    }),
                },
            )
            .unwrap(),
            ..h
        };
        let v = h.eval(&[0.0, 0.0, 1.0], &[0.0, 0.0, 2.0]).unwrap();
        assert!((v - 1.0 / (6.0 * PI)).abs() < 1e-15);

        let q = GreenKernel::new(1.0, DomainSpec::half_space_k(2, 2).unwrap()).unwrap();
        let v = q.eval(&[1.0, 1.0], &[1.0, 2.0]).unwrap();
        let expect = (3.0 * 5f64.sqrt() / 13f64.sqrt()).ln() / (2.0 * PI);
        assert!((v - expect).abs() < 1e-14);
        assert!((expect - 0.0988).abs() < 1e-4);
        assert!(q.eval(&[1.0, 1.0], &[0.0, 2.0]).unwrap().abs() < 1e-16);
    }

    #[test]
    fn one_dimensional_log_kernels() {
        let i = GreenKernel::new(0.5, DomainSpec::interval(-1.0, 1.0).unwrap()).unwrap();
        let v = i.eval(&[0.0], &[0.5]).unwrap();
        assert!((v - (2.0 + 3f64.sqrt()).ln()).abs() < 1e-14);
        assert!((v - 1.31696).abs() < 1e-5);
        assert!(i.eval(&[0.0], &[1.0]).unwrap().abs() < 1e-15);
        let h = GreenKernel::new(0.5, DomainSpec::half_line(0.0, 1.0).unwrap()).unwrap();
        assert!((h.eval(&[1.0], &[4.0]).unwrap() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn rejected_kernels() {
        let b = DomainSpec::ball([0.0; 4], 1.0).unwrap();
        assert!(matches!(GreenKernel::new(2.0, b.clone()), Err(Error::Unsupported(_))));
        assert!(GreenKernel::new(0.5, b).is_err());
        assert!(GreenKernel::new(2.0, DomainSpec::free_space(3)).is_err());
        let ball = GreenKernel::new(1.0, DomainSpec::ball([0.0; 3], 1.0).unwrap()).unwrap();
        assert!(matches!(ball.eval(&[2.0, 0.0, 0.0], &[0.0; 3]), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn exterior_kernel_limits() {
        let e = GreenKernel::new(1.0, DomainSpec::exterior_ball_k(3, 0, 1.0).unwrap()).unwrap();
        let x = [2.0, 0.0, 0.0];
        let far = [0.0, 1e3, 0.0];
        let g = e.eval(&x, &far).unwrap();
        // G(x, y)|y| → 1 - R/|x| as |y| → ∞
        assert!((g / e.gamma_s(dist(&x, &far)) - 0.5).abs() < 1e-3);
        assert!(e.eval(&x, &[0.0, 1.0, 0.0]).unwrap().abs() < 1e-15);
        let near = [2.0 + 1e-4, 0.0, 0.0];
        let c = e.eval(&x, &near).unwrap() * 1e-4;
        assert!((c / e.leading_constant() - 1.0).abs() < 1e-3);
    }
}
