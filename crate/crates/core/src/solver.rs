//! Fixed-point solver for `u = K(|x-P|^a u^p + t)`, barriers and a shooting oracle.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{invalid, Error, Result};
use crate::field::{Field, GridFunction, Interp};
use crate::kernels::{GreenKernel, Kernel};
use crate::point::{dist, Point};
use crate::quadrature::{quadrature_for, quadrature_for_truncated, QuadratureRule};

/// `f(y, u) = |y-P|^a u^p + t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonLinearity {
    pub a: f64,
    pub p: f64,
    pub t: f64,
    pub center: Point,
}

impl NonLinearity {
    pub fn new(a: f64, p: f64, t: f64, center: impl Into<Point>) -> Result<Self> {
        let nl = NonLinearity { a, p, t, center: center.into() };
        nl.validate()?;
        Ok(nl)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(invalid("p must be finite and >= 1"));
        }
        if !self.a.is_finite() || !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(invalid("a must be finite and t >= 0"));
        }
        Ok(())
    }

    pub fn weight(&self, y: &[f64]) -> f64 {
        if self.a == 0.0 {
            1.0
        } else {
            dist(y, &self.center).powf(self.a)
        }
    }

    pub fn eval(&self, y: &[f64], u: f64) -> f64 {
        self.weight(y) * u.powf(self.p) + self.t
    }
}

/// Iteration used by [`picard_solve`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// `u ← (1-θ)u + θK(u)`.
    Damped,
    /// `v ← K(v)/‖K(v)‖_∞`, rescaled at the end by `‖K(v)‖^{-1/(p-1)}`. Needs `t = 0`, `p > 1`.
    Normalized,
    /// Normalized when it applies and the initial guess is nonzero, damped otherwise.
    #[default]
    Auto,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Damping θ in `(0, 1]`.
    pub damping: f64,
    pub residual_tol: f64,
    /// Gauss points per radial layer and polar angle.
    pub quadrature_order: usize,
    /// Truncation radius for unbounded domains.
    pub truncation: Option<f64>,
    pub scheme: Scheme,
    /// `‖u‖_∞` above which the iteration is declared divergent.
    pub divergence_bound: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 500,
            damping: 1.0,
            residual_tol: 1e-10,
            quadrature_order: 16,
            truncation: None,
            scheme: Scheme::Auto,
            divergence_bound: 1e12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(invalid("damping must lie in (0, 1]"));
        }
        if !(self.residual_tol > 0.0) {
            return Err(invalid("residual_tol must be positive"));
        }
        if self.max_iters == 0 || self.quadrature_order == 0 {
            return Err(invalid("max_iters and quadrature_order must be positive"));
        }
        Ok(())
    }

    pub fn rule_for(&self, kernel: &dyn Kernel) -> Result<QuadratureRule> {
        match self.truncation {
            Some(r) => quadrature_for_truncated(kernel.domain(), self.quadrature_order, r),
            None => quadrature_for(kernel.domain(), self.quadrature_order),
        }
    }
}

/// The operator `u ↦ K(f(·, u))` restricted to the nodes of a grid function.
///
/// Values between nodes come from the grid function's interpolation rule, so `K` becomes a
/// dense matrix acting on `u^p` at the nodes.
#[derive(Clone, Debug)]
pub struct KOperator {
    /// Rows of `∫ G(x_i, y)|y-P|^a φ_j(y) dy`.
    first: Vec<Vec<f64>>,
    /// Rows of `∫ G(x_i, y) φ_j(y) dy`, used by the later passes of a composite kernel.
    plain: Vec<Vec<f64>>,
    /// `t ∫ G(x_i, y) dy`.
    source: Vec<f64>,
    passes: usize,
    p: f64,
}

impl KOperator {
    pub fn assemble(kernel: &dyn Kernel, grid: &GridFunction, nl: &NonLinearity, rule: &QuadratureRule) -> Result<Self> {
        nl.validate()?;
        if rule.domain != *kernel.domain() {
            return Err(invalid("quadrature rule and kernel live on different domains"));
        }
        if grid.dim() != kernel.dim() || nl.center.dim() != kernel.dim() {
            return Err(invalid("dimension mismatch between kernel, grid and nonlinearity"));
        }
        let (base, passes): (&dyn Kernel, usize) = match kernel.factors() {
            Some((g, k)) => (g as &dyn Kernel, k),
            None => (kernel, 1),
        };
        let m = grid.len();
        let rows: Vec<(Vec<f64>, Vec<f64>, f64)> = grid
            .nodes
            .par_iter()
            .map(|x| {
                let mut first = vec![0.0; m];
                let mut plain = if passes > 1 { vec![0.0; m] } else { Vec::new() };
                let mut mass = 0.0;
                for (y, w) in rule.points_about(x) {
                    if dist(x, &y) == 0.0 {
                        continue;
                    }
                    let g = base.eval_raw(x, &y) * w;
                    if g == 0.0 {
                        continue;
                    }
                    mass += g;
                    grid.accumulate_cardinals(&y, g * nl.weight(&y), &mut first);
                    if passes > 1 {
                        grid.accumulate_cardinals(&y, g, &mut plain);
                    }
                }
                (first, plain, mass)
            })
            .collect();
        let mut first = Vec::with_capacity(m);
        let mut plain = Vec::with_capacity(m);
        let mut source = Vec::with_capacity(m);
        for (f, p, mass) in rows {
            first.push(f);
            plain.push(p);
            source.push(nl.t * mass);
        }
        Ok(KOperator {
            first,
            plain,
            source,
            passes,
            p: nl.p,
        })
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    fn matvec(rows: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        rows.iter().map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    /// `K(u)` at the nodes; `homogeneous` drops the source term `t`.
    fn apply_values(&self, u: &[f64], homogeneous: bool) -> Vec<f64> {
        let up: Vec<f64> = u.iter().map(|v| v.powf(self.p)).collect();
        let mut out = Self::matvec(&self.first, &up);
        if !homogeneous {
            for (o, s) in out.iter_mut().zip(&self.source) {
                *o += s;
            }
        }
        for _ in 1..self.passes {
            out = Self::matvec(&self.plain, &out);
        }
        out
    }

    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.len() {
            return Err(invalid("value vector does not match the grid"));
        }
        if let Some(v) = u.iter().find(|v| !(**v >= 0.0)) {
            return Err(invalid(format!("K is applied to nonnegative functions only, got {v}")));
        }
        Ok(self.apply_values(u, false))
    }
}

/// `K(f(·, u))` sampled at the nodes of `u`.
pub fn apply_k(kernel: &dyn Kernel, u: &GridFunction, nl: &NonLinearity, rule: &QuadratureRule) -> Result<GridFunction> {
    let op = KOperator::assemble(kernel, u, nl, rule)?;
    u.with_values(op.apply(&u.values)?)
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub solution: GridFunction,
    /// `sup|u_k - K(u_k)|` per iteration.
    pub history: Vec<f64>,
    pub iters: usize,
    pub converged: bool,
    pub diverged: bool,
    pub scheme: Scheme,
}

impl SolveOutcome {
    pub fn residual(&self) -> f64 {
        self.history.last().copied().unwrap_or(f64::NAN)
    }

    pub fn sup_norm(&self) -> f64 {
        self.solution.sup_norm()
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn sup(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Fixed-point iteration for `u = K(|x-P|^a u^p + t)` on the nodes of `initial`.
///
/// The damped scheme cannot settle on a nontrivial solution of the homogeneous problem, which
/// repels it along its own direction with factor `p`; the normalized scheme removes that
/// direction and is the default there.
pub fn picard_solve(kernel: &dyn Kernel, nl: &NonLinearity, cfg: &SolverConfig, initial: &GridFunction) -> Result<SolveOutcome> {
    cfg.validate()?;
    let rule = cfg.rule_for(kernel)?;
    let op = KOperator::assemble(kernel, initial, nl, &rule)?;
    picard_with(&op, nl, cfg, initial)
}

/// [`picard_solve`] with a pre-assembled operator.
pub fn picard_with(op: &KOperator, nl: &NonLinearity, cfg: &SolverConfig, initial: &GridFunction) -> Result<SolveOutcome> {
    cfg.validate()?;
    if initial.len() != op.len() {
        return Err(invalid("initial guess does not match the operator's grid"));
    }
    if initial.values.iter().any(|v| !(*v >= 0.0)) {
        return Err(invalid("initial guess must be nonnegative"));
    }
    let normalized_ok = nl.t == 0.0 && nl.p > 1.0 && sup(&initial.values) > 0.0;
    let scheme = match cfg.scheme {
        Scheme::Auto if normalized_ok => Scheme::Normalized,
        Scheme::Auto => Scheme::Damped,
        Scheme::Normalized if !normalized_ok => {
            return Err(invalid("the normalized scheme needs t = 0, p > 1 and a nonzero initial guess"))
        }
        s => s,
    };
    let mut history = Vec::new();
    let mut converged = false;
    let mut diverged = false;
    let mut iters = 0;
    let values = match scheme {
        Scheme::Damped => {
            let th = cfg.damping;
            let mut u = initial.values.clone();
            for _ in 0..cfg.max_iters {
                let ku = op.apply_values(&u, false);
                let res = sup_diff(&u, &ku);
                history.push(res);
                if res <= cfg.residual_tol {
                    converged = true;
                    break;
                }
                iters += 1;
                for (a, b) in u.iter_mut().zip(&ku) {
                    *a = (1.0 - th) * *a + th * b;
                }
                let norm = sup(&u);
                if !(norm <= cfg.divergence_bound) {
                    diverged = true;
                    break;
                }
            }
            u
        }
        _ => {
            let q = 1.0 / (nl.p - 1.0);
            let s0 = sup(&initial.values);
            let mut v: Vec<f64> = initial.values.iter().map(|x| x / s0).collect();
            let mut u = v.clone();
            for _ in 0..cfg.max_iters {
                let kv = op.apply_values(&v, true);
                let mu = sup(&kv);
                if !(mu > 0.0) {
                    return Err(Error::Divergence("iteration collapsed to zero".into()));
                }
                // u = μ^{-q} v has K(u) = μ^{-q} K(v)/μ
                let scale = mu.powf(-q);
                u = v.iter().map(|x| x * scale).collect();
                let ku: Vec<f64> = kv.iter().map(|x| x * scale / mu).collect();
                let res = sup_diff(&u, &ku);
                history.push(res);
                if !(scale <= cfg.divergence_bound) {
                    diverged = true;
                    break;
                }
                if res <= cfg.residual_tol {
                    converged = true;
                    break;
                }
                iters += 1;
                v = kv.iter().map(|x| x / mu).collect();
            }
            u
        }
    };
    Ok(SolveOutcome {
        solution: initial.with_values(values)?,
        history,
        iters,
        converged,
        diverged,
        scheme,
    })
}

/// `C_{n,s}` with `(-Δ)^s [C d^{2s} (1 - |x|²/d²)^s_+] = 1` in `B_d`; `1/(2n)` for `s = 1`.
pub fn barrier_constant(s: f64, n: usize) -> f64 {
    let h = n as f64 / 2.0;
    gamma(h) / (4f64.powf(s) * gamma(1.0 + s) * gamma(h + s))
}

/// `C_{n,s} d^{2s} (1 - |x-x0|²/d²)^s_+`.
pub fn barrier_zeta(s: f64, n: usize, x0: &[f64], d: f64, x: &[f64]) -> f64 {
    barrier_zeta_with(barrier_constant(s, n), s, x0, d, x)
}

/// [`barrier_zeta`] with a caller-supplied constant.
pub fn barrier_zeta_with(c: f64, s: f64, x0: &[f64], d: f64, x: &[f64]) -> f64 {
    let q = 1.0 - (dist(x, x0) / d).powi(2);
    if q <= 0.0 {
        0.0
    } else {
        c * d.powf(2.0 * s) * q.powf(s)
    }
}

/// `(1/(C^{1/(2s)} diam))^{2s/(p-1)}`, the a-priori lower bound on `‖u‖_∞`.
pub fn lower_bound_rho(n: usize, s: f64, p: f64, diam: f64, c_ns: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(invalid("p must exceed 1"));
    }
    if !(diam > 0.0) || !(c_ns > 0.0) || n == 0 || !(s > 0.0) {
        return Err(invalid("diam, C and s must be positive"));
    }
    Ok((1.0 / (c_ns.powf(0.5 / s) * diam)).powf(2.0 * s / (p - 1.0)))
}

/// Radial Lane-Emden profile on a ball from the shooting method.
#[derive(Clone, Debug)]
pub struct ShootingSolution {
    pub radius: f64,
    pub u0: f64,
    /// `u(R)` at the accepted `u(0)`.
    pub end_value: f64,
    /// Profile on `radii`, as a radial spline about the origin of the given dimension.
    pub profile: GridFunction,
}

fn lane_emden_rhs(n: usize, p: f64, r: f64, u: f64, v: f64) -> (f64, f64) {
    // u' = v, v' = -(n-1)v/r - |u|^{p-1}u
    (v, -(n as f64 - 1.0) * v / r - u.abs().powf(p - 1.0) * u)
}

/// Integrates from `0` to `radius` with `steps` RK4 steps; returns samples at every step.
fn shoot(n: usize, p: f64, u0: f64, radius: f64, steps: usize) -> Vec<f64> {
    let h = radius / steps as f64;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(u0);
    // series start across the regular singular point
    let c = u0.abs().powf(p - 1.0) * u0 / (2.0 * n as f64);
    let mut u = u0 - c * h * h;
    let mut v = -2.0 * c * h;
    out.push(u);
    let mut r = h;
    for _ in 1..steps {
        let (k1u, k1v) = lane_emden_rhs(n, p, r, u, v);
        let (k2u, k2v) = lane_emden_rhs(n, p, r + h / 2.0, u + h / 2.0 * k1u, v + h / 2.0 * k1v);
        let (k3u, k3v) = lane_emden_rhs(n, p, r + h / 2.0, u + h / 2.0 * k2u, v + h / 2.0 * k2v);
        let (k4u, k4v) = lane_emden_rhs(n, p, r + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r += h;
        out.push(u);
    }
    out
}

/// Positive radial solution of `-u'' - (n-1)u'/r = u^p`, `u'(0) = 0`, `u(R) = 0`, by
/// bisection on `u(0)` with an RK4 integrator of `steps` steps. `samples` radii (including
/// both ends) are returned in the profile.
pub fn radial_shooting_oracle(n: usize, p: f64, radius: f64, steps: usize, samples: usize) -> Result<ShootingSolution> {
    if !(p > 1.0) {
        return Err(invalid("p must exceed 1 (p = 1 is a linear eigenvalue problem)"));
    }
    if n == 0 || !(radius > 0.0) || steps < 8 || samples < 2 {
        return Err(invalid("need n >= 1, R > 0, steps >= 8 and samples >= 2"));
    }
    let end = |u0: f64| -> (f64, bool) {
        // value at R and whether the profile stayed positive before R
        let path = shoot(n, p, u0, radius, steps);
        let last = *path.last().unwrap();
        let positive = path[..path.len() - 1].iter().all(|&v| v > 0.0);
        (last, positive)
    };
    // for small u(0) the first zero lies beyond R, for large u(0) before it
    let mut lo = 1e-6;
    let mut hi = 1.0;
    if !(end(lo).0 > 0.0 && end(lo).1) {
        return Err(Error::NoBracket("u(R) is not positive for tiny u(0)".into()));
    }
    let mut tries = 0;
    while end(hi).1 && end(hi).0 > 0.0 {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 200 {
            return Err(Error::NoBracket("no sign change of u(R) found".into()));
        }
    }
    let mut u0 = 0.5 * (lo + hi);
    let mut last = f64::INFINITY;
    for _ in 0..300 {
        u0 = 0.5 * (lo + hi);
        let (v, positive) = end(u0);
        last = v;
        if v.abs() < 1e-10 && positive {
            break;
        }
        if positive && v > 0.0 {
            lo = u0;
        } else {
            hi = u0;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let path = shoot(n, p, u0, radius, steps);
    let h = radius / steps as f64;
    let mut nodes = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for i in 0..samples {
        let r = radius * i as f64 / (samples - 1) as f64;
        let pos = r / h;
        let k = (pos.floor() as usize).min(steps - 1);
        let f = pos - k as f64;
        nodes.push(Point::axis(n, 0, r));
        values.push(((1.0 - f) * path[k] + f * path[k + 1]).max(0.0));
    }
    let profile = GridFunction::new(nodes, values, Interp::RadialCubic { center: Point::zeros(n) })?;
    Ok(ShootingSolution { radius, u0, end_value: last, profile })
}

/// Radial nodes `R(1 - cos(πi/(2m)))`-clustered towards the boundary, along the first axis.
pub fn radial_nodes(center: &[f64], radius: f64, m: usize) -> Vec<Point> {
    (0..=m)
        .map(|i| {
            let r = radius * (std::f64::consts::FRAC_PI_2 * i as f64 / m as f64).sin();
            let mut x = Point::new(center);
            x[0] += r;
            x
        })
        .collect()
}

/// `(R² - |x-c|²)/(2n)` on the given nodes.
pub fn torsion_grid(n: usize, center: &[f64], radius: f64, nodes: Vec<Point>, interp: Interp) -> Result<GridFunction> {
    let values = nodes
        .iter()
        .map(|x| ((radius * radius - dist(x, center).powi(2)) / (2.0 * n as f64)).max(0.0))
        .collect();
    GridFunction::new(nodes, values, interp)
}

/// Convenience: the second-order Dirichlet kernel of a ball.
pub fn ball_kernel(n: usize, radius: f64) -> Result<GreenKernel> {
    GreenKernel::new(1.0, crate::geometry::DomainSpec::ball(Point::zeros(n), radius)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::kernels::green_iterated;

    fn ball_setup(m: usize) -> (GreenKernel, GridFunction) {
        let k = ball_kernel(3, 1.0).unwrap();
        let nodes = radial_nodes(&[0.0; 3], 1.0, m);
        let g = torsion_grid(3, &[0.0; 3], 1.0, nodes, Interp::RadialCubic { center: Point::zeros(3) }).unwrap();
        (k, g)
    }

    #[test]
    fn torsion_of_the_ball() {
        let (k, g) = ball_setup(24);
        let zero = g.with_values(vec![0.0; g.len()]).unwrap();
        let rule = quadrature_for(k.domain(), 16).unwrap();
        let nl = NonLinearity::new(0.0, 2.0, 1.0, Point::zeros(3)).unwrap();
        let h = apply_k(&k, &zero, &nl, &rule).unwrap();
        assert!((h.values[0] - 1.0 / 6.0).abs() < 1e-4, "{}", h.values[0]);
        for (x, v) in h.nodes.iter().zip(&h.values) {
            let exact = (1.0 - crate::point::dot(x, x)) / 6.0;
            assert!((v - exact).abs() < 1e-4);
        }
        let nl0 = NonLinearity::new(0.0, 2.0, 0.0, Point::zeros(3)).unwrap();
        assert!(apply_k(&k, &zero, &nl0, &rule).unwrap().values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn monotone_and_rejects_negative() {
        let (k, g) = ball_setup(12);
        let rule = quadrature_for(k.domain(), 8).unwrap();
        let nl = NonLinearity::new(0.0, 2.0, 0.0, Point::zeros(3)).unwrap();
        let op = KOperator::assemble(&k, &g, &nl, &rule).unwrap();
        let small = op.apply(&g.values).unwrap();
        let bigger: Vec<f64> = g.values.iter().map(|v| v * 1.5 + 0.01).collect();
        let large = op.apply(&bigger).unwrap();
        assert!(small.iter().zip(&large).all(|(a, b)| a <= b));
        assert!(op.apply(&vec![-1.0; g.len()]).is_err());
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let (k, g) = ball_setup(12);
        let zero = g.with_values(vec![0.0; g.len()]).unwrap();
        let nl = NonLinearity::new(0.0, 2.0, 0.0, Point::zeros(3)).unwrap();
        let cfg = SolverConfig { quadrature_order: 8, ..Default::default() };
        let out = picard_solve(&k, &nl, &cfg, &zero).unwrap();
        assert!(out.converged);
        assert_eq!(out.scheme, Scheme::Damped);
        assert_eq!(out.sup_norm(), 0.0);
    }

    #[test]
    fn lane_emden_matches_shooting() {
        let (k, g) = ball_setup(48);
        let init = g.with_values(g.values.iter().map(|v| 2.0 * v).collect()).unwrap();
        let nl = NonLinearity::new(0.0, 2.0, 0.0, Point::zeros(3)).unwrap();
        let out = picard_solve(&k, &nl, &SolverConfig::default(), &init).unwrap();
        assert!(out.converged && out.residual() < 1e-8 && out.iters < 500);
        let oracle = radial_shooting_oracle(3, 2.0, 1.0, 4000, 101).unwrap();
        assert!((out.sup_norm() - oracle.u0).abs() < 1e-3, "{} vs {}", out.sup_norm(), oracle.u0);
        assert!(out.sup_norm() >= lower_bound_rho(3, 1.0, 2.0, 2.0, 1.0 / 6.0).unwrap());
        let interior = out.solution.nodes.iter().zip(&out.solution.values).filter(|(x, _)| x.norm() < 1.0 - 1e-12);
        assert!(interior.into_iter().all(|(_, v)| *v > 0.0));
    }

    #[test]
    fn shooting_self_consistency() {
        let a = radial_shooting_oracle(3, 2.0, 1.0, 2000, 11).unwrap();
        let b = radial_shooting_oracle(3, 2.0, 1.0, 4000, 11).unwrap();
        assert!((a.u0 - b.u0).abs() < 1e-6, "{} {}", a.u0, b.u0);
        assert!(a.end_value.abs() < 1e-10);
        assert!(a.u0 >= 1.5);
        assert!(radial_shooting_oracle(3, 1.0, 1.0, 2000, 11).is_err());
        // scaling u_R(r) = R^{-2/(p-1)} u_1(r/R)
        let c = radial_shooting_oracle(3, 2.0, 2.0, 4000, 11).unwrap();
        assert!((c.u0 * 4.0 - b.u0).abs() < 1e-6);
    }

    #[test]
    fn barrier_values() {
        assert!((barrier_zeta(1.0, 3, &[0.0; 3], 2.0, &[0.0; 3]) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(barrier_zeta(1.0, 3, &[0.0; 3], 2.0, &[2.0, 0.0, 0.0]), 0.0);
        assert_eq!(barrier_zeta(0.5, 1, &[0.0], 1.0, &[3.0]), 0.0);
        assert!((barrier_constant(1.0, 4) - 1.0 / 8.0).abs() < 1e-15);
        // -Δζ = 1 by central differences
        let h = 1e-3;
        for i in 0..10 {
            let x = [0.1 * i as f64 - 0.45, 0.05 * i as f64 - 0.2, 0.3];
            let z = |y: &[f64]| barrier_zeta(1.0, 3, &[0.0; 3], 2.0, y);
            let mut lap = 0.0;
            for d in 0..3 {
                let mut a = x;
                let mut b = x;
                a[d] += h;
                b[d] -= h;
                lap += (z(&a) - 2.0 * z(&x) + z(&b)) / (h * h);
            }
            assert!((-lap - 1.0).abs() < 1e-8, "{lap}");
        }
    }

    #[test]
    fn rho_bound_examples() {
        assert!((lower_bound_rho(3, 1.0, 2.0, 2.0, 1.0 / 6.0).unwrap() - 1.5).abs() < 1e-14);
        let d = 6f64.sqrt();
        for p in [1.5, 2.0, 7.0] {
            assert!((lower_bound_rho(3, 1.0, p, d, 1.0 / 6.0).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!((lower_bound_rho(3, 1.0, 1e9, 2.0, 1.0 / 6.0).unwrap() - 1.0).abs() < 1e-8);
        assert!(lower_bound_rho(3, 1.0, 1.0, 2.0, 1.0 / 6.0).is_err());
    }

    #[test]
    fn source_term_branches() {
        // t = 0.1: damped iteration from zero climbs monotonically to the minimal branch;
        // started above the upper branch it blows up.
        let (k, g) = ball_setup(24);
        let rule = quadrature_for(k.domain(), 12).unwrap();
        let nl = NonLinearity::new(0.0, 2.0, 0.1, Point::zeros(3)).unwrap();
        let op = KOperator::assemble(&k, &g, &nl, &rule).unwrap();
        let cfg = SolverConfig::default();
        let zero = g.with_values(vec![0.0; g.len()]).unwrap();
        let low = picard_with(&op, &nl, &cfg, &zero).unwrap();
        assert!(low.converged);
        assert!((low.sup_norm() - 0.01669).abs() < 2e-4, "{}", low.sup_norm());
        let big = g.with_values(g.values.iter().map(|v| 200.0 * v).collect()).unwrap();
        let high = picard_with(&op, &nl, &cfg, &big).unwrap();
        assert!(high.diverged);
        // monotone in t along the minimal branch
        let nl2 = NonLinearity::new(0.0, 2.0, 0.2, Point::zeros(3)).unwrap();
        let op2 = KOperator::assemble(&k, &g, &nl2, &rule).unwrap();
        let low2 = picard_with(&op2, &nl2, &cfg, &zero).unwrap();
        assert!(low2.converged);
        assert!(low.solution.values.iter().zip(&low2.solution.values).all(|(a, b)| a <= b));
    }

    #[test]
    fn navier_composite_torsion() {
        let ball = DomainSpec::ball([0.0; 4], 1.0).unwrap();
        let base = GreenKernel::new(1.0, ball.clone()).unwrap();
        let rule = quadrature_for(&ball, 12).unwrap();
        let g2 = green_iterated(base, 2, rule.clone()).unwrap();
        let nodes = radial_nodes(&[0.0; 4], 1.0, 24);
        let zero = GridFunction::new(nodes.clone(), vec![0.0; nodes.len()], Interp::RadialCubic { center: Point::zeros(4) }).unwrap();
        let nl = NonLinearity::new(0.0, 2.0, 1.0, Point::zeros(4)).unwrap();
        let w = apply_k(&g2, &zero, &nl, &rule).unwrap();
        // -Δh = 1: h = (1-r²)/8; -Δw = h: w = (r⁴ - 3r² + 2)/192 in ℝ⁴
        for (x, v) in w.nodes.iter().zip(&w.values) {
            let r2 = crate::point::dot(x, x);
            let exact = (r2 * r2 - 3.0 * r2 + 2.0) / 192.0;
            assert!((v - exact).abs() < 1e-5, "{v} vs {exact}");
        }
    }
}
