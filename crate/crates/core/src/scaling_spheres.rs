//! Kelvin comparison functions, the λ₀ sweep and exponent bookkeeping.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{Field, GridFunction, Interp};
use crate::geometry::{direction_grid, kelvin_point};
use crate::point::{dist, Point};

/// Exponents of the model nonlinearity `|x-P|^a u^p` in dimension `n` with operator order `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    pub n: usize,
    pub s: f64,
    pub a: f64,
    pub p: f64,
}

impl ExponentParams {
    pub fn new(n: usize, s: f64, a: f64, p: f64) -> Result<Self> {
        let e = ExponentParams { n, s, a, p };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        check_nsa(self.n, self.s, self.a)?;
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(invalid(format!("p = {} must be a finite number >= 1", self.p)));
        }
        Ok(())
    }

    pub fn is_critical_order(&self) -> bool {
        is_critical_order(self.n, self.s)
    }

    pub fn p_critical(&self) -> Result<f64> {
        p_critical(self.n, self.s, self.a)
    }
}

fn is_critical_order(n: usize, s: f64) -> bool {
    (2.0 * s - n as f64).abs() < 1e-12
}

fn check_nsa(n: usize, s: f64, a: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("dimension must be >= 1"));
    }
    if !(s > 0.0) || 2.0 * s > n as f64 + 1e-12 {
        return Err(invalid(format!("s = {s} must lie in (0, n/2]")));
    }
    let floor = if is_critical_order(n, s) { -(n as f64) } else { -2.0 * s };
    if !(a > floor) {
        return Err(invalid(format!("a = {a} must exceed {floor}")));
    }
    Ok(())
}

/// `(n+2s+2a)/(n-2s)`, or `+∞` when `n = 2s`.
pub fn p_critical(n: usize, s: f64, a: f64) -> Result<f64> {
    check_nsa(n, s, a)?;
    if is_critical_order(n, s) {
        return Ok(f64::INFINITY);
    }
    let n = n as f64;
    Ok((n + 2.0 * s + 2.0 * a) / (n - 2.0 * s))
}

/// Sign convention of the exponent recurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BootstrapDirection {
    /// `μ_{k+1} = pμ_k + (2s+a)`, bounds of the form `u ≥ C|x|^{μ_k}` at infinity.
    DilateOutward,
    /// `μ_{k+1} = pμ_k - (2s+a)`, bounds of the form `u ≥ C/|x|^{μ_k}`.
    DilateFundamental,
    /// `μ_{k+1} = pμ_k + (2s+a)` near the vertex.
    ShrinkInward,
}

impl BootstrapDirection {
    pub fn sign(self) -> f64 {
        match self {
            BootstrapDirection::DilateFundamental => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    DivergesPlus,
    DivergesMinus,
    FixedPoint,
    Converges,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BootstrapRun {
    pub params: ExponentParams,
    pub mu0: f64,
    pub direction: BootstrapDirection,
    /// `μ_0, μ_1, ..., μ_K`.
    pub sequence: Vec<f64>,
    pub verdict: Verdict,
    /// The fixed point of the affine map, `None` when `p = 1`.
    pub fixed_point: Option<f64>,
}

impl BootstrapRun {
    /// First index `k` with `μ_k > threshold`.
    pub fn first_above(&self, threshold: f64) -> Option<usize> {
        self.sequence.iter().position(|&m| m > threshold)
    }

    /// First index `k` with `μ_k < threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.sequence.iter().position(|&m| m < threshold)
    }
}

/// Runs `K` steps of the affine exponent recurrence.
///
/// The verdict is read off the affine map rather than the finite sequence: with
/// `c = ±(2s+a)` and `p > 1` the orbit leaves the fixed point `-c/(p-1)` geometrically on
/// the side it starts from; for `p = 1` it drifts linearly in the direction of `c`.
pub fn bootstrap(params: &ExponentParams, mu0: f64, direction: BootstrapDirection, k: usize) -> Result<BootstrapRun> {
    params.validate()?;
    if k == 0 {
        return Err(invalid("K must be >= 1"));
    }
    let p = params.p;
    let c = direction.sign() * (2.0 * params.s + params.a);
    let mut sequence = Vec::with_capacity(k + 1);
    sequence.push(mu0);
    let mut mu = mu0;
    for _ in 0..k {
        mu = p * mu + c;
        sequence.push(mu);
    }
    let (verdict, fixed_point) = if p == 1.0 {
        let v = if c > 0.0 {
            Verdict::DivergesPlus
        } else if c < 0.0 {
            Verdict::DivergesMinus
        } else {
            Verdict::FixedPoint
        };
        (v, None)
    } else {
        let star = -c / (p - 1.0);
        let gap = mu0 - star;
        let v = if gap.abs() <= 1e-12 * star.abs().max(1.0) {
            Verdict::FixedPoint
        } else if p < 1.0 {
            Verdict::Converges
        } else if gap > 0.0 {
            Verdict::DivergesPlus
        } else {
            Verdict::DivergesMinus
        };
        (v, Some(star))
    };
    Ok(BootstrapRun {
        params: *params,
        mu0,
        direction,
        sequence,
        verdict,
        fixed_point,
    })
}

/// Where ω^λ is sampled relative to the sphere `S_λ(P)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Nodes of `u` inside `B_λ(P)`.
    Inside,
    /// Kelvin images of the nodes of `u` outside `B̄_λ(P)`.
    Outside,
}

/// `ω^λ(x) = (λ/|x-P|)^e u(x^λ) - u(x)`.
pub fn omega_at(u: &dyn Field, p: &[f64], lambda: f64, order_exp: f64, x: &[f64]) -> Result<f64> {
    let r = dist(x, p);
    let xl = kelvin_point(x, p, lambda)?;
    Ok((lambda / r).powf(order_exp) * u.eval(&xl) - u.eval(x))
}

/// ω^λ for the order-`s` weight `e = n - 2s`, as a nearest-node grid function.
pub fn omega_lambda(u: &GridFunction, p: &[f64], lambda: f64, s: f64, side: Side) -> Result<GridFunction> {
    let n = u.dim();
    omega_lambda_exp(u, p, lambda, n as f64 - 2.0 * s, side)
}

/// [`omega_lambda`] with an explicit weight exponent (`0` in critical order).
pub fn omega_lambda_exp(u: &GridFunction, p: &[f64], lambda: f64, order_exp: f64, side: Side) -> Result<GridFunction> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda must be positive"));
    }
    if p.len() != u.dim() {
        return Err(invalid("center dimension mismatch"));
    }
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for (y, &uy) in u.nodes.iter().zip(&u.values) {
        let r = dist(y, p);
        match side {
            Side::Inside if r > 0.0 && r < lambda => {
                let yl = kelvin_point(y, p, lambda)?;
                values.push((lambda / r).powf(order_exp) * u.eval(&yl) - uy);
                nodes.push(y.clone());
            }
            Side::Outside if r > lambda => {
                // x = y^λ, so u(x^λ) = u(y) is exact
                let x = kelvin_point(y, p, lambda)?;
                let rx = dist(&x, p);
                values.push((lambda / rx).powf(order_exp) * uy - u.eval(&x));
                nodes.push(x);
            }
            _ => {}
        }
    }
    if nodes.is_empty() {
        return Err(Error::Domain(format!("no samples on the requested side of S_{lambda}")));
    }
    GridFunction::new(nodes, values, Interp::Nodal)
}

/// Which way the sphere moves in the λ₀ sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepDirection {
    /// Grow λ from `d_Ω` while ω^μ ≥ 0 in `Ω ∩ B_μ`.
    Dilate,
    /// Shrink λ from `ρ_Ω` while ω^μ ≤ 0 on `(Ω \ B_μ)^μ`.
    Shrink,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lambda0Report {
    /// The sup (dilate) or inf (shrink) of the admissible grid values. When no grid value is
    /// admissible this is the starting endpoint and `admissible_empty` is set.
    pub lambda0: f64,
    /// First grid value where the sign condition fails.
    pub first_failure: Option<f64>,
    pub min_margin_at_failure: Option<f64>,
    pub admissible_empty: bool,
    pub tolerance: f64,
    /// Grid in sweep order.
    pub grid: Vec<f64>,
    /// Signed margin per grid value: `min ω` (dilate) or `-max ω` (shrink); `None` without samples.
    pub margins: Vec<Option<f64>>,
}

/// Sweeps `grid` with ω^μ evaluated exactly at `samples` (weight `n - 2s`).
pub fn find_lambda0(
    u: &dyn Field,
    samples: &[Point],
    p: &[f64],
    s: f64,
    direction: SweepDirection,
    grid: &[f64],
) -> Result<Lambda0Report> {
    find_lambda0_exp(u, samples, p, u.dim() as f64 - 2.0 * s, direction, grid)
}

/// [`find_lambda0`] with an explicit weight exponent.
pub fn find_lambda0_exp(
    u: &dyn Field,
    samples: &[Point],
    p: &[f64],
    order_exp: f64,
    direction: SweepDirection,
    grid: &[f64],
) -> Result<Lambda0Report> {
    if grid.is_empty() {
        return Err(invalid("empty lambda grid"));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("lambda grid must be strictly increasing"));
    }
    if grid[0] <= 0.0 {
        return Err(invalid("lambda grid must be positive"));
    }
    let mut sup: f64 = 0.0;
    for x in samples {
        if dist(x, p) > 0.0 {
            let v = u.eval(x);
            if !(v > 0.0) {
                return Err(Error::Domain("u must be positive at every sample".into()));
            }
            sup = sup.max(v);
        }
    }
    let tol = 1e-10 * sup;
    let mut order: Vec<f64> = grid.to_vec();
    if direction == SweepDirection::Shrink {
        order.reverse();
    }
    let margins: Vec<Option<f64>> = order
        .par_iter()
        .map(|&mu| margin(u, samples, p, order_exp, direction, mu))
        .collect::<Result<_>>()?;
    let mut last_ok = None;
    let mut failure = None;
    for (i, m) in margins.iter().enumerate() {
        match m {
            Some(v) if *v < -tol => {
                failure = Some((order[i], *v));
                break;
            }
            _ => last_ok = Some(order[i]),
        }
    }
    Ok(Lambda0Report {
        lambda0: last_ok.unwrap_or(order[0]),
        first_failure: failure.map(|f| f.0),
        min_margin_at_failure: failure.map(|f| f.1),
        admissible_empty: last_ok.is_none(),
        tolerance: tol,
        grid: order,
        margins,
    })
}

fn margin(u: &dyn Field, samples: &[Point], p: &[f64], e: f64, direction: SweepDirection, mu: f64) -> Result<Option<f64>> {
    let mut worst: Option<f64> = None;
    for y in samples {
        let r = dist(y, p);
        let m = match direction {
            SweepDirection::Dilate if r > 0.0 && r < mu => omega_at(u, p, mu, e, y)?,
            SweepDirection::Shrink if r > mu => {
                let x = kelvin_point(y, p, mu)?;
                -omega_at(u, p, mu, e, &x)?
            }
            _ => continue,
        };
        worst = Some(worst.map_or(m, |w| w.min(m)));
    }
    Ok(worst)
}

/// `|x-P|^{-(n-2s)/2}`, the radial profile fixed by every Kelvin transform about `P`.
pub fn kelvin_invariant_profile(n: usize, s: f64, p: &[f64], x: &[f64]) -> f64 {
    dist(x, p).powf(-(n as f64 - 2.0 * s) / 2.0)
}

/// `count` points `P + r_i w_i` with log-spaced radii in `[r0, r1]` and directions cycling
/// through a 16-point direction grid.
pub fn log_radial_samples(p: &[f64], r0: f64, r1: f64, count: usize) -> Vec<Point> {
    let dirs = direction_grid(p.len(), 16);
    (0..count)
        .map(|i| {
            let r = if count == 1 { r0 } else { r0 * (r1 / r0).powf(i as f64 / (count - 1) as f64) };
            let w = &dirs[i % dirs.len()];
            Point(p.iter().zip(w.iter()).map(|(c, d)| c + r * d).collect())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FnField;

    #[test]
    fn critical_exponents() {
        assert_eq!(p_critical(3, 1.0, 0.0).unwrap(), 5.0);
        assert_eq!(p_critical(4, 1.0, 2.0).unwrap(), 5.0);
        assert_eq!(p_critical(2, 1.0, 0.0).unwrap(), f64::INFINITY);
        assert!(p_critical(3, 1.0, -2.0).is_err());
        assert!(p_critical(2, 1.0, -1.5).is_ok());
    }

    #[test]
    fn bootstrap_examples() {
        let e = |p| ExponentParams::new(3, 1.0, 0.0, p).unwrap();
        let r = bootstrap(&e(2.0), -0.5, BootstrapDirection::DilateOutward, 3).unwrap();
        assert_eq!(r.sequence, vec![-0.5, 1.0, 4.0, 10.0]);
        assert_eq!(r.verdict, Verdict::DivergesPlus);
        let r = bootstrap(&e(5.0), -0.5, BootstrapDirection::DilateOutward, 20).unwrap();
        assert!(r.sequence.iter().all(|&m| m == -0.5));
        assert_eq!(r.verdict, Verdict::FixedPoint);
        let r = bootstrap(&e(7.0), -0.5, BootstrapDirection::DilateOutward, 2).unwrap();
        assert_eq!(r.sequence, vec![-0.5, -1.5, -8.5]);
        assert_eq!(r.verdict, Verdict::DivergesMinus);
    }

    #[test]
    fn conventions_are_mirror_images() {
        let e = ExponentParams::new(3, 1.0, 0.5, 2.5).unwrap();
        let plus = bootstrap(&e, -0.5, BootstrapDirection::DilateOutward, 30).unwrap();
        let minus = bootstrap(&e, 0.5, BootstrapDirection::DilateFundamental, 30).unwrap();
        for (a, b) in plus.sequence.iter().zip(&minus.sequence) {
            assert_eq!(*a, -*b);
        }
        assert_eq!(plus.verdict, Verdict::DivergesPlus);
        assert_eq!(minus.verdict, Verdict::DivergesMinus);
    }

    #[test]
    fn omega_of_constant() {
        let f = FnField::new(3, |_: &[f64]| 1.0);
        let w = omega_at(&f, &[0.0; 3], 1.0, 1.0, &[0.5, 0.0, 0.0]).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert!(omega_at(&f, &[0.0; 3], 1.0, 1.0, &[0.0; 3]).is_err());
    }

    #[test]
    fn omega_vanishes_for_invariant_profile() {
        // closed under r ↦ 1/r, so the Kelvin images land on nodes
        let nodes: Vec<Point> = (-40..=40).map(|k| Point::new(&[2f64.powf(k as f64 / 8.0)])).collect();
        let u = GridFunction::sample(
            &FnField::new(1, |x: &[f64]| kelvin_invariant_profile(3, 1.0, &[0.0], x)),
            nodes,
            Interp::PiecewiseLinear1D,
        )
        .unwrap();
        let f = FnField::new(3, |x: &[f64]| kelvin_invariant_profile(3, 1.0, &[0.0; 3], x));
        for x in log_radial_samples(&[0.0; 3], 1e-3, 0.999, 100) {
            assert!(omega_at(&f, &[0.0; 3], 1.0, 1.0, &x).unwrap().abs() < 1e-12);
        }
        let w = omega_lambda_exp(&u, &[0.0], 1.0, 1.0, Side::Inside).unwrap();
        assert!(w.values.iter().all(|v| v.abs() < 1e-12));
        let w = omega_lambda_exp(&u, &[0.0], 1.0, 1.0, Side::Outside).unwrap();
        assert!(w.nodes.iter().all(|x| x[0].abs() < 1.0));
    }

    #[test]
    fn anti_symmetry() {
        let f = FnField::new(3, |x: &[f64]| (-crate::point::dot(x, x)).exp() * (1.0 + x[0] * 0.3));
        let p = [0.1, -0.2, 0.0];
        for x in log_radial_samples(&[0.0; 3], 0.05, 3.0, 200) {
            let lam = 0.8;
            let xl = kelvin_point(&x, &p, lam).unwrap();
            let a = omega_at(&f, &p, lam, 1.0, &x).unwrap();
            let b = omega_at(&f, &p, lam, 1.0, &xl).unwrap();
            let w = (lam / dist(&x, &p)).powf(1.0);
            assert!((a + w * b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn lambda0_invariant_profile_never_fails() {
        let f = FnField::new(3, |x: &[f64]| kelvin_invariant_profile(3, 1.0, &[0.0; 3], x));
        let samples = log_radial_samples(&[0.0; 3], 1e-3, 10.0, 300);
        let grid: Vec<f64> = (1..=40).map(|i| i as f64 * 0.25).collect();
        let r = find_lambda0(&f, &samples, &[0.0; 3], 1.0, SweepDirection::Dilate, &grid).unwrap();
        assert_eq!(r.lambda0, 10.0);
        assert!(r.first_failure.is_none());
    }

    #[test]
    fn lambda0_gaussian_refines_consistently() {
        let f = FnField::new(3, |x: &[f64]| (-crate::point::dot(x, x)).exp());
        let samples = log_radial_samples(&[0.0; 3], 0.05, 5.0, 400);
        let coarse: Vec<f64> = (1..=30).map(|i| i as f64 * 0.1).collect();
        let fine: Vec<f64> = (1..=300).map(|i| i as f64 * 0.01).collect();
        let c = find_lambda0(&f, &samples, &[0.0; 3], 1.0, SweepDirection::Dilate, &coarse).unwrap();
        let d = find_lambda0(&f, &samples, &[0.0; 3], 1.0, SweepDirection::Dilate, &fine).unwrap();
        assert!(c.first_failure.is_some());
        assert!(!c.admissible_empty);
        assert!((c.lambda0 - d.lambda0).abs() <= 0.1 + 1e-12, "{} vs {}", c.lambda0, d.lambda0);
        assert!(c.lambda0 <= d.lambda0 + 1e-12);
    }

    #[test]
    fn shrink_sweep_on_ball_profile() {
        // the ball's Green function with pole at the center: ω^λ = (1+λ)(1/λ - 1/|x|) ≤ 0 inside B_λ
        let f = FnField::new(3, |x: &[f64]| 1.0 / crate::point::norm(x) - 1.0);
        let samples = log_radial_samples(&[0.0; 3], 1e-2, 0.999, 300);
        let grid: Vec<f64> = (1..20).map(|i| i as f64 * 0.05).collect();
        let r = find_lambda0(&f, &samples, &[0.0; 3], 1.0, SweepDirection::Shrink, &grid).unwrap();
        assert!((r.grid[0] - 0.95).abs() < 1e-12);
        assert!(r.first_failure.is_none());
        assert!((r.lambda0 - 0.05).abs() < 1e-12);
    }

    #[test]
    fn critical_order_plain_comparison() {
        // with weight exponent 0, ω^λ(x) = u(x^λ) - u(x), which is ≤ 0 outside B_λ for
        // radially non-decreasing u
        let f = FnField::new(2, |x: &[f64]| crate::point::norm(x).ln_1p());
        for x in log_radial_samples(&[0.0; 2], 1.01, 20.0, 200) {
            let w = omega_at(&f, &[0.0; 2], 1.0, 0.0, &x).unwrap();
            assert!(w <= 1e-15);
        }
    }
}
