//! Scalar fields: closures and sampled grid functions.

use std::f64::consts::TAU;

use crate::error::{invalid, Result};
use crate::point::{dist, Point};

/// A real function on `R^n`.
pub trait Field: Sync {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> f64;
}

impl<T: Field + ?Sized> Field for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (**self).eval(x)
    }
}

/// Wraps a closure as a [`Field`].
pub struct FnField<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnField<F> {
    pub fn new(dim: usize, f: F) -> Self {
        FnField { dim, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Field for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
}

/// Interpolation rule of a [`GridFunction`].
#[derive(Clone, Debug, PartialEq)]
pub enum Interp {
    /// Cubic spline in `|x - center|`; nodes may repeat a radius, values there are averaged.
    RadialCubic { center: Point },
    /// Tensor grid in polar coordinates (2-D): node `i * n_theta + j` sits at radius
    /// `r_i` and angle `2πj / n_theta`.
    BilinearPolar {
        center: Point,
        n_r: usize,
        n_theta: usize,
    },
    /// 1-D nodes, linear between neighbours, constant beyond the ends.
    PiecewiseLinear1D,
    /// Value of the nearest node.
    Nodal,
}

#[derive(Clone, Debug)]
enum Cache {
    None,
    Spline {
        spline: CubicSpline,
        members: Vec<Vec<usize>>,
    },
    Polar {
        radii: Vec<f64>,
    },
    Line {
        order: Vec<usize>,
    },
}

/// Sampled values with an interpolation rule.
#[derive(Clone, Debug)]
pub struct GridFunction {
    pub nodes: Vec<Point>,
    pub values: Vec<f64>,
    pub interp: Interp,
    cache: Cache,
}

impl GridFunction {
    pub fn new(nodes: Vec<Point>, values: Vec<f64>, interp: Interp) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != values.len() {
            return Err(invalid("grid function needs equally many nodes and values"));
        }
        let n = nodes[0].dim();
        if nodes.iter().any(|p| p.dim() != n || !p.is_finite()) {
            return Err(invalid("nodes must be finite points of one dimension"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values must be finite"));
        }
        check_distinct(&nodes)?;
        let cache = match &interp {
            Interp::RadialCubic { center } => {
                if center.dim() != n {
                    return Err(invalid("center dimension mismatch"));
                }
                let mut pairs: Vec<(f64, f64, usize)> = nodes
                    .iter()
                    .zip(&values)
                    .enumerate()
                    .map(|(j, (p, v))| (dist(p, center), *v, j))
                    .collect();
                pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut r: Vec<f64> = Vec::new();
                let mut y: Vec<f64> = Vec::new();
                let mut members: Vec<Vec<usize>> = Vec::new();
                for (ri, vi, j) in pairs {
                    match r.last() {
                        Some(&last) if (ri - last).abs() <= 1e-12 * (1.0 + last) => {
                            *y.last_mut().unwrap() += vi;
                            members.last_mut().unwrap().push(j);
                        }
                        _ => {
                            r.push(ri);
                            y.push(vi);
                            members.push(vec![j]);
                        }
                    }
                }
                for (yi, m) in y.iter_mut().zip(&members) {
                    *yi /= m.len() as f64;
                }
                let clamp = r[0] == 0.0;
                Cache::Spline {
                    spline: CubicSpline::new(r, y, clamp)?,
                    members,
                }
            }
            Interp::BilinearPolar {
                center,
                n_r,
                n_theta,
            } => {
                if n != 2 || center.dim() != 2 {
                    return Err(invalid("BilinearPolar requires 2-D nodes"));
                }
                if n_r * n_theta != nodes.len() || *n_r < 2 || *n_theta < 3 {
                    return Err(invalid("BilinearPolar needs n_r * n_theta nodes"));
                }
                let radii: Vec<f64> = (0..*n_r)
                    .map(|i| dist(&nodes[i * n_theta], center))
                    .collect();
                if radii.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(invalid("polar radii must increase"));
                }
                Cache::Polar { radii }
            }
            Interp::PiecewiseLinear1D => {
                if n != 1 {
                    return Err(invalid("PiecewiseLinear1D requires 1-D nodes"));
                }
                let mut order: Vec<usize> = (0..nodes.len()).collect();
                order.sort_by(|&a, &b| nodes[a][0].total_cmp(&nodes[b][0]));
                Cache::Line { order }
            }
            Interp::Nodal => Cache::None,
        };
        Ok(GridFunction {
            nodes,
            values,
            interp,
            cache,
        })
    }

    /// Samples `f` at `nodes`.
    pub fn sample(f: &dyn Field, nodes: Vec<Point>, interp: Interp) -> Result<Self> {
        let values = nodes.iter().map(|p| f.eval(p)).collect();
        Self::new(nodes, values, interp)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Same nodes and rule, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.values.len() || values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("values must be finite and match the node count"));
        }
        let mut out = self.clone();
        out.values = values;
        if let Interp::RadialCubic { center } = &self.interp {
            out = GridFunction::new(
                self.nodes.clone(),
                out.values,
                Interp::RadialCubic {
                    center: center.clone(),
                },
            )?;
        }
        Ok(out)
    }

    /// Adds `weight · φ_j(x)` to `row[j]`, where `φ_j` is the interpolant of the `j`-th unit
    /// vector. The interpolant of any value vector `v` is `Σ_j v_j φ_j`.
    pub fn accumulate_cardinals(&self, x: &[f64], weight: f64, row: &mut [f64]) {
        match (&self.interp, &self.cache) {
            (Interp::RadialCubic { center }, Cache::Spline { spline, members }) => {
                spline.for_each_cardinal(dist(x, center), |g, c| {
                    let share = weight * c / members[g].len() as f64;
                    for &j in &members[g] {
                        row[j] += share;
                    }
                });
            }
            (
                Interp::BilinearPolar {
                    center, n_theta, ..
                },
                Cache::Polar { radii },
            ) => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                let (i, fr) = bracket(radii, dx.hypot(dy));
                let th = dy.atan2(dx).rem_euclid(TAU) / TAU * *n_theta as f64;
                let j0 = (th.floor() as usize) % n_theta;
                let j1 = (j0 + 1) % n_theta;
                let ft = th - th.floor();
                row[i * n_theta + j0] += weight * (1.0 - fr) * (1.0 - ft);
                row[i * n_theta + j1] += weight * (1.0 - fr) * ft;
                if fr > 0.0 {
                    row[(i + 1) * n_theta + j0] += weight * fr * (1.0 - ft);
                    row[(i + 1) * n_theta + j1] += weight * fr * ft;
                }
            }
            (Interp::PiecewiseLinear1D, Cache::Line { order }) => {
                let xs: Vec<f64> = order.iter().map(|&k| self.nodes[k][0]).collect();
                let (i, f) = bracket(&xs, x[0]);
                row[order[i]] += weight * (1.0 - f);
                if f > 0.0 {
                    row[order[i + 1]] += weight * f;
                }
            }
            _ => {
                let j = (0..self.nodes.len())
                    .min_by(|&a, &b| dist(&self.nodes[a], x).total_cmp(&dist(&self.nodes[b], x)))
                    .unwrap_or(0);
                row[j] += weight;
            }
        }
    }

    /// Writes `x1,...,xn,u` rows.
    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let n = self.nodes[0].dim();
        let mut wtr = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.push("u".into());
        wtr.write_record(&header)?;
        for (p, v) in self.nodes.iter().zip(&self.values) {
            let mut row: Vec<String> = p.iter().map(|c| c.to_string()).collect();
            row.push(v.to_string());
            wtr.write_record(&row)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

impl Field for GridFunction {
    fn dim(&self) -> usize {
        self.nodes[0].dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match (&self.interp, &self.cache) {
            (Interp::RadialCubic { center }, Cache::Spline { spline, .. }) => {
                spline.eval(dist(x, center))
            }
            (
                Interp::BilinearPolar {
                    center, n_theta, ..
                },
                Cache::Polar { radii },
            ) => {
                let dx = x[0] - center[0];
                let dy = x[1] - center[1];
                let r = dx.hypot(dy);
                let (i, fr) = bracket(radii, r);
                let th = dy.atan2(dx).rem_euclid(TAU) / TAU * *n_theta as f64;
                let j0 = (th.floor() as usize) % n_theta;
                let j1 = (j0 + 1) % n_theta;
                let ft = th - th.floor();
                let v = |ii: usize, jj: usize| self.values[ii * n_theta + jj];
                let lo = (1.0 - ft) * v(i, j0) + ft * v(i, j1);
                if fr == 0.0 {
                    return lo;
                }
                let hi = (1.0 - ft) * v(i + 1, j0) + ft * v(i + 1, j1);
                (1.0 - fr) * lo + fr * hi
            }
            (Interp::PiecewiseLinear1D, Cache::Line { order }) => {
                let xs: Vec<f64> = order.iter().map(|&k| self.nodes[k][0]).collect();
                let (i, f) = bracket(&xs, x[0]);
                if f == 0.0 {
                    return self.values[order[i]];
                }
                (1.0 - f) * self.values[order[i]] + f * self.values[order[i + 1]]
            }
            _ => {
                let mut best = (f64::INFINITY, 0.0);
                for (p, v) in self.nodes.iter().zip(&self.values) {
                    let d = dist(p, x);
                    if d < best.0 {
                        best = (d, *v);
                    }
                }
                best.1
            }
        }
    }
}

/// Index `i` and fraction `f` with `x ≈ (1-f) xs[i] + f xs[i+1]`, clamped to the ends.
fn bracket(xs: &[f64], x: f64) -> (usize, f64) {
    let m = xs.len();
    if m == 1 || x <= xs[0] {
        return (0, 0.0);
    }
    if x >= xs[m - 1] {
        return (m - 1, 0.0);
    }
    let i = xs.partition_point(|&v| v <= x) - 1;
    (i, (x - xs[i]) / (xs[i + 1] - xs[i]))
}

fn check_distinct(nodes: &[Point]) -> Result<()> {
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    idx.sort_by(|&a, &b| {
        nodes[a]
            .iter()
            .zip(nodes[b].iter())
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for w in idx.windows(2) {
        if nodes[w[0]].iter().eq(nodes[w[1]].iter()) {
            return Err(invalid("grid nodes must be distinct"));
        }
    }
    Ok(())
}

/// Cubic spline through `(x_i, y_i)`; natural at the right end, natural or zero-slope on the left.
/// Constant extension outside the data range.
#[derive(Clone, Debug)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
    clamp_left: bool,
    basis: std::sync::OnceLock<Vec<Vec<f64>>>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>, clamp_left: bool) -> Result<Self> {
        let n = x.len();
        if n != y.len() || n == 0 {
            return Err(invalid("spline needs matching nonempty data"));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("spline abscissae must increase"));
        }
        let m = second_derivatives(&x, &y, clamp_left);
        Ok(CubicSpline {
            x,
            y,
            m,
            clamp_left,
            basis: std::sync::OnceLock::new(),
        })
    }

    /// Calls `f(j, φ_j(t))` for every cardinal spline with a nonzero value at `t`.
    pub fn for_each_cardinal(&self, t: f64, mut f: impl FnMut(usize, f64)) {
        let n = self.x.len();
        if n == 1 || t <= self.x[0] {
            return f(0, 1.0);
        }
        if t >= self.x[n - 1] {
            return f(n - 1, 1.0);
        }
        let basis = self.basis.get_or_init(|| {
            (0..n)
                .map(|j| {
                    let mut e = vec![0.0; n];
                    e[j] = 1.0;
                    second_derivatives(&self.x, &e, self.clamp_left)
                })
                .collect()
        });
        let i = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let ca = (a * a * a - a) * h * h / 6.0;
        let cb = (b * b * b - b) * h * h / 6.0;
        for (j, mj) in basis.iter().enumerate() {
            let mut v = ca * mj[i] + cb * mj[i + 1];
            if j == i {
                v += a;
            } else if j == i + 1 {
                v += b;
            }
            if v != 0.0 {
                f(j, v);
            }
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if n == 1 || t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

fn second_derivatives(x: &[f64], y: &[f64], clamp_left: bool) -> Vec<f64> {
    let n = x.len();
    let mut m = vec![0.0; n];
    if n >= 3 || (n == 2 && clamp_left) {
        // tridiagonal system for second derivatives
        let mut a = vec![0.0; n];
        let mut b = vec![1.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        if clamp_left {
            let h = x[1] - x[0];
            b[0] = h / 3.0;
            c[0] = h / 6.0;
            d[0] = (y[1] - y[0]) / h;
        }
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            a[i] = h0 / 6.0;
            b[i] = (h0 + h1) / 3.0;
            c[i] = h1 / 6.0;
            d[i] = (y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0;
        }
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            m[i] = (d[i] - c[i] * m[i + 1]) / b[i];
        }
    }
    m
}
