use serde::{Deserialize, Serialize};

use super::polygon::Polygon;
use crate::error::{invalid, Result};
use crate::point::{dist, dot, norm, Point};

/// An orthonormal frame; `axes[i]` is the image of the `i`-th standard basis vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Frame {
    pub axes: Vec<Vec<f64>>,
}

impl Frame {
    pub fn identity(n: usize) -> Self {
        Frame {
            axes: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    /// Frame rotated by `angle` in the `(i, j)` coordinate plane.
    pub fn rotation(n: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut f = Frame::identity(n);
        let (s, c) = angle.sin_cos();
        f.axes[i][i] = c;
        f.axes[i][j] = s;
        f.axes[j][i] = -s;
        f.axes[j][j] = c;
        f
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.axes.len() != n || self.axes.iter().any(|a| a.len() != n) {
            return Err(invalid(format!("frame must be {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                if (dot(&self.axes[i], &self.axes[j]) - expect).abs() > 1e-12 {
                    return Err(invalid("frame is not orthonormal to 1e-12"));
                }
            }
        }
        Ok(())
    }

    /// Coordinates of `v` in this frame (`O^{-1} v`).
    pub fn to_local(&self, v: &[f64]) -> Point {
        Point(self.axes.iter().map(|a| dot(a, v)).collect())
    }

    /// `O c`.
    pub fn to_global(&self, c: &[f64]) -> Point {
        let n = c.len();
        let mut out = Point::zeros(n);
        for (ci, a) in c.iter().zip(&self.axes) {
            for k in 0..n {
                out[k] += ci * a[k];
            }
        }
        out
    }
}

/// Angular description of a cone's cross-section.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum ConeSection {
    /// `{ω : ω·O e_i > 0, i < k}`
    CapProduct { k: usize, frame: Option<Frame> },
    /// Planar cap `{θ : |θ - axis_angle| < half_opening}`.
    Cap2D { axis_angle: f64, half_opening: f64 },
}

/// The shape of a [`DomainSpec`]. The JSON tag is `"kind"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainKind {
    FreeSpace,
    /// `P + O({x_1, ..., x_k > 0})`
    HalfSpaceK {
        k: usize,
        vertex: Point,
        #[serde(default)]
        frame: Option<Frame>,
    },
    Ball {
        center: Point,
        radius: f64,
    },
    /// Intersection of the `1/2^k`-space with `B_R(P)`; `k = 0` is the full ball.
    BallK {
        k: usize,
        vertex: Point,
        #[serde(default)]
        frame: Option<Frame>,
        radius: f64,
    },
    /// The `1/2^k`-space minus the closed `1/2^k`-ball.
    ExteriorBallK {
        k: usize,
        vertex: Point,
        #[serde(default)]
        frame: Option<Frame>,
        radius: f64,
    },
    TruncatedCone {
        vertex: Point,
        section: ConeSection,
        r_min: f64,
        r_max: f64,
    },
    Polygon2D {
        vertices: Vec<[f64; 2]>,
    },
    Interval {
        a: f64,
        b: f64,
    },
    /// `{origin + t·direction : t > 0}` with `direction = ±1`.
    HalfLine {
        origin: f64,
        direction: f64,
    },
}

/// A computational domain in `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub dim: usize,
    #[serde(flatten)]
    pub kind: DomainKind,
}

impl DomainSpec {
    pub fn new(dim: usize, kind: DomainKind) -> Result<Self> {
        let d = DomainSpec { dim, kind };
        d.validate()?;
        Ok(d)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: DomainSpec = serde_json::from_str(text)?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::to_value(self)?)?)
    }

    pub fn free_space(n: usize) -> Self {
        DomainSpec {
            dim: n,
            kind: DomainKind::FreeSpace,
        }
    }

    pub fn ball(center: impl Into<Point>, radius: f64) -> Result<Self> {
        let center = center.into();
        Self::new(center.dim(), DomainKind::Ball { center, radius })
    }

    pub fn half_space_k(n: usize, k: usize) -> Result<Self> {
        Self::new(
            n,
            DomainKind::HalfSpaceK {
                k,
                vertex: Point::zeros(n),
                frame: None,
            },
        )
    }

    pub fn ball_k(n: usize, k: usize, radius: f64) -> Result<Self> {
        Self::new(
            n,
            DomainKind::BallK {
                k,
                vertex: Point::zeros(n),
                frame: None,
                radius,
            },
        )
    }

    pub fn exterior_ball_k(n: usize, k: usize, radius: f64) -> Result<Self> {
        Self::new(
            n,
            DomainKind::ExteriorBallK {
                k,
                vertex: Point::zeros(n),
                frame: None,
                radius,
            },
        )
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Self::new(2, DomainKind::Polygon2D { vertices })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(1, DomainKind::Interval { a, b })
    }

    pub fn half_line(origin: f64, direction: f64) -> Result<Self> {
        Self::new(1, DomainKind::HalfLine { origin, direction })
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim;
        if n == 0 {
            return Err(invalid("dimension must be at least 1"));
        }
        let check_point = |p: &Point, what: &str| -> Result<()> {
            if p.dim() != n || !p.is_finite() {
                return Err(invalid(format!("{what} must be a finite point of R^{n}")));
            }
            Ok(())
        };
        let check_frame = |f: &Option<Frame>| -> Result<()> {
            match f {
                Some(f) => f.validate(n),
                None => Ok(()),
            }
        };
        match &self.kind {
            DomainKind::FreeSpace => {}
            DomainKind::HalfSpaceK { k, vertex, frame } => {
                check_point(vertex, "vertex")?;
                check_frame(frame)?;
                if *k < 1 || *k > n {
                    return Err(invalid("HalfSpaceK needs 1 <= k <= n"));
                }
            }
            DomainKind::Ball { center, radius } => {
                check_point(center, "center")?;
                if !(*radius > 0.0) {
                    return Err(invalid("radius must be positive"));
                }
            }
            DomainKind::BallK {
                k,
                vertex,
                frame,
                radius,
            }
            | DomainKind::ExteriorBallK {
                k,
                vertex,
                frame,
                radius,
            } => {
                check_point(vertex, "vertex")?;
                check_frame(frame)?;
                if *k > n {
                    return Err(invalid("k must satisfy k <= n"));
                }
                if !(*radius > 0.0) {
                    return Err(invalid("radius must be positive"));
                }
            }
            DomainKind::TruncatedCone {
                vertex,
                section,
                r_min,
                r_max,
            } => {
                check_point(vertex, "vertex")?;
                if !(*r_min >= 0.0 && r_min < r_max) {
                    return Err(invalid("TruncatedCone needs 0 <= r_min < r_max"));
                }
                match section {
                    ConeSection::CapProduct { k, frame } => {
                        check_frame(frame)?;
                        if *k < 1 || *k > n {
                            return Err(invalid("cap product needs 1 <= k <= n"));
                        }
                    }
                    ConeSection::Cap2D { half_opening, .. } => {
                        if n != 2 {
                            return Err(invalid("Cap2D requires n = 2"));
                        }
                        if !(*half_opening > 0.0 && *half_opening <= std::f64::consts::PI) {
                            return Err(invalid("half opening must lie in (0, π]"));
                        }
                    }
                }
            }
            DomainKind::Polygon2D { vertices } => {
                if n != 2 {
                    return Err(invalid("Polygon2D requires dim = 2"));
                }
                let poly = Polygon::new(vertices);
                if vertices
                    .iter()
                    .any(|v| !v[0].is_finite() || !v[1].is_finite())
                {
                    return Err(invalid("polygon vertices must be finite"));
                }
                if !poly.is_simple() {
                    return Err(invalid("polygon must be simple"));
                }
                if poly.signed_area() <= 0.0 {
                    return Err(invalid("polygon must be positively oriented"));
                }
            }
            DomainKind::Interval { a, b } => {
                if n != 1 || !(a < b) {
                    return Err(invalid("Interval requires dim = 1 and a < b"));
                }
            }
            DomainKind::HalfLine { direction, .. } => {
                if n != 1 || (direction.abs() - 1.0).abs() > 0.0 {
                    return Err(invalid("HalfLine requires dim = 1 and direction = ±1"));
                }
            }
        }
        Ok(())
    }

    pub fn is_bounded(&self) -> bool {
        matches!(
            self.kind,
            DomainKind::Ball { .. }
                | DomainKind::BallK { .. }
                | DomainKind::TruncatedCone { .. }
                | DomainKind::Polygon2D { .. }
                | DomainKind::Interval { .. }
        )
    }

    /// Typical length, used to scale absolute tolerances.
    pub fn length_scale(&self) -> f64 {
        match &self.kind {
            DomainKind::Ball { radius, .. }
            | DomainKind::BallK { radius, .. }
            | DomainKind::ExteriorBallK { radius, .. } => *radius,
            DomainKind::TruncatedCone { r_max, .. } => *r_max,
            DomainKind::Polygon2D { vertices } => Polygon::new(vertices).scale(),
            DomainKind::Interval { a, b } => (b - a).abs().max(a.abs()).max(b.abs()),
            _ => 1.0,
        }
    }

    /// The natural center: the ball center or the cone vertex.
    pub fn anchor(&self) -> Point {
        match &self.kind {
            DomainKind::FreeSpace => Point::zeros(self.dim),
            DomainKind::HalfSpaceK { vertex, .. }
            | DomainKind::BallK { vertex, .. }
            | DomainKind::ExteriorBallK { vertex, .. }
            | DomainKind::TruncatedCone { vertex, .. } => vertex.clone(),
            DomainKind::Ball { center, .. } => center.clone(),
            DomainKind::Polygon2D { vertices } => {
                let m = vertices.len() as f64;
                let cx = vertices.iter().map(|v| v[0]).sum::<f64>() / m;
                let cy = vertices.iter().map(|v| v[1]).sum::<f64>() / m;
                Point::new(&[cx, cy])
            }
            DomainKind::Interval { a, b } => Point::new(&[0.5 * (a + b)]),
            DomainKind::HalfLine { origin, .. } => Point::new(&[*origin]),
        }
    }

    /// Frame of the `1/2^k` kinds (identity when omitted).
    pub fn frame(&self) -> Frame {
        match &self.kind {
            DomainKind::HalfSpaceK { frame, .. }
            | DomainKind::BallK { frame, .. }
            | DomainKind::ExteriorBallK { frame, .. } => {
                frame.clone().unwrap_or_else(|| Frame::identity(self.dim))
            }
            _ => Frame::identity(self.dim),
        }
    }

    /// Signed margins whose positivity defines membership; `contains` is `min > 0`.
    fn margins(&self, x: &[f64]) -> Vec<f64> {
        let orthant = |k: usize, vertex: &Point, frame: &Option<Frame>, out: &mut Vec<f64>| {
            let v: Vec<f64> = x.iter().zip(vertex.iter()).map(|(a, b)| a - b).collect();
            match frame {
                Some(f) => out.extend(f.axes[..k].iter().map(|a| dot(a, &v))),
                None => out.extend_from_slice(&v[..k]),
            }
        };
        let mut out = Vec::with_capacity(4);
        match &self.kind {
            DomainKind::FreeSpace => out.push(f64::INFINITY),
            DomainKind::HalfSpaceK { k, vertex, frame } => orthant(*k, vertex, frame, &mut out),
            DomainKind::Ball { center, radius } => out.push(radius - dist(x, center)),
            DomainKind::BallK {
                k,
                vertex,
                frame,
                radius,
            } => {
                orthant(*k, vertex, frame, &mut out);
                out.push(radius - dist(x, vertex));
            }
            DomainKind::ExteriorBallK {
                k,
                vertex,
                frame,
                radius,
            } => {
                orthant(*k, vertex, frame, &mut out);
                out.push(dist(x, vertex) - radius);
            }
            DomainKind::TruncatedCone {
                vertex,
                section,
                r_min,
                r_max,
            } => {
                let v: Vec<f64> = x.iter().zip(vertex.iter()).map(|(a, b)| a - b).collect();
                let r = norm(&v);
                out.push(r - r_min);
                out.push(r_max - r);
                match section {
                    ConeSection::CapProduct { k, frame } => match frame {
                        Some(f) => out.extend(f.axes[..*k].iter().map(|a| dot(a, &v))),
                        None => out.extend_from_slice(&v[..*k]),
                    },
                    ConeSection::Cap2D {
                        axis_angle,
                        half_opening,
                    } => {
                        let (s, c) = axis_angle.sin_cos();
                        let cos_angle = if r > 0.0 {
                            (v[0] * c + v[1] * s) / r
                        } else {
                            -1.0
                        };
                        out.push(r * (cos_angle - half_opening.cos()));
                    }
                }
            }
            DomainKind::Polygon2D { vertices } => {
                let poly = Polygon::new(vertices);
                let p = [x[0], x[1]];
                let d = poly.boundary_distance(p);
                out.push(if poly.contains(p) { d } else { -d });
            }
            DomainKind::Interval { a, b } => {
                out.push(x[0] - a);
                out.push(b - x[0]);
            }
            DomainKind::HalfLine { origin, direction } => out.push((x[0] - origin) * direction),
        }
        out
    }

    /// Open-set membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim && self.margins(x).into_iter().all(|m| m > 0.0)
    }

    /// Closed-set membership with absolute tolerance `tol`.
    pub fn contains_closed(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.dim && self.margins(x).into_iter().all(|m| m >= -tol)
    }

    /// True when `x` is in the closure but not in the open set (to `tol`).
    pub fn on_boundary(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim {
            return false;
        }
        let m = self.margins(x);
        m.iter().all(|v| *v >= -tol) && m.iter().any(|v| v.abs() <= tol)
    }

    /// Ray parameters `t > 0` where `origin + t·dir` crosses a boundary surface of the domain.
    /// `dir` must be a unit vector.
    pub fn ray_crossings(&self, origin: &[f64], dir: &[f64]) -> Vec<f64> {
        let mut ts = Vec::new();
        let plane = |normal: &[f64], base: &[f64], ts: &mut Vec<f64>| {
            let denom = dot(normal, dir);
            if denom != 0.0 {
                let num: f64 = normal
                    .iter()
                    .zip(base.iter().zip(origin))
                    .map(|(nv, (b, o))| nv * (b - o))
                    .sum();
                ts.push(num / denom);
            }
        };
        let sphere = |center: &[f64], r: f64, ts: &mut Vec<f64>| {
            let f: Vec<f64> = origin.iter().zip(center).map(|(o, c)| o - c).collect();
            let b = dot(&f, dir);
            let c = dot(&f, &f) - r * r;
            let disc = b * b - c;
            if disc >= 0.0 {
                let sq = disc.sqrt();
                ts.push(-b - sq);
                ts.push(-b + sq);
            }
        };
        let orthant_planes =
            |k: usize, vertex: &Point, frame: &Option<Frame>, ts: &mut Vec<f64>| {
                let f = frame.clone().unwrap_or_else(|| Frame::identity(self.dim));
                for a in &f.axes[..k] {
                    plane(a, vertex, ts);
                }
            };
        match &self.kind {
            DomainKind::FreeSpace => {}
            DomainKind::HalfSpaceK { k, vertex, frame } => {
                orthant_planes(*k, vertex, frame, &mut ts)
            }
            DomainKind::Ball { center, radius } => sphere(center, *radius, &mut ts),
            DomainKind::BallK {
                k,
                vertex,
                frame,
                radius,
            }
            | DomainKind::ExteriorBallK {
                k,
                vertex,
                frame,
                radius,
            } => {
                orthant_planes(*k, vertex, frame, &mut ts);
                sphere(vertex, *radius, &mut ts);
            }
            DomainKind::TruncatedCone {
                vertex,
                section,
                r_min,
                r_max,
            } => {
                sphere(vertex, *r_min, &mut ts);
                sphere(vertex, *r_max, &mut ts);
                match section {
                    ConeSection::CapProduct { k, frame } => {
                        orthant_planes(*k, vertex, frame, &mut ts)
                    }
                    ConeSection::Cap2D {
                        axis_angle,
                        half_opening,
                    } => {
                        for side in [-1.0, 1.0] {
                            let th = axis_angle + side * half_opening;
                            plane(&[-th.sin(), th.cos()], vertex, &mut ts);
                        }
                    }
                }
            }
            DomainKind::Polygon2D { vertices } => {
                for (a, b) in Polygon::new(vertices).edges() {
                    let e = [b[0] - a[0], b[1] - a[1]];
                    let denom = dir[0] * e[1] - dir[1] * e[0];
                    if denom == 0.0 {
                        continue;
                    }
                    let w = [a[0] - origin[0], a[1] - origin[1]];
                    let t = (w[0] * e[1] - w[1] * e[0]) / denom;
                    let u = (w[0] * dir[1] - w[1] * dir[0]) / denom;
                    if (-1e-14..=1.0 + 1e-14).contains(&u) {
                        ts.push(t);
                    }
                }
            }
            DomainKind::Interval { a, b } => {
                ts.push((a - origin[0]) / dir[0]);
                ts.push((b - origin[0]) / dir[0]);
            }
            DomainKind::HalfLine { origin: o, .. } => ts.push((o - origin[0]) / dir[0]),
        }
        ts.retain(|t| t.is_finite() && *t > 0.0);
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
        ts
    }

    /// Maximal sub-intervals of `[0, t_max]` along the ray `origin + t·dir` lying in the domain.
    pub fn ray_intervals(&self, origin: &[f64], dir: &[f64], t_max: f64) -> Vec<(f64, f64)> {
        let mut cuts = vec![0.0];
        cuts.extend(
            self.ray_crossings(origin, dir)
                .into_iter()
                .filter(|t| *t < t_max),
        );
        cuts.push(t_max);
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut mid = Point::zeros(self.dim);
        for w in cuts.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 - t0 <= 1e-15 * (1.0 + t1) {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            for i in 0..self.dim {
                mid[i] = origin[i] + tm * dir[i];
            }
            if self.contains(&mid) {
                match out.last_mut() {
                    Some(last) if (last.1 - t0).abs() <= 1e-15 * (1.0 + t0) => last.1 = t1,
                    _ => out.push((t0, t1)),
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_ball() {
        let text = r#"{"kind":"Ball","dim":3,"center":[0,0,0],"radius":1.0}"#;
        let d = DomainSpec::from_json(text).unwrap();
        assert_eq!(d, DomainSpec::ball([0.0, 0.0, 0.0], 1.0).unwrap());
        let back = DomainSpec::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn json_half_space_default_frame() {
        let text = r#"{"kind":"HalfSpaceK","dim":3,"k":2,"vertex":[0,0,0]}"#;
        let d = DomainSpec::from_json(text).unwrap();
        assert!(d.contains(&[1.0, 1.0, -5.0]));
        assert!(!d.contains(&[1.0, -1.0, 0.0]));
    }

    #[test]
    fn invariants_rejected() {
        assert!(DomainSpec::ball([0.0, 0.0], -1.0).is_err());
        assert!(DomainSpec::half_space_k(3, 4).is_err());
        assert!(DomainSpec::interval(1.0, 0.0).is_err());
        let cw = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        assert!(DomainSpec::polygon(cw).is_err());
        let skew = Frame {
            axes: vec![vec![1.0, 0.0], vec![0.1, 1.0]],
        };
        let d = DomainSpec::new(
            2,
            DomainKind::HalfSpaceK {
                k: 1,
                vertex: Point::zeros(2),
                frame: Some(skew),
            },
        );
        assert!(d.is_err());
    }

    #[test]
    fn ray_intervals_ball_and_exterior() {
        let b = DomainSpec::ball([0.0, 0.0, 0.0], 1.0).unwrap();
        let iv = b.ray_intervals(&[0.5, 0.0, 0.0], &[1.0, 0.0, 0.0], 10.0);
        assert_eq!(iv.len(), 1);
        assert!((iv[0].1 - 0.5).abs() < 1e-14);

        let e = DomainSpec::exterior_ball_k(2, 0, 1.0).unwrap();
        let iv = e.ray_intervals(&[-2.0, 0.0], &[1.0, 0.0], 5.0);
        assert_eq!(iv.len(), 2);
        assert!((iv[0].1 - 1.0).abs() < 1e-14);
        assert!((iv[1].0 - 3.0).abs() < 1e-14);
    }

    #[test]
    fn ray_intervals_nonconvex_polygon() {
        let l = DomainSpec::polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let iv = l.ray_intervals(&[1.9, 0.5], &[-s, s], 10.0);
        assert_eq!(iv.len(), 2);
    }

    #[test]
    fn rotated_frame_membership() {
        let f = Frame::rotation(2, 0, 1, std::f64::consts::FRAC_PI_4);
        let d = DomainSpec::new(
            2,
            DomainKind::HalfSpaceK {
                k: 1,
                vertex: Point::zeros(2),
                frame: Some(f),
            },
        )
        .unwrap();
        assert!(d.contains(&[1.0, 0.0]));
        assert!(!d.contains(&[-1.0, 0.0]));
    }
}
