//! Blow-up rescaling of planar polygons and of sampled solutions.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::field::{GridFunction, Interp};
use crate::geometry::polygon::{
    interior_angle_sweep, interior_angle_turning, normalize_angle, point_segment_distance, segment_circle_params,
};
use crate::geometry::{DomainKind, DomainSpec, Polygon};
use crate::point::Point;

fn vertices_of(dom: &DomainSpec) -> Result<&[[f64; 2]]> {
    match &dom.kind {
        DomainKind::Polygon2D { vertices } => Ok(vertices),
        _ => Err(Error::Unsupported("blow-up geometry is implemented for 2-D polygons".into())),
    }
}

fn boundary_tol(vertices: &[[f64; 2]]) -> f64 {
    1e-12 * Polygon::new(vertices).scale()
}

/// `Ω_ρ = (Ω - x)/ρ` for a boundary point `x`.
pub fn rescale_domain(dom: &DomainSpec, anchor: [f64; 2], rho: f64) -> Result<DomainSpec> {
    let v = vertices_of(dom)?;
    if !(rho > 0.0) || !rho.is_finite() {
        return Err(invalid("rho must be positive"));
    }
    if !Polygon::new(v).on_boundary(anchor, boundary_tol(v)) {
        return Err(Error::Domain(format!("anchor {anchor:?} is not on the boundary")));
    }
    let scaled = v
        .iter()
        .map(|p| [(p[0] - anchor[0]) / rho, (p[1] - anchor[1]) / rho])
        .collect();
    DomainSpec::polygon(scaled)
}

/// Tangent cone of a polygon at a boundary point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cone {
    pub apex: [f64; 2],
    /// Unit direction where the interior sweep starts (outgoing edge).
    pub start: [f64; 2],
    /// Opening angle, swept counterclockwise from `start`.
    pub angle: f64,
    /// Vertex index, or `None` at an edge point.
    pub vertex: Option<usize>,
}

impl Cone {
    /// Membership of `x - apex` in the closed sector.
    pub fn contains(&self, x: [f64; 2]) -> bool {
        let d = [x[0] - self.apex[0], x[1] - self.apex[1]];
        if d[0] == 0.0 && d[1] == 0.0 {
            return true;
        }
        let a0 = self.start[1].atan2(self.start[0]);
        let rel = normalize_angle(d[1].atan2(d[0]) - a0);
        rel <= self.angle + 1e-14
    }

    /// A polygon equal to the sector inside `B_r(apex)` for any `r <= radius`.
    pub fn as_polygon(&self, radius: f64) -> Vec<[f64; 2]> {
        // chords of a circle of radius R/cos(step/2) stay outside B_R
        let steps = ((self.angle / (TAU / 16.0)).ceil() as usize).max(1);
        let step = self.angle / steps as f64;
        let big = radius / (0.5 * step).cos();
        let a0 = self.start[1].atan2(self.start[0]);
        let mut out = vec![self.apex];
        out.push([self.apex[0] + radius * a0.cos(), self.apex[1] + radius * a0.sin()]);
        for i in 0..steps {
            let th = a0 + step * (i as f64 + 0.5);
            out.push([self.apex[0] + big * th.cos(), self.apex[1] + big * th.sin()]);
        }
        let a1 = a0 + self.angle;
        out.push([self.apex[0] + radius * a1.cos(), self.apex[1] + radius * a1.sin()]);
        if (self.angle - TAU).abs() < 1e-12 {
            // a full plane has no apex edge pair; drop the duplicated ray
            out.pop();
        }
        out
    }
}

/// The cone that `Ω_ρ` approaches as `ρ → 0` with the anchor fixed at `x0`.
pub fn limit_cone(dom: &DomainSpec, x0: [f64; 2]) -> Result<Cone> {
    let v = vertices_of(dom)?;
    let tol = boundary_tol(v);
    let poly = Polygon::new(v);
    if let Some(i) = poly.vertex_at(x0, tol) {
        let m = v.len();
        let next = v[(i + 1) % m];
        let d = [next[0] - v[i][0], next[1] - v[i][1]];
        let l = d[0].hypot(d[1]);
        return Ok(Cone {
            apex: [0.0, 0.0],
            start: [d[0] / l, d[1] / l],
            angle: interior_angle_sweep(v, i),
            vertex: Some(i),
        });
    }
    if let Some(e) = poly.edge_at(x0, tol) {
        let a = v[e];
        let b = v[(e + 1) % v.len()];
        let d = [b[0] - a[0], b[1] - a[1]];
        let l = d[0].hypot(d[1]);
        return Ok(Cone {
            apex: [0.0, 0.0],
            start: [d[0] / l, d[1] / l],
            angle: std::f64::consts::PI,
            vertex: None,
        });
    }
    Err(Error::Domain(format!("{x0:?} is not on the boundary")))
}

/// Interior angle at vertex `i` by the turning-angle formula, an independent check of
/// [`limit_cone`].
pub fn vertex_angle_turning(dom: &DomainSpec, i: usize) -> Result<f64> {
    let v = vertices_of(dom)?;
    if i >= v.len() {
        return Err(invalid("vertex index out of range"));
    }
    Ok(interior_angle_turning(v, i))
}

/// How the anchor `x(ρ)` moves with the scale.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum AnchorPath {
    /// `x(ρ) = x0`.
    #[default]
    Fixed,
    /// `x(ρ) = x0 + ρ² t` along the outgoing edge's unit tangent `t`.
    Quadratic,
}

/// `P ∩ B₁(0)` with exact distance queries.
struct DiskClip<'a> {
    poly: Polygon<'a>,
    segments: Vec<([f64; 2], [f64; 2])>,
    arcs: Vec<(f64, f64)>,
}

impl<'a> DiskClip<'a> {
    fn new(vertices: &'a [[f64; 2]]) -> Self {
        let poly = Polygon::new(vertices);
        let mut segments = Vec::new();
        for (a, b) in poly.edges() {
            let mut ts = vec![0.0, 1.0];
            ts.extend(segment_circle_params(a, b, [0.0, 0.0], 1.0));
            ts.sort_by(f64::total_cmp);
            for w in ts.windows(2) {
                if w[1] - w[0] < 1e-15 {
                    continue;
                }
                let tm = 0.5 * (w[0] + w[1]);
                let mid = [a[0] + tm * (b[0] - a[0]), a[1] + tm * (b[1] - a[1])];
                if mid[0].hypot(mid[1]) <= 1.0 {
                    let p = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                    segments.push((p(w[0]), p(w[1])));
                }
            }
        }
        let arcs = poly.circle_arcs_inside([0.0, 0.0], 1.0);
        DiskClip { poly, segments, arcs }
    }

    fn contains(&self, x: [f64; 2]) -> bool {
        x[0].hypot(x[1]) <= 1.0 && self.poly.contains_closed(x, 1e-14 * self.poly.scale())
    }

    fn distance(&self, x: [f64; 2]) -> f64 {
        if self.contains(x) {
            return 0.0;
        }
        let mut d = f64::INFINITY;
        for (a, b) in &self.segments {
            d = d.min(point_segment_distance(x, *a, *b));
        }
        let r = x[0].hypot(x[1]);
        let th = normalize_angle(x[1].atan2(x[0]));
        for &(s, e) in &self.arcs {
            let inside = (th >= s && th <= e) || (th + TAU >= s && th + TAU <= e);
            if inside {
                d = d.min((r - 1.0).abs());
            } else {
                for end in [s, e] {
                    d = d.min((x[0] - end.cos()).hypot(x[1] - end.sin()));
                }
            }
        }
        d
    }

    /// Boundary samples: every clipped edge and every arc, `per_piece` points each.
    fn boundary_samples(&self, per_piece: usize) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for (a, b) in &self.segments {
            for i in 0..=per_piece {
                let t = i as f64 / per_piece as f64;
                out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        }
        for &(s, e) in &self.arcs {
            for i in 0..=per_piece {
                let th = s + (e - s) * i as f64 / per_piece as f64;
                out.push([th.cos(), th.sin()]);
            }
        }
        out
    }
}

/// Hausdorff distance between `A ∩ B₁(0)` and `B ∩ B₁(0)` for polygons `A`, `B`.
///
/// Exact distances to each set are maximized over an `grid × grid` lattice on `[-1, 1]²`
/// together with dense samples of both boundaries.
pub fn hausdorff_in_unit_disk(a: &[[f64; 2]], b: &[[f64; 2]], grid: usize) -> f64 {
    let ca = DiskClip::new(a);
    let cb = DiskClip::new(b);
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(grid * grid);
    for i in 0..grid {
        for j in 0..grid {
            let x = -1.0 + 2.0 * (i as f64 + 0.5) / grid as f64;
            let y = -1.0 + 2.0 * (j as f64 + 0.5) / grid as f64;
            pts.push([x, y]);
        }
    }
    let side = |from: &DiskClip, to: &DiskClip| -> f64 {
        let mut samples: Vec<[f64; 2]> = pts.iter().copied().filter(|p| from.contains(*p)).collect();
        samples.extend(from.boundary_samples(400));
        samples
            .par_iter()
            .map(|p| to.distance(*p))
            .reduce(|| 0.0, f64::max)
    };
    if ca.segments.is_empty() && ca.arcs.is_empty() && cb.segments.is_empty() && cb.arcs.is_empty() {
        return 0.0;
    }
    side(&ca, &cb).max(side(&cb, &ca))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcbRow {
    pub rho: f64,
    pub hausdorff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BcbReport {
    pub cone_angle: f64,
    pub anchor_path: AnchorPath,
    /// Lattice spacing of the interior samples.
    pub grid_resolution: f64,
    pub rows: Vec<BcbRow>,
    /// Least-squares slope of `ln hausdorff` against `ln ρ` over rows with positive distance.
    pub slope: Option<f64>,
}

/// Distance of `Ω_ρ ∩ B₁` to the limit cone `∩ B₁` along a decreasing list of scales.
pub fn bcb_check(dom: &DomainSpec, x0: [f64; 2], rhos: &[f64], path: AnchorPath, grid: usize) -> Result<BcbReport> {
    if rhos.is_empty() || rhos.windows(2).any(|w| !(w[0] > w[1])) || !(rhos[rhos.len() - 1] > 0.0) {
        return Err(invalid("rho list must be positive and strictly decreasing"));
    }
    if grid < 2 {
        return Err(invalid("grid must have at least 2 points per side"));
    }
    let cone = limit_cone(dom, x0)?;
    let cone_poly = cone.as_polygon(2.0);
    let mut rows = Vec::with_capacity(rhos.len());
    for &rho in rhos {
        let anchor = match path {
            AnchorPath::Fixed => x0,
            AnchorPath::Quadratic => {
                let r2 = rho * rho;
                [x0[0] + r2 * cone.start[0], x0[1] + r2 * cone.start[1]]
            }
        };
        let scaled = rescale_domain(dom, anchor, rho)?;
        let h = hausdorff_in_unit_disk(vertices_of(&scaled)?, &cone_poly, grid);
        rows.push(BcbRow { rho, hausdorff: h });
    }
    let pos: Vec<&BcbRow> = rows.iter().filter(|r| r.hausdorff > 0.0).collect();
    let slope = (pos.len() >= 2).then(|| {
        let xs: Vec<f64> = pos.iter().map(|r| r.rho.ln()).collect();
        let ys: Vec<f64> = pos.iter().map(|r| r.hausdorff.ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    });
    Ok(BcbReport {
        cone_angle: cone.angle,
        anchor_path: path,
        grid_resolution: 2.0 / grid as f64,
        rows,
        slope,
    })
}

/// `λ_j = m_j^{(1-p)/(2s)}`.
pub fn blowup_scale(m: f64, p: f64, s: f64) -> Result<f64> {
    if !(m > 0.0) || !(p > 1.0) || !(s > 0.0) {
        return Err(invalid("need m > 0, p > 1 and s > 0"));
    }
    Ok(m.powf((1.0 - p) / (2.0 * s)))
}

/// `v(z) = u(λ z + x_j)/m_j` on the nodes `(y - x_j)/λ`.
pub fn rescale_solution(u: &GridFunction, xj: &[f64], m: f64, p: f64, s: f64) -> Result<GridFunction> {
    if xj.len() != u.nodes[0].dim() {
        return Err(invalid("x_j dimension mismatch"));
    }
    let lam = blowup_scale(m, p, s)?;
    let map = |y: &[f64]| Point(y.iter().zip(xj).map(|(a, b)| (a - b) / lam).collect());
    let nodes = u.nodes.iter().map(|y| map(y)).collect();
    let values = u.values.iter().map(|v| v / m).collect();
    let interp = match &u.interp {
        Interp::RadialCubic { center } => Interp::RadialCubic { center: map(center) },
        Interp::BilinearPolar { center, n_r, n_theta } => Interp::BilinearPolar {
            center: map(center),
            n_r: *n_r,
            n_theta: *n_theta,
        },
        other => other.clone(),
    };
    GridFunction::new(nodes, values, interp)
}
