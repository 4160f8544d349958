use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::domain::{ConeSection, DomainKind, DomainSpec, Frame};
use super::polygon::Polygon;
use crate::error::{invalid, Result};
use crate::point::{dist, dot, norm, sub, Point};

/// `Σ^r = r^{-1}((S_r(P) ∩ Ω) - P)` as a subset of the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub enum CrossSection {
    Empty,
    Full,
    /// `{ω : ω · O e_i > 0, i < k}`
    SphericalCapProduct {
        k: usize,
        frame: Frame,
    },
    /// `{ω : ω · axis > cos_min}`, `axis` a unit vector.
    Cap {
        axis: Point,
        cos_min: f64,
    },
    /// Planar cap `{θ : |θ - axis_angle| < half_opening}`.
    Cap2D {
        axis_angle: f64,
        half_opening: f64,
    },
    /// Union of open angular intervals (2-D). Ends may exceed `2π` for wrapping arcs.
    Intervals(Vec<(f64, f64)>),
    /// Membership evaluated through the domain.
    Generic {
        domain: DomainSpec,
        center: Point,
        r: f64,
    },
}

impl CrossSection {
    pub fn is_empty(&self) -> bool {
        match self {
            CrossSection::Empty => true,
            CrossSection::Intervals(v) => v.is_empty(),
            _ => false,
        }
    }

    /// Membership of the unit direction `w`.
    pub fn contains(&self, w: &[f64]) -> bool {
        match self {
            CrossSection::Empty => false,
            CrossSection::Full => true,
            CrossSection::SphericalCapProduct { k, frame } => {
                frame.axes[..*k].iter().all(|a| dot(a, w) > 0.0)
            }
            CrossSection::Cap { axis, cos_min } => dot(axis, w) > *cos_min,
            CrossSection::Cap2D {
                axis_angle,
                half_opening,
            } => {
                let th = w[1].atan2(w[0]);
                let d = (th - axis_angle).rem_euclid(TAU);
                d.min(TAU - d) < *half_opening
            }
            CrossSection::Intervals(arcs) => {
                let th = w[1].atan2(w[0]).rem_euclid(TAU);
                arcs.iter()
                    .any(|&(a, b)| (th > a && th < b) || (th + TAU > a && th + TAU < b))
            }
            CrossSection::Generic { domain, center, r } => {
                let x: Vec<f64> = center.iter().zip(w).map(|(c, wi)| c + r * wi).collect();
                domain.contains(&x)
            }
        }
    }
}

/// Computes `Σ^r_Ω` about `p`.
pub fn cross_section(dom: &DomainSpec, p: &[f64], r: f64) -> Result<CrossSection> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid("cross-section radius must be positive"));
    }
    if p.len() != dom.dim {
        return Err(invalid("center dimension mismatch"));
    }
    let n = dom.dim;
    let at_vertex = |v: &Point| dist(v, p) == 0.0;
    let generic = || CrossSection::Generic {
        domain: dom.clone(),
        center: Point::new(p),
        r,
    };
    let cap_product = |k: usize| {
        if k == 0 {
            CrossSection::Full
        } else {
            CrossSection::SphericalCapProduct {
                k,
                frame: dom.frame(),
            }
        }
    };
    let sec = match &dom.kind {
        DomainKind::FreeSpace => CrossSection::Full,
        DomainKind::HalfSpaceK { k, vertex, .. } if at_vertex(vertex) => cap_product(*k),
        DomainKind::Ball { center, radius } => {
            let c = dist(center, p);
            if c == 0.0 {
                if r < *radius {
                    CrossSection::Full
                } else {
                    CrossSection::Empty
                }
            } else {
                // |p + rω - c|² < R²  ⇔  ω·(c-p)/|c-p| > (r² + |c-p|² - R²)/(2r|c-p|)
                let cos_min = (r * r + c * c - radius * radius) / (2.0 * r * c);
                if cos_min >= 1.0 {
                    CrossSection::Empty
                } else if cos_min < -1.0 {
                    CrossSection::Full
                } else {
                    let axis = sub(center, p);
                    let axis = Point(axis.iter().map(|v| v / c).collect());
                    CrossSection::Cap { axis, cos_min }
                }
            }
        }
        DomainKind::BallK {
            k, vertex, radius, ..
        } if at_vertex(vertex) => {
            if r < *radius {
                cap_product(*k)
            } else {
                CrossSection::Empty
            }
        }
        DomainKind::ExteriorBallK {
            k, vertex, radius, ..
        } if at_vertex(vertex) => {
            if r > *radius {
                cap_product(*k)
            } else {
                CrossSection::Empty
            }
        }
        DomainKind::TruncatedCone {
            vertex,
            section,
            r_min,
            r_max,
        } if at_vertex(vertex) => {
            if r <= *r_min || r >= *r_max {
                CrossSection::Empty
            } else {
                match section {
                    ConeSection::CapProduct { k, frame } => CrossSection::SphericalCapProduct {
                        k: *k,
                        frame: frame.clone().unwrap_or_else(|| Frame::identity(n)),
                    },
                    ConeSection::Cap2D {
                        axis_angle,
                        half_opening,
                    } => CrossSection::Cap2D {
                        axis_angle: *axis_angle,
                        half_opening: *half_opening,
                    },
                }
            }
        }
        DomainKind::Polygon2D { vertices } => {
            let arcs = Polygon::new(vertices).circle_arcs_inside([p[0], p[1]], r);
            if arcs.is_empty() {
                CrossSection::Empty
            } else if arcs.len() == 1 && arcs[0].1 - arcs[0].0 >= TAU - 1e-15 {
                CrossSection::Full
            } else {
                CrossSection::Intervals(arcs)
            }
        }
        _ => generic(),
    };
    Ok(sec)
}

/// Number of directions in the sampling grid used for inclusion tests.
pub const DIRECTION_GRID: usize = 2048;

/// Deterministic sample of unit directions: uniform angles in 2-D, a Fibonacci lattice in 3-D,
/// seeded Gaussian directions otherwise; `{+1, -1}` in 1-D.
pub fn direction_grid(n: usize, count: usize) -> Vec<Point> {
    match n {
        1 => vec![Point::new(&[1.0]), Point::new(&[-1.0])],
        2 => (0..count)
            .map(|j| {
                let th = TAU * (j as f64 + 0.5) / count as f64;
                Point::new(&[th.cos(), th.sin()])
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let th = golden * j as f64;
                    Point::new(&[rho * th.cos(), rho * th.sin(), z])
                })
                .collect()
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_d1);
            (0..count)
                .map(|_| loop {
                    let v: Vec<f64> = (0..n)
                        .map(|_| rng.sample::<f64, _>(StandardNormal))
                        .collect();
                    let l = norm(&v);
                    if l > 1e-8 {
                        break Point(v.iter().map(|c| c / l).collect());
                    }
                })
                .collect()
        }
    }
}

/// `A ⊆ B` up to sets of measure zero. Exact for pairs of angular-interval unions,
/// otherwise tested on `grid` with a disagreement fraction tolerance of `1e-10`.
pub fn section_included(a: &CrossSection, b: &CrossSection, grid: &[Point]) -> bool {
    match (a, b) {
        (CrossSection::Empty, _) | (_, CrossSection::Full) => return true,
        (CrossSection::Intervals(ia), CrossSection::Intervals(ib)) => {
            return arcs_included(ia, ib, 1e-10)
        }
        (CrossSection::Intervals(ia), CrossSection::Empty) => return ia.is_empty(),
        _ => {}
    }
    let bad = grid
        .iter()
        .filter(|w| a.contains(w) && !b.contains(w))
        .count();
    (bad as f64) <= 1e-10 * grid.len() as f64
}

fn arcs_included(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    // close measure-zero gaps in B, then unroll it over two turns
    let mut bb: Vec<(f64, f64)> = Vec::new();
    for shift in [-TAU, 0.0, TAU] {
        bb.extend(b.iter().map(|&(s, e)| (s + shift, e + shift)));
    }
    bb.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (s, e) in bb {
        match merged.last_mut() {
            Some(last) if s <= last.1 + tol => last.1 = last.1.max(e),
            _ => merged.push((s, e)),
        }
    }
    a.iter().all(|&(s, e)| {
        e - s <= tol
            || merged
                .iter()
                .any(|&(bs, be)| bs <= s + tol && e <= be + tol)
    })
}

/// `d_Ω = inf_{x∈Ω} |x - P|` and `ρ_Ω = sup_{x∈Ω} |x - P|`.
pub fn radial_extent(dom: &DomainSpec, p: &[f64]) -> (f64, f64) {
    let inf = f64::INFINITY;
    let orthant_dist = |k: usize, vertex: &Point| {
        let f = dom.frame();
        let local = f.to_local(&sub(p, vertex));
        local[..k]
            .iter()
            .map(|v| v.min(0.0).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    match &dom.kind {
        DomainKind::FreeSpace => (0.0, inf),
        DomainKind::HalfSpaceK { k, vertex, .. } => (orthant_dist(*k, vertex), inf),
        DomainKind::Ball { center, radius } => {
            let c = dist(center, p);
            ((c - radius).max(0.0), c + radius)
        }
        DomainKind::BallK {
            k, vertex, radius, ..
        } if dist(vertex, p) == 0.0 => {
            let _ = k;
            (0.0, *radius)
        }
        DomainKind::ExteriorBallK { radius, vertex, .. } if dist(vertex, p) == 0.0 => {
            (*radius, inf)
        }
        DomainKind::TruncatedCone {
            vertex,
            r_min,
            r_max,
            ..
        } if dist(vertex, p) == 0.0 => (*r_min, *r_max),
        DomainKind::Polygon2D { vertices } => {
            let poly = Polygon::new(vertices);
            let q = [p[0], p[1]];
            let d = if poly.contains_closed(q, 0.0) {
                0.0
            } else {
                poly.boundary_distance(q)
            };
            let rho = vertices
                .iter()
                .map(|v| (v[0] - q[0]).hypot(v[1] - q[1]))
                .fold(0.0, f64::max);
            (d, rho)
        }
        DomainKind::Interval { a, b } => {
            let x = p[0];
            let d = if x < *a {
                a - x
            } else if x > *b {
                x - b
            } else {
                0.0
            };
            (d, (x - a).abs().max((x - b).abs()))
        }
        DomainKind::HalfLine { origin, direction } => (((origin - p[0]) * direction).max(0.0), inf),
        _ => ray_extent(dom, p),
    }
}

fn ray_extent(dom: &DomainSpec, p: &[f64]) -> (f64, f64) {
    let reach = dist(&dom.anchor(), p) + 4.0 * dom.length_scale();
    let t_max = if dom.is_bounded() { reach } else { 1e3 * reach };
    let mut d = if dom.contains(p) { 0.0 } else { f64::INFINITY };
    let mut rho: f64 = 0.0;
    for w in direction_grid(dom.dim, DIRECTION_GRID) {
        for (s, e) in dom.ray_intervals(p, &w, t_max) {
            d = d.min(s);
            rho = rho.max(e);
        }
    }
    if !dom.is_bounded() {
        rho = f64::INFINITY;
    }
    (d, rho)
}

/// MSS applicability tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MssTag {
    InnerGRC,
    OuterGRC,
    Both,
    Neither,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MssClassification {
    pub tag: MssTag,
    pub center: Point,
    pub d_omega: f64,
    pub rho_omega: f64,
}

/// Tags `dom` by monotone inclusion of its cross-sections about `p` on `r_grid`.
///
/// Inner: `P ∈ Ω̄` and `Σ^r` shrinks on `(0, ρ_Ω)`. Outer: `P ∉ Ω` and `Σ^r` grows on `(d_Ω, ∞)`.
pub fn classify_mss(dom: &DomainSpec, p: &[f64], r_grid: &[f64]) -> Result<MssClassification> {
    if r_grid.is_empty() {
        return Err(invalid("r_grid must not be empty"));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) || r_grid[0] <= 0.0 {
        return Err(invalid("r_grid must be positive and strictly increasing"));
    }
    let (d_omega, rho_omega) = radial_extent(dom, p);
    let grid = direction_grid(dom.dim, DIRECTION_GRID);
    let tol = 1e-12 * dom.length_scale().max(norm(p));

    let monotone = |lo: f64, hi: f64, shrinking: bool| -> Result<bool> {
        let rs: Vec<f64> = r_grid
            .iter()
            .copied()
            .filter(|r| *r > lo && *r < hi)
            .collect();
        let mut prev: Option<CrossSection> = None;
        for r in rs {
            let cur = cross_section(dom, p, r)?;
            if let Some(pr) = &prev {
                let ok = if shrinking {
                    section_included(&cur, pr, &grid)
                } else {
                    section_included(pr, &cur, &grid)
                };
                if !ok {
                    return Ok(false);
                }
            }
            prev = Some(cur);
        }
        Ok(true)
    };

    let inner = dom.contains_closed(p, tol) && monotone(0.0, rho_omega, true)?;
    let outer = !dom.contains(p) && monotone(d_omega, f64::INFINITY, false)?;
    let tag = match (inner, outer) {
        (true, true) => MssTag::Both,
        (true, false) => MssTag::InnerGRC,
        (false, true) => MssTag::OuterGRC,
        (false, false) => MssTag::Neither,
    };
    Ok(MssClassification {
        tag,
        center: Point::new(p),
        d_omega,
        rho_omega,
    })
}

/// Brute-force g-radial convexity about `p` for a polygon: every segment `[p, x]` with `x`
/// from a boundary and interior sample stays in the closed polygon.
pub fn polygon_segments_inside(
    vertices: &[[f64; 2]],
    p: [f64; 2],
    samples_per_edge: usize,
) -> bool {
    let poly = Polygon::new(vertices);
    let tol = 1e-10 * poly.scale();
    if !poly.contains_closed(p, tol) {
        return false;
    }
    let mut targets: Vec<[f64; 2]> = Vec::new();
    for (a, b) in poly.edges() {
        for i in 0..samples_per_edge {
            let t = i as f64 / samples_per_edge as f64;
            targets.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    targets.iter().all(|x| {
        (1..64).all(|j| {
            let t = j as f64 / 64.0;
            poly.contains_closed([p[0] + t * (x[0] - p[0]), p[1] + t * (x[1] - p[1])], tol)
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_space_section_is_scale_invariant() {
        let d = DomainSpec::half_space_k(3, 1).unwrap();
        let a = cross_section(&d, &[0.0, 0.0, 0.0], 0.1).unwrap();
        let b = cross_section(&d, &[0.0, 0.0, 0.0], 7.0).unwrap();
        assert_eq!(a, b);
        assert!(matches!(a, CrossSection::SphericalCapProduct { k: 1, .. }));
    }

    #[test]
    fn ball_sections() {
        let d = DomainSpec::ball([0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(
            cross_section(&d, &[0.0; 3], 0.5).unwrap(),
            CrossSection::Full
        );
        assert_eq!(
            cross_section(&d, &[0.0; 3], 2.0).unwrap(),
            CrossSection::Empty
        );
        assert!(cross_section(&d, &[0.0; 3], 0.0).is_err());
    }

    #[test]
    fn square_corner_section() {
        let d = DomainSpec::polygon(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        match cross_section(&d, &[0.0, 0.0], 0.5).unwrap() {
            CrossSection::Intervals(v) => {
                assert_eq!(v.len(), 1);
                assert!(v[0].0.abs() < 1e-14 && (v[0].1 - PI / 2.0).abs() < 1e-14);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn classification_examples() {
        let grid: Vec<f64> = (1..60).map(|i| i as f64 * 0.05).collect();
        let b = DomainSpec::ball([0.0, 0.0, 0.0], 1.0).unwrap();
        let c = classify_mss(&b, &[0.0; 3], &grid).unwrap();
        assert_eq!(c.tag, MssTag::InnerGRC);
        assert_eq!((c.d_omega, c.rho_omega), (0.0, 1.0));

        let e = DomainSpec::exterior_ball_k(3, 0, 1.0).unwrap();
        let c = classify_mss(&e, &[0.0; 3], &grid).unwrap();
        assert_eq!(c.tag, MssTag::OuterGRC);
        assert_eq!(c.d_omega, 1.0);

        let l = DomainSpec::polygon(vec![
            [0.0, 0.0],
            [2.0, 0.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 2.0],
            [0.0, 2.0],
        ])
        .unwrap();
        let c = classify_mss(&l, &[0.0, 0.0], &grid).unwrap();
        assert_eq!(c.tag, MssTag::InnerGRC);
        assert!(classify_mss(&l, &[0.0, 0.0], &[]).is_err());
    }

    #[test]
    fn off_center_ball_is_not_star_about_outside_point() {
        let b = DomainSpec::ball([3.0, 0.0], 1.0).unwrap();
        let grid: Vec<f64> = (1..100).map(|i| i as f64 * 0.05).collect();
        let c = classify_mss(&b, &[0.0, 0.0], &grid).unwrap();
        assert_eq!(c.tag, MssTag::Neither);
        assert_eq!((c.d_omega, c.rho_omega), (2.0, 4.0));
    }

    #[test]
    fn generic_extent_for_off_vertex_ball_k() {
        let d = DomainSpec::ball_k(2, 1, 1.0).unwrap();
        let (lo, hi) = radial_extent(&d, &[-1.0, 0.0]);
        assert!((lo - 1.0).abs() < 1e-5);
        assert!(hi > 1.99 && hi <= 2.0);
    }
}
