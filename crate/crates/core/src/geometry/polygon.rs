//! Exact planar polygon utilities.

use std::f64::consts::{PI, TAU};

/// A simple, positively oriented polygon.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon<'a> {
    pub vertices: &'a [[f64; 2]],
}

impl<'a> Polygon<'a> {
    pub fn new(vertices: &'a [[f64; 2]]) -> Self {
        Polygon { vertices }
    }

    pub fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let m = self.vertices.len();
        (0..m).map(move |i| (self.vertices[i], self.vertices[(i + 1) % m]))
    }

    pub fn signed_area(&self) -> f64 {
        0.5 * self
            .edges()
            .map(|(a, b)| a[0] * b[1] - b[0] * a[1])
            .sum::<f64>()
    }

    /// Length of the longest coordinate extent, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| v[0].abs().max(v[1].abs()))
            .fold(1.0, f64::max)
    }

    /// True when no two non-adjacent edges touch.
    pub fn is_simple(&self) -> bool {
        let m = self.vertices.len();
        if m < 3 {
            return false;
        }
        let edges: Vec<_> = self.edges().collect();
        for i in 0..m {
            for j in (i + 1)..m {
                let adjacent = j == i + 1 || (i == 0 && j == m - 1);
                if adjacent {
                    continue;
                }
                if segments_intersect(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                    return false;
                }
            }
        }
        true
    }

    /// Strict interior test by crossing number. Boundary points are reported as outside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        if self.on_boundary(p, 1e-14 * self.scale()) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn on_boundary(&self, p: [f64; 2], tol: f64) -> bool {
        self.boundary_distance(p) <= tol
    }

    pub fn contains_closed(&self, p: [f64; 2], tol: f64) -> bool {
        self.contains(p) || self.on_boundary(p, tol)
    }

    pub fn boundary_distance(&self, p: [f64; 2]) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `p` to the closed polygon (zero inside).
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        if self.contains(p) {
            0.0
        } else {
            self.boundary_distance(p)
        }
    }

    /// Index of the vertex at `p`, if any.
    pub fn vertex_at(&self, p: [f64; 2], tol: f64) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| (v[0] - p[0]).hypot(v[1] - p[1]) <= tol)
    }

    /// Index of the edge whose relative interior contains `p`, if any.
    pub fn edge_at(&self, p: [f64; 2], tol: f64) -> Option<usize> {
        self.edges()
            .position(|(a, b)| point_segment_distance(p, a, b) <= tol)
    }

    /// Open angular intervals `(start, end)` with `0 <= start < end <= start + 2π` of directions
    /// `θ` such that `c + r(cos θ, sin θ)` lies inside the polygon.
    pub fn circle_arcs_inside(&self, c: [f64; 2], r: f64) -> Vec<(f64, f64)> {
        let mut angles: Vec<f64> = Vec::new();
        for (a, b) in self.edges() {
            for t in segment_circle_params(a, b, c, r) {
                let q = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
                angles.push(normalize_angle((q[1] - c[1]).atan2(q[0] - c[0])));
            }
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|x, y| (*x - *y).abs() < 1e-14);
        let inside_at = |th: f64| self.contains([c[0] + r * th.cos(), c[1] + r * th.sin()]);
        if angles.is_empty() {
            return if inside_at(0.0) {
                vec![(0.0, TAU)]
            } else {
                Vec::new()
            };
        }
        let m = angles.len();
        let mut arcs = Vec::new();
        for i in 0..m {
            let start = angles[i];
            let end = if i + 1 < m {
                angles[i + 1]
            } else {
                angles[0] + TAU
            };
            if end - start < 1e-15 {
                continue;
            }
            if inside_at(0.5 * (start + end)) {
                arcs.push((start, end));
            }
        }
        merge_arcs(arcs)
    }
}

pub fn normalize_angle(th: f64) -> f64 {
    let t = th.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Merges touching arcs, including the wrap-around pair.
fn merge_arcs(mut arcs: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if arcs.len() < 2 {
        return arcs;
    }
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(arcs.len());
    for arc in arcs.drain(..) {
        match out.last_mut() {
            Some(last) if (arc.0 - last.1).abs() < 1e-14 => last.1 = arc.1,
            _ => out.push(arc),
        }
    }
    if out.len() > 1 {
        let last = *out.last().unwrap();
        if (last.1 - (out[0].0 + TAU)).abs() < 1e-14 {
            out[0].0 = last.0 - TAU;
            out.pop();
            let (s, e) = out[0];
            if s < 0.0 {
                out[0] = (s + TAU, e + TAU);
                out.rotate_left(1);
            }
        }
    }
    out
}

/// Parameters `t ∈ [0, 1]` where segment `a→b` meets the circle `|x - c| = r`.
pub fn segment_circle_params(a: [f64; 2], b: [f64; 2], c: [f64; 2], r: f64) -> Vec<f64> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let f = [a[0] - c[0], a[1] - c[1]];
    let qa = d[0] * d[0] + d[1] * d[1];
    let qb = 2.0 * (f[0] * d[0] + f[1] * d[1]);
    let qc = f[0] * f[0] + f[1] * f[1] - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if qa == 0.0 || disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let mut out = Vec::with_capacity(2);
    for t in [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)] {
        if (-1e-15..=1.0 + 1e-15).contains(&t) {
            out.push(t.clamp(0.0, 1.0));
        }
    }
    if out.len() == 2 && (out[0] - out[1]).abs() < 1e-15 {
        out.pop();
    }
    out
}

pub fn point_segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

pub fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], p: [f64; 2], o: f64| {
        o == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// Interior angle at vertex `i` via `atan2` of the CCW sweep from the outgoing edge to the
/// incoming edge reversed.
pub fn interior_angle_sweep(vertices: &[[f64; 2]], i: usize) -> f64 {
    let m = vertices.len();
    let v = vertices[i];
    let prev = vertices[(i + m - 1) % m];
    let next = vertices[(i + 1) % m];
    let a0 = (next[1] - v[1]).atan2(next[0] - v[0]);
    let a1 = (prev[1] - v[1]).atan2(prev[0] - v[0]);
    let mut sweep = a1 - a0;
    if sweep <= 0.0 {
        sweep += TAU;
    }
    sweep
}

/// Interior angle at vertex `i` as `π` minus the signed turning angle of the boundary.
pub fn interior_angle_turning(vertices: &[[f64; 2]], i: usize) -> f64 {
    let m = vertices.len();
    let v = vertices[i];
    let prev = vertices[(i + m - 1) % m];
    let next = vertices[(i + 1) % m];
    let din = [v[0] - prev[0], v[1] - prev[1]];
    let dout = [next[0] - v[0], next[1] - v[1]];
    let cross = din[0] * dout[1] - din[1] * dout[0];
    let dotp = din[0] * dout[0] + din[1] * dout[1];
    PI - cross.atan2(dotp)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQUARE: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
    const L_SHAPE: [[f64; 2]; 6] = [
        [0.0, 0.0],
        [2.0, 0.0],
        [2.0, 1.0],
        [1.0, 1.0],
        [1.0, 2.0],
        [0.0, 2.0],
    ];

    #[test]
    fn area_and_orientation() {
        assert_eq!(Polygon::new(&SQUARE).signed_area(), 1.0);
        assert_eq!(Polygon::new(&L_SHAPE).signed_area(), 3.0);
        assert!(Polygon::new(&L_SHAPE).is_simple());
        let bowtie = [[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(!Polygon::new(&bowtie).is_simple());
    }

    #[test]
    fn containment() {
        let sq = Polygon::new(&SQUARE);
        assert!(sq.contains([0.5, 0.5]));
        assert!(!sq.contains([0.0, 0.5]));
        assert!(sq.contains_closed([0.0, 0.5], 1e-12));
        assert!(!sq.contains([1.5, 0.5]));
        let l = Polygon::new(&L_SHAPE);
        assert!(!l.contains([1.5, 1.5]));
        assert!(l.contains([0.5, 1.5]));
    }

    #[test]
    fn square_quarter_arc() {
        let arcs = Polygon::new(&SQUARE).circle_arcs_inside([0.0, 0.0], 0.5);
        assert_eq!(arcs.len(), 1);
        assert!(arcs[0].0.abs() < 1e-14);
        assert!((arcs[0].1 - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn full_circle_inside() {
        let arcs = Polygon::new(&SQUARE).circle_arcs_inside([0.5, 0.5], 0.25);
        assert_eq!(arcs, vec![(0.0, TAU)]);
    }

    #[test]
    fn wraparound_arc_merges() {
        // circle centered on the left edge: inside arc straddles angle 0
        let arcs = Polygon::new(&SQUARE).circle_arcs_inside([0.0, 0.5], 0.25);
        assert_eq!(arcs.len(), 1);
        let (s, e) = arcs[0];
        assert!((e - s - PI).abs() < 1e-12);
    }

    #[test]
    fn angles_agree() {
        for i in 0..6 {
            let a = interior_angle_sweep(&L_SHAPE, i);
            let b = interior_angle_turning(&L_SHAPE, i);
            assert!((a - b).abs() < 1e-12);
        }
        assert!((interior_angle_sweep(&L_SHAPE, 3) - 1.5 * PI).abs() < 1e-12);
    }
}
