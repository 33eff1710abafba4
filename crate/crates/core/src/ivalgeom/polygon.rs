use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::Complex;

use super::{RealInterval, TAU};

/// Convex polygon in the complex plane, vertices counter-clockwise.
///
/// Vertices are stored in canonical order starting at the lowest vertex
/// (ties broken leftmost). One vertex is a point and two vertices a segment;
/// both are valid degenerate polygons.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Complex>,
    tol: f64,
}

/// Result of an extreme-vertex query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extreme {
    pub index: usize,
    pub point: Complex,
    /// Another vertex attains the same support value.
    pub tie: bool,
}

#[inline]
pub(crate) fn cross(a: Complex, b: Complex) -> f64 {
    a.re * b.im - a.im * b.re
}

#[inline]
pub(crate) fn dot(a: Complex, b: Complex) -> f64 {
    a.re * b.re + a.im * b.im
}

fn lowest_leftmost(a: &Complex, b: &Complex) -> Ordering {
    a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re))
}

/// Distance from `p` to the segment `[a, b]`.
pub(crate) fn segment_distance(p: Complex, a: Complex, b: Complex) -> f64 {
    segment_closest(p, a, b).1
}

/// Closest point on `[a, b]` to `p`, its distance and the segment parameter.
pub(crate) fn segment_closest(p: Complex, a: Complex, b: Complex) -> (Complex, f64, f64) {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 > 0.0 { (dot(p - a, d) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let q = a + d * t;
    (q, (p - q).norm(), t)
}

fn edge_angle(d: Complex) -> f64 {
    let a = d.im.atan2(d.re);
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn scale_of(vertices: &[Complex]) -> f64 {
    vertices.iter().fold(0.0_f64, |m, v| m.max(v.re.abs()).max(v.im.abs()))
}

impl ConvexPolygon {
    /// Single-vertex polygon.
    pub fn point(z: Complex) -> Self {
        Self { vertices: vec![z], tol: 0.0 }
    }

    /// Builds a polygon from counter-clockwise vertices, checking convexity.
    pub fn from_ccw(vertices: Vec<Complex>, tol: f64) -> Result<Self> {
        if vertices.is_empty() {
            return Err(invalid("polygon needs at least one vertex"));
        }
        if vertices.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(invalid("non-finite polygon vertex"));
        }
        if !(tol >= 0.0) {
            return Err(invalid("polygon tolerance must be non-negative"));
        }
        let vertices = dedup_cyclic(vertices);
        let n = vertices.len();
        if n >= 3 {
            let scale = scale_of(&vertices).max(f64::MIN_POSITIVE);
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                if cross(b - a, c - b) < -1e-12 * scale * scale {
                    return Err(invalid("vertices are not convex counter-clockwise"));
                }
            }
        }
        Ok(Self::canonical(vertices, tol))
    }

    /// Convex hull of a point cloud (monotone chain). Collinear points on
    /// the hull boundary are dropped.
    pub fn hull(points: &[Complex], tol: f64) -> Self {
        assert!(!points.is_empty(), "hull of an empty point set");
        let mut pts: Vec<Complex> = points.to_vec();
        pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        pts.dedup();
        if pts.len() < 3 {
            return Self::canonical(pts, tol);
        }
        let mut out: Vec<Complex> = Vec::with_capacity(2 * pts.len());
        for &p in pts.iter() {
            while out.len() >= 2 && cross(out[out.len() - 1] - out[out.len() - 2], p - out[out.len() - 2]) <= 0.0 {
                out.pop();
            }
            out.push(p);
        }
        let lower_len = out.len() + 1;
        for &p in pts.iter().rev().skip(1) {
            while out.len() >= lower_len
                && cross(out[out.len() - 1] - out[out.len() - 2], p - out[out.len() - 2]) <= 0.0
            {
                out.pop();
            }
            out.push(p);
        }
        out.pop();
        Self::canonical(out, tol)
    }

    fn canonical(mut vertices: Vec<Complex>, tol: f64) -> Self {
        if let Some((start, _)) = vertices.iter().enumerate().min_by(|a, b| lowest_leftmost(a.1, b.1)) {
            vertices.rotate_left(start);
        }
        Self { vertices, tol }
    }

    pub fn vertices(&self) -> &[Complex] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Outward representation tolerance accumulated so far.
    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn translate(&self, z: Complex) -> Self {
        Self { vertices: self.vertices.iter().map(|v| v + z).collect(), tol: self.tol }
    }

    /// Multiplies every vertex by `c` (rotation plus uniform scaling). The
    /// tolerance scales by `|c|`.
    pub fn mul_complex(&self, c: Complex) -> Self {
        if c == Complex::new(0.0, 0.0) {
            return Self::point(c);
        }
        let v = self.vertices.iter().map(|v| v * c).collect();
        Self::canonical(v, self.tol * c.norm())
    }

    /// `max <v, u>` over the vertices.
    pub fn support(&self, u: Complex) -> f64 {
        self.vertices.iter().map(|&v| dot(v, u)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether `z` lies in the polygon, allowing `eps` of slack.
    pub fn contains(&self, z: Complex, eps: f64) -> bool {
        let v = &self.vertices;
        match v.len() {
            1 => (z - v[0]).norm() <= eps,
            2 => segment_distance(z, v[0], v[1]) <= eps,
            n => (0..n).all(|i| {
                let a = v[i];
                let e = v[(i + 1) % n] - a;
                cross(e, z - a) >= -eps * e.norm()
            }),
        }
    }

    /// Whether the origin lies in the (closed) polygon.
    pub fn contains_origin(&self) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return self.contains(Complex::new(0.0, 0.0), 0.0);
        }
        (0..n).all(|i| cross(v[(i + 1) % n] - v[i], -v[i]) >= 0.0)
    }

    /// Minkowski sum by merging the two edge sequences in angle order.
    ///
    /// Both vertex loops start at their lowest-leftmost vertex so edge
    /// angles run monotonically through `[0, 2π)`. Parallel edges are kept
    /// as separate collinear edges.
    pub fn minkowski_sum(&self, other: &ConvexPolygon) -> ConvexPolygon {
        let (p, q) = (&self.vertices, &other.vertices);
        let tol = self.tol + other.tol;
        if p.len() == 1 {
            return other.translate(p[0]).with_tol(tol);
        }
        if q.len() == 1 {
            return self.translate(q[0]).with_tol(tol);
        }
        let ap = edge_angles(p);
        let aq = edge_angles(q);
        let (n, m) = (p.len(), q.len());
        let mut out = Vec::with_capacity(n + m);
        let (mut i, mut j) = (0, 0);
        while i < n || j < m {
            out.push(p[i % n] + q[j % m]);
            if j >= m || (i < n && ap[i] <= aq[j]) {
                i += 1;
            } else {
                j += 1;
            }
        }
        ConvexPolygon { vertices: out, tol }
    }

    /// Range of `|z|` over the polygon region.
    pub fn abs_interval(&self) -> RealInterval {
        let v = &self.vertices;
        let hi = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let lo = if self.contains_origin() {
            0.0
        } else {
            self.closest_to_origin().1
        };
        RealInterval::new(lo.min(hi), hi).expect("finite distances")
    }

    /// Closest boundary point to the origin, its distance, and the edge
    /// `(start index, parameter)` it lies on.
    pub fn closest_to_origin(&self) -> (Complex, f64, usize, f64) {
        let v = &self.vertices;
        let n = v.len();
        if n == 1 {
            return (v[0], v[0].norm(), 0, 0.0);
        }
        let o = Complex::new(0.0, 0.0);
        let edges = if n == 2 { 1 } else { n };
        let mut best = (v[0], f64::INFINITY, 0, 0.0);
        for i in 0..edges {
            let (q, d, t) = segment_closest(o, v[i], v[(i + 1) % n]);
            if d < best.1 {
                best = (q, d, i, t);
            }
        }
        best
    }

    /// Vertex maximizing `<v, u>`; ties resolve to the lowest index.
    pub fn extreme_vertex(&self, u: Complex) -> Extreme {
        let v = &self.vertices;
        let best = self.support(u);
        let scale = scale_of(v).max(f64::MIN_POSITIVE) * u.norm();
        let thresh = best - 1e-12 * scale;
        let mut hits = v.iter().enumerate().filter(|(_, &z)| dot(z, u) >= thresh);
        let (index, &point) = hits.next().expect("non-empty polygon");
        let tie = hits.any(|(_, &z)| z != point);
        Extreme { index, point, tie }
    }

    /// Drops vertices whose removal moves the boundary by at most `eps / 2`,
    /// then grows the result outward by `eps / 2` (an octagon sum) so the
    /// original polygon stays enclosed. The tolerance grows by `eps`.
    pub fn prune(&self, eps: f64) -> ConvexPolygon {
        if eps <= 0.0 || self.vertices.len() < 3 {
            return if eps <= 0.0 { self.clone() } else { self.grow(eps) };
        }
        let v = &self.vertices;
        let n = v.len();
        let half = 0.5 * eps;
        let mut kept = vec![0usize];
        let mut anchor = 0usize;
        for i in 1..n {
            // skip vertex i if every vertex since the anchor stays within
            // eps/2 of the chord to the next vertex
            let end = v[(i + 1) % n];
            let ok = (anchor + 1..=i).all(|s| segment_distance(v[s], v[anchor], end) <= half);
            if !ok {
                kept.push(i);
                anchor = i;
            }
        }
        let pruned: Vec<Complex> = kept.iter().map(|&i| v[i]).collect();
        ConvexPolygon::hull(&pruned, self.tol).grow(eps)
    }

    fn grow(&self, eps: f64) -> ConvexPolygon {
        let r = 0.5 * eps / (PI / 8.0).cos();
        let oct: Vec<Complex> = (0..8).map(|k| Complex::from_polar(r, (k as f64 + 0.5) * PI / 4.0)).collect();
        let oct = ConvexPolygon::canonical(oct, 0.0);
        self.minkowski_sum(&oct).with_tol(self.tol + eps)
    }
}

fn edge_angles(v: &[Complex]) -> Vec<f64> {
    let n = v.len();
    (0..n).map(|i| edge_angle(v[(i + 1) % n] - v[i])).collect()
}

fn dedup_cyclic(mut v: Vec<Complex>) -> Vec<Complex> {
    let scale = scale_of(&v);
    let eps = 4.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE);
    v.dedup_by(|a, b| (*a - *b).norm() <= eps);
    while v.len() > 1 && (v[0] - v[v.len() - 1]).norm() <= eps {
        v.pop();
    }
    v
}
