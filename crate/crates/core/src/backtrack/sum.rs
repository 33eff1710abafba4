use crate::error::{consistency, Error, Result};
use crate::ivalgeom::ConvexPolygon;
use crate::Complex;

use super::BoundKind;

/// Contributing points of a Minkowski sum extreme.
#[derive(Debug, Clone, PartialEq)]
pub struct SumSplit {
    pub z: Vec<Complex>,
    /// Direction in which the extreme of the sum is a support point.
    pub direction: Complex,
    /// The extreme point of the summed polygon.
    pub target: Complex,
    /// Summands whose face in `direction` was an edge rather than a vertex.
    pub ambiguous: Vec<bool>,
}

/// Face of a polygon in direction `u`: the segment of vertices attaining
/// the support value, ordered along the face.
fn face(p: &ConvexPolygon, u: Complex) -> (Complex, Complex) {
    let v = p.vertices();
    let best = p.support(u);
    let scale = v.iter().fold(0.0_f64, |m, z| m.max(z.norm())).max(f64::MIN_POSITIVE);
    let along = Complex::new(-u.im, u.re);
    let ext = p.extreme_vertex(u);
    let (mut a, mut b) = (ext.point, ext.point);
    for &z in v {
        if dot(z, u) >= best - 1e-12 * scale {
            if dot(z, along) < dot(a, along) {
                a = z;
            }
            if dot(z, along) > dot(b, along) {
                b = z;
            }
        }
    }
    (a, b)
}

#[inline]
fn dot(a: Complex, b: Complex) -> f64 {
    a.re * b.re + a.im * b.im
}

/// Bisector of the outer normal cone at vertex `i` of a polygon.
fn cone_bisector(v: &[Complex], i: usize) -> Complex {
    let n = v.len();
    if n == 1 {
        return if v[0].norm() > 0.0 { v[0] / v[0].norm() } else { Complex::new(1.0, 0.0) };
    }
    let normal = |e: Complex| {
        let nn = Complex::new(e.im, -e.re);
        nn / nn.norm()
    };
    let prev = v[(i + n - 1) % n];
    let next = v[(i + 1) % n];
    if n == 2 {
        // segment: the vertex cone is a half-plane around the outward axis
        let d = v[i] - v[(i + 1) % 2];
        return d / d.norm();
    }
    let b = normal(v[i] - prev) + normal(next - v[i]);
    if b.norm() < 1e-12 {
        normal(next - v[i])
    } else {
        b / b.norm()
    }
}

/// Splits the extreme point of `Σ polygons` into one point per summand.
///
/// Upper: the farthest vertex of the sum, matched through the bisector of
/// its normal cone. Lower: the closest point to the origin, matched through
/// the reversed direction; a point inside an edge is shared out along the
/// summand faces parallel to it.
pub fn backtrack_sum(polygons: &[ConvexPolygon], kind: BoundKind) -> Result<SumSplit> {
    if polygons.is_empty() {
        return Err(crate::error::invalid("no polygons to backtrack"));
    }
    let sum = crate::boundscore::minkowski_total(polygons);
    let (target, direction) = match kind {
        BoundKind::Upper => {
            let v = sum.vertices();
            let i = (0..v.len()).fold(0, |b, i| if v[i].norm() > v[b].norm() { i } else { b });
            (v[i], cone_bisector(v, i))
        }
        BoundKind::Lower => {
            if sum.contains_origin() {
                return Err(Error::LowerBoundZero);
            }
            let (p, d, _, _) = sum.closest_to_origin();
            if d == 0.0 {
                return Err(Error::LowerBoundZero);
            }
            (p, -p / d)
        }
    };
    let faces: Vec<(Complex, Complex)> = polygons.iter().map(|p| face(p, direction)).collect();
    let base: Complex = faces.iter().map(|f| f.0).sum();
    let span: Complex = faces.iter().map(|f| f.1 - f.0).sum();
    let t = if span.norm_sqr() > 0.0 { (dot(target - base, span) / span.norm_sqr()).clamp(0.0, 1.0) } else { 0.0 };
    let z: Vec<Complex> = faces.iter().map(|&(a, b)| a + (b - a) * t).collect();
    let ambiguous = faces.iter().map(|&(a, b)| kind == BoundKind::Upper && a != b).collect();
    let total: Complex = z.iter().sum();
    let scale = polygons.iter().map(|p| p.vertices().iter().fold(0.0_f64, |m, v| m.max(v.norm()))).sum::<f64>().max(1.0);
    if (total - target).norm() > 1e-10 * polygons.len() as f64 * scale {
        return Err(consistency(format!("backtracked summands miss the extreme point by {:e}", (total - target).norm())));
    }
    Ok(SumSplit { z, direction, target, ambiguous })
}
