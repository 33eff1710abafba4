use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beambound::ivalgeom::ConvexPolygon;
use beambound::Complex;

fn random_polygon(rng: &mut ChaCha8Rng) -> ConvexPolygon {
    let n = rng.gen_range(1..16);
    let c = Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
    let s = rng.gen_range(0.01..2.0);
    let pts: Vec<Complex> = (0..n).map(|_| c + s * Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    ConvexPolygon::hull(&pts, rng.gen_range(0.0..1e-3))
}

// brute-force sum: hull of all pairwise vertex sums
fn pairwise_hull(p: &ConvexPolygon, q: &ConvexPolygon) -> ConvexPolygon {
    let pts: Vec<Complex> = p.vertices().iter().flat_map(|a| q.vertices().iter().map(move |b| a + b)).collect();
    ConvexPolygon::hull(&pts, 0.0)
}

#[test]
fn minkowski_sum_matches_pairwise_hull() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let (p, q) = (random_polygon(&mut rng), random_polygon(&mut rng));
        let s = p.minkowski_sum(&q);
        let h = pairwise_hull(&p, &q);
        assert!((s.tol() - p.tol() - q.tol()).abs() < 1e-15);
        for k in 0..36 {
            let u = Complex::from_polar(1.0, k as f64 * 10f64.to_radians());
            let (a, b) = (s.support(u), h.support(u));
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
        }
        for v in h.vertices() {
            assert!(s.contains(*v, 1e-9));
        }
    }
}

#[test]
fn minkowski_sum_is_associative_in_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..500 {
        let (a, b, c) = (random_polygon(&mut rng), random_polygon(&mut rng), random_polygon(&mut rng));
        let l = a.minkowski_sum(&b).minkowski_sum(&c);
        let r = a.minkowski_sum(&b.minkowski_sum(&c));
        for k in 0..72 {
            let u = Complex::from_polar(1.0, k as f64 * 5f64.to_radians());
            assert!((l.support(u) - r.support(u)).abs() <= 1e-10 * l.support(u).abs().max(1.0));
        }
    }
}

#[test]
fn abs_interval_brackets_vertex_moduli() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..2_000 {
        let p = random_polygon(&mut rng);
        let r = p.abs_interval();
        let far = p.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!((r.hi() - far).abs() < 1e-12);
        for _ in 0..20 {
            // convex combinations of vertices stay within the bracket
            let w: Vec<f64> = p.vertices().iter().map(|_| rng.gen::<f64>()).collect();
            let tot: f64 = w.iter().sum();
            let z: Complex = p.vertices().iter().zip(&w).map(|(v, x)| v * (x / tot)).sum();
            assert!(z.norm() >= r.lo() - 1e-12 && z.norm() <= r.hi() + 1e-12);
        }
    }
}
