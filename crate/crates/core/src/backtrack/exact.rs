//! Exact (unwrapped) summand sets `T_c = E_c^I · A_c^I` and the local
//! refinement that moves polygon points onto them.

use crate::boundscore::{ElementInterval, StructureInterval};
use crate::ivalgeom::{AnnularSector, DiskInterval};
use crate::Complex;

const PHASE_GRID: usize = 129;
const GOLDEN_ITERS: usize = 80;
const MAX_SWEEPS: usize = 500;

/// A point of `T_c` with its factorization `z = E·A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factored {
    pub z: Complex,
    pub e: Complex,
    pub a: Complex,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactSet {
    pub element: ElementInterval,
    pub structure: StructureInterval,
}

fn angle_nearest(phase: &crate::ivalgeom::RealInterval, target: f64) -> f64 {
    if phase.width() >= std::f64::consts::TAU {
        return target;
    }
    let mid = phase.mid();
    let t = mid + crate::arraymodel::wrap_angle(target - mid);
    if phase.contains(t) {
        return t;
    }
    let d = |x: f64| crate::arraymodel::wrap_angle(x - target).abs();
    if d(phase.lo()) <= d(phase.hi()) {
        phase.lo()
    } else {
        phase.hi()
    }
}

fn sector_support(s: &AnnularSector, disk: &DiskInterval, u: Complex) -> (f64, Factored) {
    let (c, r) = (disk.center, disk.radius);
    let un = u / u.norm();
    let phi = angle_nearest(&s.phase, un.arg() - c.arg());
    let g = c.norm() * (phi + c.arg() - un.arg()).cos() + r;
    let rho = if g >= 0.0 { s.amp.hi() } else { s.amp.lo() };
    let e = Complex::from_polar(rho, phi);
    let a = if rho > 0.0 { c + un * (r * rho) / e } else { c };
    let z = e * a;
    (rho * g, Factored { z, e, a })
}

/// Distance from `p` to the set `{ρ e^{jφ} (c + R w)}` at fixed `φ`, with the
/// optimal `ρ`. For `b = e^{jφ} c`, write `p = (a b̂ + h b̂⊥)`; the optimum is
/// `ρ|b| = a + κ h / √(1 − κ²)` with `κ = R/|b|`, clamped to the amplitude range.
fn fixed_phase_distance(s: &AnnularSector, disk: &DiskInterval, p: Complex, phi: f64) -> (f64, f64) {
    let b = Complex::from_polar(1.0, phi) * disk.center;
    let bn = b.norm();
    let (r0, r1) = (s.amp.lo(), s.amp.hi());
    let dist = |rho: f64| (p - b * rho).norm() - rho * disk.radius;
    if bn == 0.0 {
        return (p.norm(), r0);
    }
    let bh = b / bn;
    let a = p.re * bh.re + p.im * bh.im;
    let h = (p.im * bh.re - p.re * bh.im).abs();
    let kappa = disk.radius / bn;
    let rho = if kappa >= 1.0 {
        r1
    } else {
        ((a + kappa * h / (1.0 - kappa * kappa).sqrt()) / bn).clamp(r0, r1)
    };
    (dist(rho), rho)
}

fn sector_closest(s: &AnnularSector, disk: &DiskInterval, p: Complex) -> (f64, Factored) {
    let ph = s.phase;
    let f = |phi: f64| fixed_phase_distance(s, disk, p, phi).0;
    let (lo, hi) = if ph.width() >= std::f64::consts::TAU {
        (ph.lo(), ph.lo() + std::f64::consts::TAU)
    } else {
        (ph.lo(), ph.hi())
    };
    let mut best_phi = lo;
    if hi > lo {
        let n = PHASE_GRID;
        let step = (hi - lo) / (n - 1) as f64;
        let mut best_i = 0;
        let mut best_v = f64::INFINITY;
        for i in 0..n {
            let v = f(lo + i as f64 * step);
            if v < best_v {
                best_v = v;
                best_i = i;
            }
        }
        let mut a = lo + best_i.saturating_sub(1) as f64 * step;
        let mut b = (lo + (best_i + 1) as f64 * step).min(hi);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..GOLDEN_ITERS {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = f(x2);
            }
        }
        best_phi = lo + best_i as f64 * step;
        for cand in [x1, x2] {
            if f(cand) < f(best_phi) {
                best_phi = cand;
            }
        }
    }
    let (d, rho) = fixed_phase_distance(s, disk, p, best_phi);
    let e = Complex::from_polar(rho, best_phi);
    let centre = e * disk.center;
    let reach = rho * disk.radius;
    let gap = p - centre;
    let z = if gap.norm() <= reach {
        p
    } else if reach > 0.0 {
        centre + gap * (reach / gap.norm())
    } else {
        centre
    };
    let a = if rho > 0.0 { z / e } else { disk.center };
    (d.max(0.0), Factored { z, e, a })
}

impl ExactSet {
    /// Point of the set maximizing `⟨z, u⟩`.
    pub fn support_point(&self, u: Complex) -> Factored {
        self.element
            .sectors()
            .iter()
            .map(|s| sector_support(s, &self.structure.disk, u))
            .fold(None, |best: Option<(f64, Factored)>, cur| match best {
                Some(b) if b.0 >= cur.0 => Some(b),
                _ => Some(cur),
            })
            .expect("at least one sector")
            .1
    }

    /// Point of the set closest to `p`.
    pub fn closest_point(&self, p: Complex) -> Factored {
        self.element
            .sectors()
            .iter()
            .map(|s| sector_closest(s, &self.structure.disk, p))
            .fold(None, |best: Option<(f64, Factored)>, cur| match best {
                Some(b) if b.0 <= cur.0 => Some(b),
                _ => Some(cur),
            })
            .expect("at least one sector")
            .1
    }
}

/// Moves the points onto the exact sets and locally maximizes `|Σ z|` by
/// iterating the support direction.
pub fn ascend(sets: &[ExactSet], start: Complex) -> Vec<Factored> {
    let mut u = start / start.norm();
    let mut pts: Vec<Factored> = sets.iter().map(|s| s.support_point(u)).collect();
    let mut best = pts.iter().map(|f| f.z).sum::<Complex>().norm();
    for _ in 0..MAX_SWEEPS {
        let total: Complex = pts.iter().map(|f| f.z).sum();
        if total.norm() == 0.0 {
            break;
        }
        u = total / total.norm();
        let next: Vec<Factored> = sets.iter().map(|s| s.support_point(u)).collect();
        let val = next.iter().map(|f| f.z).sum::<Complex>().norm();
        if val <= best * (1.0 + 1e-15) {
            if val > best {
                pts = next;
            }
            break;
        }
        best = val;
        pts = next;
    }
    pts
}

/// Coordinate descent on `|Σ z|`: each summand in turn jumps to the point
/// of its set closest to minus the sum of the others.
pub fn descend(sets: &[ExactSet], start: &[Complex]) -> Vec<Factored> {
    let mut pts: Vec<Factored> = sets.iter().zip(start).map(|(s, &z)| s.closest_point(z)).collect();
    let mut total: Complex = pts.iter().map(|f| f.z).sum();
    for _ in 0..MAX_SWEEPS {
        let before = total.norm();
        for (c, s) in sets.iter().enumerate() {
            let rest = total - pts[c].z;
            let cand = s.closest_point(-rest);
            if (rest + cand.z).norm() < (rest + pts[c].z).norm() {
                pts[c] = cand;
            }
            total = rest + pts[c].z;
        }
        if total.norm() >= before * (1.0 - 1e-15) {
            break;
        }
    }
    pts
}
