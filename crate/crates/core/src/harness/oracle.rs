use rayon::prelude::*;

use crate::arraymodel::{dot2, wrap_angle, ArraySpec};
use crate::boundscore::{structure_interval, ErrorSpec};
use crate::error::{invalid, Result};
use crate::ivalgeom::RealInterval;
use crate::Complex;

/// Largest array size the brute-force oracle accepts.
pub const ORACLE_MAX_ELEMENTS: usize = 5;
const COUPLING_PHASES: usize = 16;
const MAX_COMBINATIONS: f64 = 2e9;

/// Candidate phasors of one element sharing a modulus: `ρ e^{j(c0 + Φ_i)}`
/// for `Φ_i` evenly spaced over `phi`.
#[derive(Debug, Clone)]
struct Group {
    rho: f64,
    c0: f64,
    phi: RealInterval,
    n: usize,
}

impl Group {
    fn step(&self) -> f64 {
        if self.n > 1 {
            self.phi.width() / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    fn point(&self, i: usize) -> Complex {
        Complex::from_polar(self.rho, self.c0 + self.phi.lo() + i as f64 * self.step())
    }

    /// Largest `|s + z|` over the group's samples.
    fn best_with(&self, s: Complex) -> f64 {
        let eval = |i: usize| (s + self.point(i)).norm();
        if self.n == 1 {
            return eval(0);
        }
        let mid = self.phi.mid();
        let want = self.phi.clamp(mid + wrap_angle(s.arg() - self.c0 - mid));
        let i = ((want - self.phi.lo()) / self.step()).round() as usize;
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(self.n - 1);
        (lo..=hi).map(eval).fold(0.0, f64::max)
    }
}

fn ends(iv: &RealInterval) -> Vec<f64> {
    if iv.is_degenerate() {
        vec![iv.lo()]
    } else {
        vec![iv.lo(), iv.hi()]
    }
}

fn groups(c: usize, theta: f64, array: &ArraySpec, errors: &ErrorSpec, density: usize) -> Vec<Group> {
    let el = &array.elements[c];
    let k = array.k(theta);
    let disk = structure_interval(c, array, errors).disk;
    let structures: Vec<Complex> = if disk.radius > 0.0 {
        (0..COUPLING_PHASES)
            .map(|i| disk.center + Complex::from_polar(disk.radius, i as f64 * std::f64::consts::TAU / COUPLING_PHASES as f64))
            .collect()
    } else {
        vec![disk.center]
    };
    let phi = errors.phase[c];
    let n = if phi.is_degenerate() { 1 } else { density.max(2) };
    let mut out = Vec::new();
    for &g in &ends(&errors.amp[c]) {
        for &t in &ends(&errors.tilt[c]) {
            let d = array.element_directivity(c, theta - el.orientation + t);
            for &dx in &ends(&errors.pos_x[c]) {
                for &dy in &ends(&errors.pos_y[c]) {
                    let base = dot2(k, [el.position[0] + dx, el.position[1] + dy]);
                    for a in &structures {
                        let v = g * d * a.norm();
                        let flip = if v < 0.0 { std::f64::consts::PI } else { 0.0 };
                        out.push(Group { rho: v.abs(), c0: base + a.arg() + flip, phi, n });
                    }
                }
            }
        }
    }
    out
}

/// Largest `|B(θ)|²` over a grid of boundary error combinations: amplitude,
/// tilt and position endpoints, `density` phase samples per element and
/// coupling phasors on the rim of each structure disk.
///
/// Every candidate is a feasible realization, so the result never exceeds
/// the true upper bound. The last element is optimized over its grid in
/// closed form instead of enumerated.
pub fn corner_oracle(array: &ArraySpec, errors: &ErrorSpec, theta: f64, density: usize) -> Result<f64> {
    let m = array.len();
    if m > ORACLE_MAX_ELEMENTS {
        return Err(invalid(format!("corner oracle is limited to {ORACLE_MAX_ELEMENTS} elements, got {m}")));
    }
    errors.validate(m)?;
    let all: Vec<Vec<Group>> = (0..m).map(|c| groups(c, theta, array, errors, density)).collect();
    let (last, front) = all.split_last().expect("at least one element");
    let lists: Vec<Vec<Complex>> =
        front.iter().map(|gs| gs.iter().flat_map(|g| (0..g.n).map(move |i| g.point(i))).collect()).collect();
    let combos: f64 = lists.iter().map(|l| l.len() as f64).product::<f64>() * last.len() as f64;
    if combos > MAX_COMBINATIONS {
        return Err(invalid(format!("oracle grid has {combos:.3e} combinations; lower the density")));
    }
    let finish = |s: Complex| last.iter().map(|g| g.best_with(s)).fold(0.0, f64::max);
    let best = match lists.split_first() {
        None => finish(Complex::new(0.0, 0.0)),
        Some((head, tail)) => head.par_iter().map(|&z| sweep(z, tail, &finish)).reduce(|| 0.0, f64::max),
    };
    Ok(best * best)
}

fn sweep(s: Complex, rest: &[Vec<Complex>], finish: &(impl Fn(Complex) -> f64 + Sync)) -> f64 {
    match rest.split_first() {
        None => finish(s),
        Some((head, tail)) => head.iter().map(|&z| sweep(s + z, tail, finish)).fold(0.0, f64::max),
    }
}
