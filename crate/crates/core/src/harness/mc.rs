use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arraymodel::ArraySpec;
use crate::boundscore::{BoundsResult, ErrorSpec, Realization};
use crate::error::{invalid, Result};
use crate::ivalgeom::RealInterval;
use crate::Complex;

const HIST_BINS: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub theta_deg: f64,
    /// Bin edges in dB (`bins + 1` values).
    pub edges_db: Vec<f64>,
    pub counts: Vec<usize>,
    pub nominal_db: f64,
    pub lower_db: f64,
    pub upper_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub n: usize,
    pub seed: u64,
    /// Realizations with at least one angle outside `[P̲ − tol, P̄ + tol]`.
    pub violations: usize,
    /// Largest `10 log10(P / P̄)` seen over all draws and angles.
    pub max_overshoot_db: Option<f64>,
    pub histogram: Option<Histogram>,
}

fn draw(rng: &mut ChaCha8Rng, iv: &RealInterval) -> f64 {
    if iv.is_degenerate() {
        iv.lo()
    } else {
        rng.gen_range(iv.lo()..=iv.hi())
    }
}

/// One uniform draw of every error. Coupling magnitudes are uniform on
/// `[0, γ^{|m−c|}]` and phases uniform on `[0, 2π)`, independently.
pub fn draw_realization(errors: &ErrorSpec, rng: &mut ChaCha8Rng) -> Realization {
    let m = errors.len();
    let mut r = Realization::nominal(m);
    for c in 0..m {
        r.amp[c] = draw(rng, &errors.amp[c]);
        r.phase[c] = draw(rng, &errors.phase[c]);
        r.offset[c] = [draw(rng, &errors.pos_x[c]), draw(rng, &errors.pos_y[c])];
        r.tilt[c] = draw(rng, &errors.tilt[c]);
    }
    if errors.has_coupling() {
        let mut cm = vec![vec![Complex::new(0.0, 0.0); m]; m];
        for (i, row) in cm.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = if i == c {
                    Complex::new(1.0, 0.0)
                } else {
                    let cap = errors.gamma.powi(i.abs_diff(c) as i32);
                    Complex::from_polar(rng.gen_range(0.0..=cap), rng.gen_range(0.0..std::f64::consts::TAU))
                };
            }
        }
        r.coupling = Some(cm);
    }
    r
}

/// Generator for draw `index`: the seed picks the key, the index the stream,
/// so results do not depend on thread scheduling.
pub fn draw_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn db(p: f64) -> f64 {
    10.0 * p.max(1e-20).log10()
}

/// Draws `n` realizations and checks every grid angle against the bounds.
pub fn monte_carlo_check(
    array: &ArraySpec,
    errors: &ErrorSpec,
    bounds: &BoundsResult,
    n: usize,
    seed: u64,
    hist_theta: Option<f64>,
) -> Result<McReport> {
    errors.validate(array.len())?;
    let thetas = &bounds.angles;
    let hist_idx = match hist_theta {
        Some(t) => Some(
            thetas
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
                .map(|(i, _)| i)
                .ok_or_else(|| invalid("empty angle grid"))?,
        ),
        None => None,
    };
    let slack = bounds.power_tol();
    // (violated, worst overshoot dB, power at the histogram angle)
    let rows: Vec<(bool, f64, f64)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = draw_realization(errors, &mut draw_rng(seed, i));
            let s = r.structure(array);
            let mut bad = false;
            let mut worst = f64::NEG_INFINITY;
            let mut at_hist = f64::NAN;
            for (k, &t) in thetas.iter().enumerate() {
                let p = r.response_with(array, &s, t).norm_sqr();
                let (lo, hi) = (bounds.p_lower[k], bounds.p_upper[k]);
                let rel = 1e-12 * hi;
                if p > hi + slack + rel || p < lo - slack - rel {
                    bad = true;
                }
                if hi > 0.0 {
                    worst = worst.max(db(p) - db(hi));
                }
                if hist_idx == Some(k) {
                    at_hist = p;
                }
            }
            (bad, worst, at_hist)
        })
        .collect();
    let violations = rows.iter().filter(|r| r.0).count();
    let max_overshoot_db = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let histogram = match hist_idx {
        Some(k) if n > 0 => {
            let vals: Vec<f64> = rows.iter().map(|r| db(r.2)).collect();
            let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let width = if hi > lo { (hi - lo) / HIST_BINS as f64 } else { 1.0 };
            let edges_db: Vec<f64> = (0..=HIST_BINS).map(|b| lo + b as f64 * width).collect();
            let mut counts = vec![0; HIST_BINS];
            for v in vals {
                counts[(((v - lo) / width) as usize).min(HIST_BINS - 1)] += 1;
            }
            let nominal = crate::arraymodel::nominal_response(array, thetas[k]).norm_sqr();
            Some(Histogram {
                theta_deg: thetas[k].to_degrees(),
                edges_db,
                counts,
                nominal_db: db(nominal),
                lower_db: db(bounds.p_lower[k]),
                upper_db: db(bounds.p_upper[k]),
            })
        }
        _ => None,
    };
    Ok(McReport {
        n,
        seed,
        violations,
        max_overshoot_db: max_overshoot_db.is_finite().then_some(max_overshoot_db),
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arraymodel::{linear_elements, Taper};
    use crate::boundscore::power_bounds;

    fn setup() -> (ArraySpec, ErrorSpec, BoundsResult) {
        let a = ArraySpec::new(linear_elements(&[1.0, 2.0, 2.0, 1.0], 0.0375, 0.0), 0.075, 0.1, Taper::default()).unwrap();
        let e = ErrorSpec::uniform(4, 0.05, 0.07, 0.05);
        let grid: Vec<f64> = (-90..=90).map(|d| (d as f64).to_radians()).collect();
        let b = power_bounds(&a, &e, &grid, -60.0, false).unwrap();
        (a, e, b)
    }

    #[test]
    fn draws_are_feasible() {
        let (_, e, _) = setup();
        for i in 0..200 {
            draw_realization(&e, &mut draw_rng(3, i)).check_within(&e, 0.0).unwrap();
        }
    }

    #[test]
    fn no_violations_and_deterministic() {
        let (a, e, b) = setup();
        let r1 = monte_carlo_check(&a, &e, &b, 300, 11, Some(0.3)).unwrap();
        let r2 = monte_carlo_check(&a, &e, &b, 300, 11, Some(0.3)).unwrap();
        assert_eq!(r1.violations, 0);
        assert!(r1.max_overshoot_db.unwrap() <= 0.0);
        assert_eq!(r1, r2);
        assert_eq!(r1.histogram.unwrap().counts.iter().sum::<usize>(), 300);
    }

    #[test]
    fn empty_run() {
        let (a, e, b) = setup();
        let r = monte_carlo_check(&a, &e, &b, 0, 1, Some(0.0)).unwrap();
        assert_eq!((r.n, r.violations), (0, 0));
        assert!(r.histogram.is_none());
    }

    #[test]
    fn shrunken_bounds_are_caught() {
        let (a, e, mut b) = setup();
        for p in &mut b.p_upper {
            *p *= 0.25;
        }
        assert!(monte_carlo_check(&a, &e, &b, 200, 5, None).unwrap().violations > 0);
    }
}
