//! Interval beampattern: per-element sectors times structure disks, summed.
//!
//! `B^I(θ) = Σ_c E_c^I · A_c^I` where `E_c^I` carries the element's own
//! amplitude, directivity, position and phase errors and `A_c^I` carries
//! apodization, steering and the coupling it receives. Power bounds are the
//! squared distance range of the summed polygon from the origin.

mod element;
mod forward;

pub use element::{
    element_disk, element_interval, product_interval, structure_interval, ElementInterval, StructureInterval,
};
pub use forward::Realization;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arraymodel::{dot2, nominal_beampattern, ArraySpec, BeampatternCurve, PowerCurve};
use crate::error::{invalid, Error, Result};
use crate::ivalgeom::{wrap_annular_sector, wrap_disk, ConvexPolygon, DiskInterval, RealInterval};
use crate::Complex;

/// Error intervals per element. Amplitudes are multiplicative (nominal 1);
/// phase, position offsets (meters) and tilt (radians) are additive
/// (nominal 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSpec {
    pub amp: Vec<RealInterval>,
    pub phase: Vec<RealInterval>,
    pub pos_x: Vec<RealInterval>,
    pub pos_y: Vec<RealInterval>,
    pub tilt: Vec<RealInterval>,
    pub gamma: f64,
}

impl ErrorSpec {
    pub fn zero(m: usize) -> Self {
        let z = vec![RealInterval::point(0.0); m];
        Self {
            amp: vec![RealInterval::point(1.0); m],
            phase: z.clone(),
            pos_x: z.clone(),
            pos_y: z.clone(),
            tilt: z,
            gamma: 0.0,
        }
    }

    /// `±dg` amplitude and `±dphi` (radians) phase on every element.
    pub fn uniform(m: usize, dg: f64, dphi: f64, gamma: f64) -> Self {
        Self {
            amp: vec![RealInterval::symmetric(1.0, dg); m],
            phase: vec![RealInterval::symmetric(0.0, dphi); m],
            gamma,
            ..Self::zero(m)
        }
    }

    pub fn len(&self) -> usize {
        self.amp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amp.is_empty()
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let lists = [("amp", &self.amp), ("phase", &self.phase), ("pos_x", &self.pos_x), ("pos_y", &self.pos_y), ("tilt", &self.tilt)];
        for (name, l) in lists {
            if l.len() != m {
                return Err(invalid(format!("{name} has {} entries, array has {m} elements", l.len())));
            }
        }
        for (c, a) in self.amp.iter().enumerate() {
            if a.lo() < 0.0 || !a.contains(1.0) {
                return Err(invalid(format!("amplitude interval {a} of element {c} must be non-negative and contain 1")));
            }
        }
        for (name, l) in &lists[1..] {
            if let Some((c, x)) = l.iter().enumerate().find(|(_, x)| !x.contains(0.0)) {
                return Err(invalid(format!("{name} interval {x} of element {c} must contain 0")));
            }
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(invalid(format!("coupling strength {} must lie in [0, 1)", self.gamma)));
        }
        Ok(())
    }

    pub fn has_coupling(&self) -> bool {
        self.gamma > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsResult {
    pub angles: Vec<f64>,
    pub p_lower: Vec<f64>,
    pub p_upper: Vec<f64>,
    pub polygons: Option<Vec<ConvexPolygon>>,
    /// Cumulative outward representation error (amplitude, dB).
    pub tol_db: f64,
}

impl BoundsResult {
    /// Representation tolerance in power units.
    pub fn power_tol(&self) -> f64 {
        10f64.powf(self.tol_db / 10.0)
    }
}

/// Per-summand amplitude tolerance for a cumulative budget in dB.
pub fn summand_tol(tol_db: f64, m: usize) -> f64 {
    10f64.powf(tol_db / 20.0) / m as f64
}

/// Polygons `E_c^I · A_c^I` for every element.
pub fn beampattern_summands(
    theta: f64,
    array: &ArraySpec,
    errors: &ErrorSpec,
    tol: f64,
) -> Result<Vec<ConvexPolygon>> {
    (0..array.len())
        .map(|c| {
            let e = element_interval(c, theta, array, errors);
            let a = structure_interval(c, array, errors);
            product_interval(&e, &a, tol)
        })
        .collect()
}

pub fn minkowski_total(summands: &[ConvexPolygon]) -> ConvexPolygon {
    summands
        .iter()
        .skip(1)
        .fold(summands[0].clone(), |acc, p| acc.minkowski_sum(p))
}

/// `B^I(θ)` with per-summand tolerance `tol`.
pub fn beampattern_interval(theta: f64, array: &ArraySpec, errors: &ErrorSpec, tol: f64) -> Result<ConvexPolygon> {
    Ok(minkowski_total(&beampattern_summands(theta, array, errors, tol)?))
}

/// The unswapped grouping `Σ_m w_m e^{−jk_s·r_m} Σ_c C_mc E_c`: every
/// off-diagonal coupling term has unknown phase and collapses to a disk.
pub fn naive_beampattern_interval(theta: f64, array: &ArraySpec, errors: &ErrorSpec, tol: f64) -> Result<ConvexPolygon> {
    let m = array.len();
    let es: Vec<ElementInterval> = (0..m).map(|c| element_interval(c, theta, array, errors)).collect();
    let reach: Vec<f64> = es.iter().map(|e| e.amp.lo().abs().max(e.amp.hi().abs())).collect();
    let mut total = ConvexPolygon::point(Complex::new(0.0, 0.0));
    let mut radius = 0.0;
    for (i, el) in array.elements.iter().enumerate() {
        let rot = Complex::from_polar(el.weight, -dot2(array.k_steer(), el.position));
        let own = product_interval(&es[i], &StructureInterval { disk: DiskInterval::point(rot) }, tol)?;
        total = total.minkowski_sum(&own);
        let leak: f64 = (0..m).filter(|&c| c != i).map(|c| errors.gamma.powi(c.abs_diff(i) as i32) * reach[c]).sum();
        radius += el.weight.abs() * leak;
    }
    if radius > 0.0 {
        total = total.minkowski_sum(&wrap_disk(&DiskInterval { center: Complex::new(0.0, 0.0), radius }, tol)?);
    }
    Ok(total)
}

/// Circular-representation upper bound on `|B(θ)|`: every factor is
/// enclosed by a disk, products and sums of disks stay disks.
pub fn circular_upper(theta: f64, array: &ArraySpec, errors: &ErrorSpec) -> f64 {
    let mut center = Complex::new(0.0, 0.0);
    let mut radius = 0.0;
    for c in 0..array.len() {
        let e = element_disk(&element_interval(c, theta, array, errors));
        let a = structure_interval(c, array, errors).disk;
        center += e.center * a.center;
        radius += e.center.norm() * a.radius + e.radius * a.center.norm() + e.radius * a.radius;
    }
    center.norm() + radius
}

/// Upper and lower power bounds over a grid. Polygons of `B^I` are kept
/// when `keep_polygons` is set.
pub fn power_bounds(
    array: &ArraySpec,
    errors: &ErrorSpec,
    thetas: &[f64],
    tol_db: f64,
    keep_polygons: bool,
) -> Result<BoundsResult> {
    errors.validate(array.len())?;
    let tol = summand_tol(tol_db, array.len());
    let rows: Vec<(RealInterval, ConvexPolygon)> = thetas
        .par_iter()
        .map(|&t| {
            let b = beampattern_interval(t, array, errors, tol)?;
            Ok((b.abs_interval(), b))
        })
        .collect::<Result<_>>()?;
    let worst_tol = rows.iter().map(|(_, p)| p.tol()).fold(0.0, f64::max);
    let tol_db = 20.0 * worst_tol.max(1e-15).log10();
    let p_lower = rows.iter().map(|(r, _)| r.lo() * r.lo()).collect();
    let p_upper = rows.iter().map(|(r, _)| r.hi() * r.hi()).collect();
    let polygons = keep_polygons.then(|| rows.into_iter().map(|(_, p)| p).collect());
    Ok(BoundsResult { angles: thetas.to_vec(), p_lower, p_upper, polygons, tol_db })
}

/// Largest amplitude and phase half-widths, plus whether they are uniform
/// and the spec is free of position and tilt errors.
pub fn max_deviations(errors: &ErrorSpec) -> (f64, f64, bool) {
    let dg: Vec<f64> = errors.amp.iter().map(|a| a.max_deviation(1.0)).collect();
    let dp: Vec<f64> = errors.phase.iter().map(|p| p.max_deviation(0.0)).collect();
    let max = |v: &[f64]| v.iter().cloned().fold(0.0, f64::max);
    let (g, p) = (max(&dg), max(&dp));
    let symmetric = errors.amp.iter().all(|a| (a.mid() - 1.0).abs() < 1e-12)
        && errors.phase.iter().all(|x| x.mid().abs() < 1e-12);
    let same = dg.iter().all(|&x| (x - g).abs() < 1e-12) && dp.iter().all(|&x| (x - p).abs() < 1e-12);
    let plain = [&errors.pos_x, &errors.pos_y, &errors.tilt].iter().all(|l| l.iter().all(|x| x.is_degenerate()));
    (g, p, symmetric && same && plain)
}

/// Additive amplitude margin `√(δΦ² + δg²) + 2γ`.
pub fn approx_margin(errors: &ErrorSpec) -> f64 {
    let (dg, dp, _) = max_deviations(errors);
    dp.hypot(dg) + 2.0 * errors.gamma
}

/// Closed-form approximate upper bound `(|B_nom| + √(δΦ² + δg²) + 2γ)²`.
/// Non-uniform specs use the per-element maxima and log a warning.
pub fn approx_upper_bound(array: &ArraySpec, errors: &ErrorSpec, thetas: &[f64]) -> PowerCurve {
    let (_, _, uniform) = max_deviations(errors);
    if !uniform {
        warn!("approximate bound: error spec is not uniform amplitude/phase only; using per-element maxima");
    }
    let margin = approx_margin(errors);
    let nominal = nominal_beampattern(array, thetas);
    let power = nominal.values.iter().map(|b| (b.norm() + margin).powi(2)).collect();
    PowerCurve { angles: thetas.to_vec(), power }
}

/// Index range of the mainlobe: the nominal peak and the first local minima
/// on either side. Returns `(peak, left_min, right_min)`.
pub fn mainlobe(nominal_power: &[f64]) -> Result<(usize, usize, usize)> {
    let n = nominal_power.len();
    if n == 0 {
        return Err(Error::NoSidelobes);
    }
    let peak = nominal_power
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > nominal_power[best] { i } else { best });
    let mut l = peak;
    while l > 0 && nominal_power[l - 1] < nominal_power[l] {
        l -= 1;
    }
    let mut r = peak;
    while r + 1 < n && nominal_power[r + 1] < nominal_power[r] {
        r += 1;
    }
    if l == 0 && r == n - 1 {
        return Err(Error::NoSidelobes);
    }
    Ok((peak, l, r))
}

/// Peak sidelobe level of `upper` (dB relative to the nominal peak), the
/// sidelobe region lying outside the nominal mainlobe.
pub fn psll(upper: &[f64], nominal_power: &[f64]) -> Result<f64> {
    if upper.len() != nominal_power.len() {
        return Err(invalid("curve lengths differ"));
    }
    let (peak, l, r) = mainlobe(nominal_power)?;
    let n = upper.len();
    let left = if l > 0 { &upper[..=l] } else { &upper[..0] };
    let right = if r < n - 1 { &upper[r..] } else { &upper[..0] };
    let side = left.iter().chain(right).cloned().fold(0.0, f64::max);
    Ok(10.0 * (side / nominal_power[peak]).log10())
}

impl BoundsResult {
    pub fn psll(&self, nominal: &BeampatternCurve) -> Result<f64> {
        psll(&self.p_upper, &nominal.power().power)
    }
}

/// Exact-sector wrap used by tests and the oracle for element-only sums.
pub fn element_polygon(e: &ElementInterval, tol: f64) -> Result<ConvexPolygon> {
    let pieces: Result<Vec<ConvexPolygon>> = e.sectors().iter().map(|s| wrap_annular_sector(s, tol)).collect();
    let pts: Vec<Complex> = pieces?.iter().flat_map(|p| p.vertices().to_vec()).collect();
    Ok(ConvexPolygon::hull(&pts, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arraymodel::{angle_grid_deg, arc_elements, linear_elements, Taper};

    const LAMBDA: f64 = 0.075;

    fn ula(w: &[f64]) -> ArraySpec {
        ArraySpec::new(linear_elements(w, 0.5 * LAMBDA, 0.0), LAMBDA, 0.1, Taper::default()).unwrap()
    }

    #[test]
    fn zero_errors_collapse_to_nominal() {
        let a = ula(&[1.0, 2.0, 3.0, 2.0]);
        let grid = angle_grid_deg(-90.0, 1.0, 90.0).unwrap();
        let b = power_bounds(&a, &ErrorSpec::zero(4), &grid, -60.0, true).unwrap();
        let nom = nominal_beampattern(&a, &grid).power();
        for i in 0..grid.len() {
            assert!((b.p_upper[i] - nom.power[i]).abs() < 1e-12);
            assert!((b.p_lower[i] - nom.power[i]).abs() < 1e-12);
            assert_eq!(b.polygons.as_ref().unwrap()[i].len(), 1);
        }
    }

    #[test]
    fn validate_rejects_bad_specs() {
        let mut e = ErrorSpec::uniform(3, 0.05, 0.1, 0.0);
        assert!(e.validate(3).is_ok());
        assert!(e.validate(4).is_err());
        e.amp[1] = RealInterval::new(1.01, 1.1).unwrap();
        assert!(e.validate(3).is_err());
        let mut e = ErrorSpec::zero(2);
        e.gamma = 1.0;
        assert!(e.validate(2).is_err());
    }

    #[test]
    fn approx_margin_cases() {
        let e = ErrorSpec::uniform(31, 0.05, 5f64.to_radians(), 0.05);
        let m = approx_margin(&e);
        assert!((m - 0.20058).abs() < 5e-5, "{m}");
        assert!((20.0 * m.log10() + 13.955).abs() < 0.01);
        let e = ErrorSpec::uniform(31, 0.01, 1f64.to_radians(), 0.0);
        assert!((20.0 * approx_margin(&e).log10() + 33.93).abs() < 0.01);
        let a = ula(&[1.0, 1.0, 1.0]);
        let grid = angle_grid_deg(-30.0, 5.0, 30.0).unwrap();
        let p = approx_upper_bound(&a, &ErrorSpec::zero(3), &grid);
        assert_eq!(p.power, nominal_beampattern(&a, &grid).power().power);
    }

    #[test]
    fn psll_needs_sidelobes() {
        assert!(matches!(psll(&[1.0, 2.0, 1.0], &[1.0, 2.0, 1.0]), Err(Error::NoSidelobes)));
        let nom = [0.5, 0.1, 1.0, 0.2, 0.3, 0.1];
        let up = [0.6, 0.2, 1.1, 0.3, 0.4, 0.2];
        let s = psll(&up, &nom).unwrap();
        assert!((s - 10.0 * 0.6f64.log10()).abs() < 1e-12);
    }

    #[test]
    fn swapped_sum_is_tighter_than_naive() {
        let a = ula(&[1.0, 1.5, 1.0]);
        let e = ErrorSpec::uniform(3, 0.05, 0.1, 0.1);
        for t in [-0.7, 0.0, 0.4, 1.2] {
            let s = beampattern_interval(t, &a, &e, 1e-7).unwrap();
            let n = naive_beampattern_interval(t, &a, &e, 1e-7).unwrap();
            assert!(s.vertices().iter().all(|&v| n.contains(v, 1e-6)));
            let bigger = (0..360).any(|k| {
                let u = Complex::from_polar(1.0, (k as f64).to_radians());
                n.support(u) > s.support(u) + 1e-3
            });
            assert!(bigger);
        }
    }

    #[test]
    fn circular_dominates_polygonal() {
        let els = arc_elements(&[0.14, 0.23, 0.27, 0.23, 0.14], 0.5 * LAMBDA, 8.0 / 3.0 * LAMBDA, 0.0).unwrap();
        let a = ArraySpec::new(els, LAMBDA, 5f64.to_radians(), Taper::default()).unwrap();
        let mut e = ErrorSpec::uniform(5, 0.05, 0.08, 0.03);
        e.pos_x = vec![RealInterval::symmetric(0.0, 0.002); 5];
        for i in -9..=9 {
            let t = (10.0 * i as f64).to_radians();
            let p = beampattern_interval(t, &a, &e, 1e-6).unwrap().abs_interval().hi();
            assert!(circular_upper(t, &a, &e) >= p - 1e-6);
        }
    }
}
