use crate::arraymodel::{directivity_interval, dot2, ArraySpec};
use crate::boundscore::{ElementInterval, ErrorSpec, StructureInterval};
use crate::error::{consistency, Error, Result};
use crate::ivalgeom::{AnnularSector, RealInterval};
use crate::Complex;

/// Slack allowed when a recovered value lands just outside its interval.
pub const FEASIBILITY_EPS: f64 = 1e-9;

const INV_GRID: usize = 65;

/// Factorization of one summand point into element and structure values
/// plus the coupling column it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSplit {
    pub e: Complex,
    pub a: Complex,
    /// `C_mc` for every `m`, with `C_cc = 1`.
    pub column: Vec<Complex>,
    /// `|A − centre| / R`, in `[0, 1]`.
    pub strength: f64,
}

/// Errors of one element recovered from its value `E_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementErrors {
    pub amp: f64,
    pub phase: f64,
    pub offset: [f64; 2],
    pub tilt: f64,
    /// The combined phase was interior, so its split over phase and
    /// position was a choice.
    pub ambiguous: bool,
}

fn sector_closest_to(s: &AnnularSector, p: Complex) -> Complex {
    let (r0, r1) = (s.amp.lo(), s.amp.hi());
    let mut cands = Vec::with_capacity(3);
    let mid = s.phase.mid();
    let ang = mid + crate::arraymodel::wrap_angle(p.arg() - mid);
    if s.phase.contains(ang) || s.is_full_phase() {
        cands.push(Complex::from_polar(p.norm().clamp(r0, r1), p.arg()));
    }
    for ph in [s.phase.lo(), s.phase.hi()] {
        let d = Complex::from_polar(1.0, ph);
        let t = (p.re * d.re + p.im * d.im).clamp(r0, r1);
        cands.push(d * t);
    }
    cands.into_iter().min_by(|a, b| (a - p).norm().total_cmp(&(b - p).norm())).expect("candidates")
}

/// Splits `z_c = E_c · A_c`.
///
/// `E_inv = z_c / E_c^I` is an annular sector with amplitude
/// `[|z|/ā, |z|/a̲]` and phase `∠z − φ^I`. For a boundary point of the
/// product it touches the coupling disk in a single point, which is the
/// closest point of `E_inv` to the disk centre. Coupling phases follow as
/// `∠(A − centre) + k_s·r_m`; magnitudes scale as `s·γ^{|m−c|}`.
pub fn backtrack_coupling(
    z: Complex,
    e: &ElementInterval,
    a: &StructureInterval,
    array: &ArraySpec,
    errors: &ErrorSpec,
    c: usize,
) -> Result<CouplingSplit> {
    let m = array.len();
    let centre = a.disk.center;
    let r = a.disk.radius;
    if r == 0.0 || z.norm() == 0.0 {
        let mut column = vec![Complex::new(0.0, 0.0); m];
        column[c] = Complex::new(1.0, 0.0);
        let e_val = if centre.norm() > 0.0 { z / centre } else { Complex::new(0.0, 0.0) };
        return Ok(CouplingSplit { e: e_val, a: centre, column, strength: 0.0 });
    }
    if e.amp.lo() < 0.0 {
        return Err(Error::Domain("coupling split needs a non-negative element amplitude".into()));
    }
    let zn = z.norm();
    let inv_hi = if e.amp.lo() > 0.0 { zn / e.amp.lo() } else { f64::MAX.sqrt() };
    let inv = AnnularSector {
        amp: RealInterval::new(zn / e.amp.hi(), inv_hi).map_err(|_| consistency("degenerate inverse amplitude"))?,
        phase: RealInterval::new(z.arg() - e.phase.hi(), z.arg() - e.phase.lo()).expect("ordered"),
    };
    let near = sector_closest_to(&inv, centre);
    let dist = (near - centre).norm();
    let tol = 1e-9 * (1.0 + centre.norm());
    let a_val = if dist > r + tol {
        return Err(consistency(format!("E_inv misses the coupling disk by {:e}", dist - r)));
    } else if dist >= r - tol {
        near
    } else {
        // interior point: several splits exist; take the one with the
        // strongest coupling
        let mut best = near;
        for i in 0..INV_GRID {
            for j in 0..INV_GRID {
                let amp = inv.amp.lerp(i as f64 / (INV_GRID - 1) as f64).min(centre.norm() + r);
                let p = Complex::from_polar(amp, inv.phase.lerp(j as f64 / (INV_GRID - 1) as f64));
                let d = (p - centre).norm();
                if d <= r && d > (best - centre).norm() {
                    best = p;
                }
            }
        }
        best
    };
    let (column, strength) = coupling_column(a_val, c, array, errors);
    Ok(CouplingSplit { e: z / a_val, a: a_val, column, strength })
}

/// Coupling column `C_{·c}` that turns the nominal `A_c` into `a_val`.
pub fn coupling_column(a_val: Complex, c: usize, array: &ArraySpec, errors: &ErrorSpec) -> (Vec<Complex>, f64) {
    let disk = crate::boundscore::structure_interval(c, array, errors).disk;
    let mut column = vec![Complex::new(0.0, 0.0); array.len()];
    column[c] = Complex::new(1.0, 0.0);
    if disk.radius == 0.0 {
        return (column, 0.0);
    }
    let off = a_val - disk.center;
    let strength = (off.norm() / disk.radius).min(1.0);
    let ks = array.k_steer();
    for (mi, el) in array.elements.iter().enumerate() {
        if mi == c {
            continue;
        }
        let mag = strength * errors.gamma.powi(mi.abs_diff(c) as i32);
        let sign = if el.weight < 0.0 { std::f64::consts::PI } else { 0.0 };
        column[mi] = Complex::from_polar(mag, off.arg() + dot2(ks, el.position) + sign);
    }
    (column, strength)
}

fn within(name: &str, c: usize, x: f64, iv: &RealInterval) -> Result<f64> {
    if iv.contains_within(x, FEASIBILITY_EPS) {
        Ok(iv.clamp(x))
    } else {
        Err(consistency(format!("recovered {name} {x} of element {c} lies outside {iv}")))
    }
}

/// Value of `x ∈ iv` solving `f(x) = target` for continuous `f`, found by
/// scanning for a bracket and bisecting it.
fn solve_in(f: impl Fn(f64) -> f64, iv: RealInterval, target: f64) -> Option<f64> {
    if iv.is_degenerate() {
        return ((f(iv.lo()) - target).abs() <= 1e-12).then_some(iv.lo());
    }
    let n = 256;
    let xs: Vec<f64> = (0..=n).map(|i| iv.lerp(i as f64 / n as f64)).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x) - target).collect();
    if let Some(i) = vals.iter().position(|v| v.abs() <= 1e-15) {
        return Some(xs[i]);
    }
    let i = (0..n).find(|&i| vals[i].signum() != vals[i + 1].signum())?;
    let (mut a, mut b) = (xs[i], xs[i + 1]);
    let sa = vals[i].signum();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) - target).signum() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Recovers amplitude, tilt, phase and position errors from `E_c`.
///
/// Amplitude goes to the gain first (`g = |E|/d_max`, clamped) and the
/// remainder to directivity through tilt. The combined phase
/// `k·r_c + k_x x + k_y y + Φ` is split sequentially: Φ, then x, then y,
/// each at fraction `split` of its feasible band.
pub fn recover_element(
    c: usize,
    e_val: Complex,
    theta: f64,
    array: &ArraySpec,
    errors: &ErrorSpec,
    split: f64,
) -> Result<ElementErrors> {
    let el = &array.elements[c];
    let diam = array.aperture_scale * el.diameter;
    let d_range = directivity_interval(errors.tilt[c].shift(theta - el.orientation), diam, array.wavelength, &array.taper);
    // a negative directivity lobe flips the phase by π
    let mut first_err = None;
    for sign in [1.0, -1.0] {
        let reachable = if sign > 0.0 { d_range.hi() > 0.0 } else { d_range.lo() < 0.0 };
        if !reachable && !(sign > 0.0 && e_val.norm() == 0.0) {
            continue;
        }
        match recover_signed(c, e_val, theta, array, errors, split, sign) {
            Ok(r) => return Ok(r),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    Err(first_err.unwrap_or_else(|| consistency(format!("element {c} has no feasible directivity sign"))))
}

fn recover_signed(
    c: usize,
    e_val: Complex,
    theta: f64,
    array: &ArraySpec,
    errors: &ErrorSpec,
    split: f64,
    sign: f64,
) -> Result<ElementErrors> {
    let el = &array.elements[c];
    let diam = array.aperture_scale * el.diameter;
    let d_of = |t: f64| sign * crate::arraymodel::directivity(theta - el.orientation + t, diam, array.wavelength, &array.taper);
    let mag = e_val.norm();
    let gi = errors.amp[c];
    let (amp, tilt) = if errors.tilt[c].is_degenerate() {
        let d = d_of(errors.tilt[c].lo());
        let g = if d > 0.0 { mag / d } else { gi.mid() };
        (within("amplitude", c, g, &gi)?, errors.tilt[c].lo())
    } else {
        // sampled rather than the padded enclosure so the target is reachable
        let dmax = (0..=256)
            .map(|i| d_of(errors.tilt[c].lerp(i as f64 / 256.0)))
            .fold(f64::NEG_INFINITY, f64::max);
        let g = gi.clamp(if dmax > 0.0 { mag / dmax } else { gi.mid() });
        let want = if g > 0.0 { mag / g } else { 0.0 };
        let t = solve_in(d_of, errors.tilt[c], want)
            .ok_or_else(|| consistency(format!("no tilt of element {c} yields directivity {want}")))?;
        (g, t)
    };

    let k = array.k(theta);
    let pos_phase = RealInterval::point(k[0]) * errors.pos_x[c] + RealInterval::point(k[1]) * errors.pos_y[c];
    let combined = pos_phase + errors.phase[c];
    let base = dot2(k, el.position) + if sign < 0.0 { std::f64::consts::PI } else { 0.0 };
    let raw = e_val.arg() - base;
    let mid = combined.mid();
    let mut resid = mid + crate::arraymodel::wrap_angle(raw - mid);
    if !combined.contains_within(resid, FEASIBILITY_EPS) {
        return Err(consistency(format!(
            "phase {resid} of element {c} lies outside the combined interval {combined}"
        )));
    }
    resid = combined.clamp(resid);
    let ambiguous = !pos_phase.is_degenerate()
        && !errors.phase[c].is_degenerate()
        && resid > combined.lo() + FEASIBILITY_EPS
        && resid < combined.hi() - FEASIBILITY_EPS;

    // Φ first: resid − Φ must stay reachable by the position terms
    let band = RealInterval::new(
        errors.phase[c].lo().max(resid - pos_phase.hi()),
        errors.phase[c].hi().min(resid - pos_phase.lo()).max(errors.phase[c].lo().max(resid - pos_phase.hi())),
    )
    .expect("ordered");
    let phase = within("phase", c, band.lerp(split), &errors.phase[c])?;
    let resid = resid - phase;

    let y_phase = RealInterval::point(k[1]) * errors.pos_y[c];
    let x = split_term(k[0], errors.pos_x[c], resid, y_phase, split);
    let x = within("x offset", c, x, &errors.pos_x[c])?;
    let resid = resid - k[0] * x;
    let y = split_term(k[1], errors.pos_y[c], resid, RealInterval::point(0.0), split);
    let y = within("y offset", c, y, &errors.pos_y[c])?;
    let miss = resid - k[1] * y;
    if miss.abs() > 1e-7 {
        return Err(consistency(format!("phase of element {c} left unexplained by {miss:e} rad")));
    }
    Ok(ElementErrors { amp, phase, offset: [x, y], tilt, ambiguous })
}

/// Picks `x ∈ xi` with `k·x ∈ resid − rest`, at fraction `t` of the band.
fn split_term(k: f64, xi: RealInterval, resid: f64, rest: RealInterval, t: f64) -> f64 {
    if xi.is_degenerate() {
        return xi.lo();
    }
    if k.abs() < 1e-12 {
        return xi.clamp(0.0);
    }
    let (a, b) = ((resid - rest.hi()) / k, (resid - rest.lo()) / k);
    let lo = a.min(b).max(xi.lo());
    let hi = a.max(b).min(xi.hi());
    if hi < lo {
        // numerically empty: return the nearer edge and let the caller check
        return if (lo - xi.hi()).abs() < (hi - xi.lo()).abs() { lo } else { hi };
    }
    lo + t * (hi - lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arraymodel::{linear_elements, Taper};
    use crate::backtrack::exact::ExactSet;
    use crate::boundscore::{element_interval, structure_interval};

    const LAMBDA: f64 = 0.075;

    fn ula(m: usize) -> ArraySpec {
        let w = vec![1.0; m];
        ArraySpec::new(linear_elements(&w, 0.5 * LAMBDA, 0.0), LAMBDA, 0.2, Taper::default()).unwrap()
    }

    #[test]
    fn degenerate_errors_recover_nominal() {
        let a = ula(3);
        let e = ErrorSpec::zero(3);
        let th = 0.4;
        let ei = element_interval(1, th, &a, &e);
        let r = recover_element(1, ei.nominal_point(), th, &a, &e, 0.5).unwrap();
        assert!((r.amp - 1.0).abs() < 1e-12 && r.phase == 0.0 && r.offset == [0.0, 0.0] && r.tilt == 0.0);
    }

    #[test]
    fn phase_split_band_and_position() {
        let a = ula(3);
        let mut e = ErrorSpec::uniform(3, 0.05, 0.1, 0.0);
        e.pos_x = vec![RealInterval::symmetric(0.0, 0.002); 3];
        let th = 0.9;
        let k = a.k(th);
        let el = &a.elements[2];
        // realization: g = 1.03, Φ = 0.04, x = 0.001
        let truth = Complex::from_polar(1.03, dot2(k, el.position) + k[0] * 0.001 + 0.04);
        for t in [0.0, 0.5, 1.0] {
            let r = recover_element(2, truth, th, &a, &e, t).unwrap();
            assert!((r.amp - 1.03).abs() < 1e-12);
            assert!(r.ambiguous);
            let back = Complex::from_polar(r.amp, dot2(k, [el.position[0] + r.offset[0], el.position[1]]) + r.phase);
            assert!((back - truth).norm() < 1e-12);
        }
    }

    #[test]
    fn out_of_interval_is_reported() {
        let a = ula(2);
        let e = ErrorSpec::uniform(2, 0.05, 0.1, 0.0);
        let th = 0.0;
        let bad = Complex::from_polar(1.2, dot2(a.k(th), a.elements[0].position));
        assert!(matches!(recover_element(0, bad, th, &a, &e, 0.5), Err(Error::Consistency(_))));
    }

    #[test]
    fn tilt_takes_the_directivity_share() {
        let mut a = ula(2);
        for el in &mut a.elements {
            el.diameter = 0.475 * LAMBDA;
        }
        let mut e = ErrorSpec::uniform(2, 0.02, 0.0, 0.0);
        e.tilt = vec![RealInterval::symmetric(0.0, 2f64.to_radians()); 2];
        let th = 0.6;
        let k = a.k(th);
        let d = a.element_directivity(0, th + 0.01);
        let truth = Complex::from_polar(0.98 * d, dot2(k, a.elements[0].position));
        let r = recover_element(0, truth, th, &a, &e, 0.5).unwrap();
        let back = r.amp * a.element_directivity(0, th + r.tilt);
        assert!((back - truth.norm()).abs() < 1e-12);
        assert!(e.tilt[0].contains(r.tilt) && e.amp[0].contains(r.amp));
    }

    #[test]
    fn coupling_split_at_outer_boundary() {
        let a = ula(5);
        let e = ErrorSpec::uniform(5, 0.05, 0.08, 0.05);
        let th = 0.3;
        let c = 2;
        let ei = element_interval(c, th, &a, &e);
        let si = structure_interval(c, &a, &e);
        let set = ExactSet { element: ei, structure: si };
        let u = Complex::from_polar(1.0, ei.phase.hi() + si.disk.center.arg() + 0.5);
        let f = set.support_point(u);
        let s = backtrack_coupling(f.z, &ei, &si, &a, &e, c).unwrap();
        assert!((s.strength - 1.0).abs() < 1e-9);
        assert!((s.e - f.e).norm() < 1e-9 && (s.a - f.a).norm() < 1e-9);
        for (m, v) in s.column.iter().enumerate() {
            let cap = if m == c { 1.0 } else { 0.05f64.powi(m.abs_diff(c) as i32) };
            assert!((v.norm() - cap).abs() < 1e-9);
        }
        // the column rebuilds A
        let ks = a.k_steer();
        let rebuilt: Complex = a
            .elements
            .iter()
            .zip(&s.column)
            .map(|(el, cm)| cm * Complex::from_polar(el.weight, -dot2(ks, el.position)))
            .sum();
        assert!((rebuilt - s.a).norm() < 1e-12);
    }

    #[test]
    fn zero_radius_reduces_to_plain_division() {
        let a = ula(3);
        let e = ErrorSpec::uniform(3, 0.05, 0.08, 0.0);
        let si = structure_interval(0, &a, &e);
        let ei = element_interval(0, 0.1, &a, &e);
        let z = Complex::new(0.2, 0.1);
        let s = backtrack_coupling(z, &ei, &si, &a, &e, 0).unwrap();
        assert_eq!(s.strength, 0.0);
        assert!((s.e * si.disk.center - z).norm() < 1e-15);
    }
}
