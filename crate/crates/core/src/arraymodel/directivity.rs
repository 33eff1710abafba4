use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::ivalgeom::{unimodal_range, Extremum, RealInterval};

/// First zero of J1; the directivity mainlobe ends where its argument
/// reaches this value.
const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;

const FALLBACK_SAMPLES: usize = 64;

/// Global minimum of `2·jinc`, rounded down.
const RESPONSE_FLOOR: f64 = -0.1323;

/// Rear-suppression window applied to the element response. Full response
/// up to `start`, a cos² ramp to zero at `end` (radians, measured from the
/// element normal).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Taper {
    pub start: f64,
    pub end: f64,
}

impl Default for Taper {
    fn default() -> Self {
        Self { start: 80f64.to_radians(), end: 100f64.to_radians() }
    }
}

impl Taper {
    pub fn eval(&self, alpha: f64) -> f64 {
        let a = wrap_angle(alpha).abs();
        if a <= self.start {
            1.0
        } else if a >= self.end {
            0.0
        } else {
            let t = (a - self.start) / (self.end - self.start);
            (FRAC_PI_2 * t).cos().powi(2)
        }
    }

    /// Bound on the slope of the taper.
    fn lipschitz(&self) -> f64 {
        if self.end > self.start {
            PI / (2.0 * (self.end - self.start))
        } else {
            f64::INFINITY
        }
    }
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let y = (a + PI).rem_euclid(2.0 * PI) - PI;
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// `J1(x) / x`, with the limit 1/2 at the origin.
pub fn jinc(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        0.5 - x2 / 16.0 + x2 * x2 / 384.0
    } else {
        libm::j1(x) / x
    }
}

fn aperture_coeff(diameter: f64, wavelength: f64) -> f64 {
    2.0 * PI * diameter / wavelength
}

/// Element response `2·jinc(2π sin α · D / λ)` times the rear taper.
pub fn directivity(alpha: f64, diameter: f64, wavelength: f64, taper: &Taper) -> f64 {
    let c = aperture_coeff(diameter, wavelength);
    2.0 * jinc(c * alpha.sin()) * taper.eval(alpha)
}

/// Half-width of the region around the normal where the response is
/// nonincreasing in |α|.
fn unimodal_half_width(diameter: f64, wavelength: f64) -> f64 {
    if diameter == 0.0 {
        return PI;
    }
    let s = J1_FIRST_ZERO / aperture_coeff(diameter, wavelength);
    if s >= 1.0 {
        FRAC_PI_2
    } else {
        s.asin()
    }
}

/// Inclusive range of [`directivity`] over an angle interval.
///
/// Inside the mainlobe the response has its single maximum at α = 0 and the
/// three-case range is exact. Elsewhere 64 samples are inflated by a slope
/// bound: |d/dx 2·jinc(x)| = 2|J2(x)|/x ≤ 1/2.
pub fn directivity_interval(alpha: RealInterval, diameter: f64, wavelength: f64, taper: &Taper) -> RealInterval {
    let f = |a: f64| directivity(a, diameter, wavelength, taper);
    if alpha.is_degenerate() {
        return RealInterval::point(f(alpha.lo()));
    }
    let shift = wrap_angle(alpha.mid()) - alpha.mid();
    let a = alpha.shift(shift);
    let half = unimodal_half_width(diameter, wavelength);
    let domain = RealInterval::new(-half, half).expect("ordered");
    if let Ok(r) = unimodal_range(f, Extremum::Max, 0.0, Some(domain), a) {
        return r;
    }
    let n = FALLBACK_SAMPLES;
    let h = a.width() / (n - 1) as f64;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let v = f(a.lerp(i as f64 / (n - 1) as f64));
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let slope = 0.5 * aperture_coeff(diameter, wavelength) + taper.lipschitz();
    let pad = 0.5 * h * slope;
    RealInterval::new((lo - pad).max(RESPONSE_FLOOR), (hi + pad).min(1.0)).expect("finite samples")
}
