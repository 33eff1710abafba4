use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Complex;

use super::{ConvexPolygon, RealInterval, MIN_ARC_STEP, TAU};

/// `amp · e^{j phase}` with both factors ranging over intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnularSector {
    pub amp: RealInterval,
    pub phase: RealInterval,
}

impl AnnularSector {
    pub fn new(amp: RealInterval, phase: RealInterval) -> Result<Self> {
        if amp.lo() < 0.0 {
            return Err(invalid(format!("sector amplitude {amp} has a negative lower end")));
        }
        Ok(Self { amp, phase })
    }

    pub fn is_full_phase(&self) -> bool {
        self.phase.width() >= TAU
    }

    pub fn contains(&self, z: Complex, eps: f64) -> bool {
        let r = z.norm();
        if r < self.amp.lo() - eps || r > self.amp.hi() + eps {
            return false;
        }
        if self.is_full_phase() || r <= eps {
            return true;
        }
        let mid = self.phase.mid();
        let d = wrap_pi(z.arg() - mid);
        let half = 0.5 * self.phase.width();
        // angular slack measured as arc length at radius r
        (d.abs() - half) * r <= eps
    }
}

/// Closed disk `|z - center| ≤ radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskInterval {
    pub center: Complex,
    pub radius: f64,
}

impl DiskInterval {
    pub fn new(center: Complex, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(invalid(format!("disk radius {radius} must be finite and non-negative")));
        }
        Ok(Self { center, radius })
    }

    pub fn point(center: Complex) -> Self {
        Self { center, radius: 0.0 }
    }

    pub fn contains(&self, z: Complex, eps: f64) -> bool {
        (z - self.center).norm() <= self.radius + eps
    }
}

pub(crate) fn wrap_pi(x: f64) -> f64 {
    let y = (x + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
    if y <= -std::f64::consts::PI {
        y + TAU
    } else {
        y
    }
}

/// Largest angular step whose tangent vertex overshoots radius `r` by at
/// most `tol`.
fn max_step(r: f64, tol: f64) -> f64 {
    (2.0 * (r / (r + tol)).acos()).clamp(MIN_ARC_STEP, std::f64::consts::FRAC_PI_2)
}

/// Tangent chain circumscribing the arc of radius `r` around `center` from
/// angle `from` to `to` (counter-clockwise, `to ≥ from`).
///
/// The two endpoints lie exactly on the arc; interior vertices sit at
/// `r / cos(Δ/2)` between them, so the chain together with the chord
/// encloses the arc and overshoots it by at most `tol`.
pub fn arc_chain(center: Complex, r: f64, from: f64, to: f64, tol: f64) -> Vec<Complex> {
    if r <= 0.0 {
        return vec![center];
    }
    let width = to - from;
    if width <= 0.0 {
        return vec![center + Complex::from_polar(r, from)];
    }
    let n = (width / max_step(r, tol)).ceil().max(1.0) as usize;
    let step = width / n as f64;
    let rv = r / (0.5 * step).cos();
    let mut out = Vec::with_capacity(n + 2);
    out.push(center + Complex::from_polar(r, from));
    for k in 0..n {
        out.push(center + Complex::from_polar(rv, from + (k as f64 + 0.5) * step));
    }
    out.push(center + Complex::from_polar(r, to));
    out
}

/// Circumscribing polygon of an annular sector. The concave inner arc is
/// replaced by the chord between the inner corners.
pub fn wrap_annular_sector(s: &AnnularSector, tol: f64) -> Result<ConvexPolygon> {
    if !(tol > 0.0) {
        return Err(invalid("wrapping tolerance must be positive"));
    }
    if s.is_full_phase() {
        return Err(invalid("phase interval spans 2π; wrap it as a disk"));
    }
    let (lo, hi) = (s.phase.lo(), s.phase.hi());
    let mut pts = arc_chain(Complex::new(0.0, 0.0), s.amp.hi(), lo, hi, tol);
    pts.push(Complex::from_polar(s.amp.lo(), lo));
    pts.push(Complex::from_polar(s.amp.lo(), hi));
    Ok(ConvexPolygon::hull(&pts, tol))
}

/// Regular polygon circumscribing a disk with outward overshoot ≤ `tol`.
pub fn wrap_disk(d: &DiskInterval, tol: f64) -> Result<ConvexPolygon> {
    if !(tol > 0.0) {
        return Err(invalid("wrapping tolerance must be positive"));
    }
    if d.radius == 0.0 {
        return Ok(ConvexPolygon::point(d.center));
    }
    let half = (d.radius / (d.radius + tol)).acos().max(0.5 * MIN_ARC_STEP);
    let n = ((std::f64::consts::PI / half).ceil() as usize).max(3);
    let rv = d.radius / (std::f64::consts::PI / n as f64).cos();
    let pts: Vec<Complex> = (0..n).map(|k| d.center + Complex::from_polar(rv, TAU * k as f64 / n as f64)).collect();
    Ok(ConvexPolygon::hull(&pts, tol))
}
