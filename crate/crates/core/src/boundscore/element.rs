use std::f64::consts::PI;

use crate::arraymodel::{directivity_interval, dot2, ArraySpec};
use crate::error::{invalid, Result};
use crate::ivalgeom::{arc_chain, wrap_annular_sector, wrap_disk, AnnularSector, ConvexPolygon, DiskInterval, RealInterval};
use crate::Complex;

use super::ErrorSpec;

/// `E_c = a·e^{jφ}` with `a` and `φ` ranging over intervals. The amplitude
/// may dip below zero when an element sidelobe of negative sign is reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementInterval {
    pub amp: RealInterval,
    pub phase: RealInterval,
}

/// `A_c`: apodization, steering and coupling seen by element `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructureInterval {
    pub disk: DiskInterval,
}

impl ElementInterval {
    /// Non-negative-amplitude pieces covering the set. A negative amplitude
    /// is the same phasor turned by π.
    pub fn sectors(&self) -> Vec<AnnularSector> {
        let (lo, hi) = (self.amp.lo(), self.amp.hi());
        let flip = self.phase.shift(PI);
        let piece = |a: f64, b: f64, ph: RealInterval| AnnularSector {
            amp: RealInterval::new(a, b).expect("ordered"),
            phase: ph,
        };
        if lo >= 0.0 {
            vec![piece(lo, hi, self.phase)]
        } else if hi <= 0.0 {
            vec![piece(-hi, -lo, flip)]
        } else {
            vec![piece(0.0, hi, self.phase), piece(0.0, -lo, flip)]
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.amp.is_degenerate() && self.phase.is_degenerate()
    }

    pub fn nominal_point(&self) -> Complex {
        Complex::from_polar(self.amp.mid(), self.phase.mid())
    }

    pub fn contains(&self, z: Complex, eps: f64) -> bool {
        self.sectors().iter().any(|s| s.contains(z, eps))
    }
}

/// Amplitude `g^I·d(θ − ψ_c + tilt^I)` and phase
/// `k(θ)·r_c + k_x·dx^I + k_y·dy^I + Φ^I`, the phase recentred into (−π, π].
pub fn element_interval(c: usize, theta: f64, array: &ArraySpec, errors: &ErrorSpec) -> ElementInterval {
    let e = &array.elements[c];
    let alpha = errors.tilt[c].shift(theta - e.orientation);
    let d = directivity_interval(alpha, array.aperture_scale * e.diameter, array.wavelength, &array.taper);
    let amp = errors.amp[c] * d;
    let k = array.k(theta);
    let phase = RealInterval::point(k[0]) * errors.pos_x[c]
        + RealInterval::point(k[1]) * errors.pos_y[c]
        + errors.phase[c]
        + RealInterval::point(dot2(k, e.position));
    let mid = phase.mid();
    let phase = phase.shift(wrap_pi(mid) - mid);
    ElementInterval { amp, phase }
}

pub(crate) fn wrap_pi(x: f64) -> f64 {
    crate::arraymodel::wrap_angle(x)
}

/// Disk centred at `w_c e^{−j k_s·r_c}` with radius `Σ_{m≠c} γ^{|m−c|} |w_m|`.
pub fn structure_interval(c: usize, array: &ArraySpec, errors: &ErrorSpec) -> StructureInterval {
    let e = &array.elements[c];
    let center = Complex::from_polar(e.weight, -dot2(array.k_steer(), e.position));
    StructureInterval { disk: DiskInterval { center, radius: coupling_radius(c, array, errors.gamma) } }
}

pub(crate) fn coupling_radius(c: usize, array: &ArraySpec, gamma: f64) -> f64 {
    if gamma == 0.0 {
        return 0.0;
    }
    array
        .elements
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != c)
        .map(|(m, el)| gamma.powi(m.abs_diff(c) as i32) * el.weight.abs())
        .sum()
}

/// Circumscribed polygon of `{E·A : E ∈ e, A ∈ a}`.
///
/// For each non-negative sector piece the convex hull of the product is
/// bounded by the outer arc at radius `r̄(|c| + R)` and four corner disks
/// `r_i e^{jφ_k}·c` of radius `r_i R`; each is circumscribed at `tol`.
pub fn product_interval(e: &ElementInterval, a: &StructureInterval, tol: f64) -> Result<ConvexPolygon> {
    if !(tol > 0.0) {
        return Err(invalid("product tolerance must be positive"));
    }
    let sectors = e.sectors();
    if sectors.len() == 1 {
        return sector_product(&sectors[0], &a.disk, tol);
    }
    let mut pts = Vec::new();
    for s in &sectors {
        pts.extend_from_slice(sector_product(s, &a.disk, tol)?.vertices());
    }
    Ok(ConvexPolygon::hull(&pts, tol))
}

fn sector_product(s: &AnnularSector, d: &DiskInterval, tol: f64) -> Result<ConvexPolygon> {
    let c = d.center;
    let (cn, r) = (c.norm(), d.radius);
    let (r0, r1) = (s.amp.lo(), s.amp.hi());
    if r1 == 0.0 || cn + r == 0.0 {
        return Ok(ConvexPolygon::point(Complex::new(0.0, 0.0)));
    }
    if s.is_full_phase() {
        return wrap_disk(&DiskInterval { center: Complex::new(0.0, 0.0), radius: r1 * (cn + r) }, tol);
    }
    if r == 0.0 {
        let p = wrap_annular_sector(s, tol / cn)?;
        return Ok(p.mul_complex(c).with_tol(if p.len() == 1 { 0.0 } else { tol }));
    }
    let rot = c.arg();
    let (lo, hi) = (s.phase.lo() + rot, s.phase.hi() + rot);
    let mut pts = arc_chain(Complex::new(0.0, 0.0), r1 * (cn + r), lo, hi, tol);
    for &ri in &[r0, r1] {
        for &ph in &[s.phase.lo(), s.phase.hi()] {
            let z = Complex::from_polar(ri, ph);
            let corner = wrap_disk(&DiskInterval { center: z * c, radius: ri * r }, tol)?;
            pts.extend_from_slice(corner.vertices());
        }
    }
    Ok(ConvexPolygon::hull(&pts, tol))
}

/// Smallest disk about `a_mid e^{jφ_mid}` covering an element interval; the
/// farthest points of a sector from that centre are its corners.
pub fn element_disk(e: &ElementInterval) -> DiskInterval {
    let sectors = e.sectors();
    if sectors.len() > 1 || sectors[0].is_full_phase() {
        let r = e.amp.lo().abs().max(e.amp.hi().abs());
        return DiskInterval { center: Complex::new(0.0, 0.0), radius: r };
    }
    let s = sectors[0];
    let z0 = Complex::from_polar(s.amp.mid(), s.phase.mid());
    let radius = [s.amp.lo(), s.amp.hi()]
        .iter()
        .flat_map(|&a| [s.phase.lo(), s.phase.hi()].map(|p| (Complex::from_polar(a, p) - z0).norm()))
        .fold(0.0, f64::max);
    DiskInterval { center: z0, radius }
}
