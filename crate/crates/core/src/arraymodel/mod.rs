//! Array geometry, element directivity, apodization and nominal patterns.
//!
//! Arrays lie in the x-y plane with broadside along +y. Angles are radians
//! here; the harness converts from degrees at the boundary.

mod directivity;
mod window;

pub use directivity::{directivity, directivity_interval, jinc, wrap_angle, Taper};
pub use window::chebyshev_weights;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::Complex;

/// Default sound speed (m/s) and frequency (Hz).
pub const SOUND_SPEED: f64 = 1500.0;
pub const FREQUENCY: f64 = 20_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    /// Position `[x, y]` in meters.
    pub position: [f64; 2],
    /// Normal-to-surface angle ψ.
    pub orientation: f64,
    /// Aperture diameter in meters.
    pub diameter: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub elements: Vec<ElementSpec>,
    pub wavelength: f64,
    pub steering: f64,
    pub taper: Taper,
    /// Multiplier on the directivity argument; 1 uses the diameter as given.
    pub aperture_scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeampatternCurve {
    pub angles: Vec<f64>,
    pub values: Vec<Complex>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub angles: Vec<f64>,
    pub power: Vec<f64>,
}

impl BeampatternCurve {
    pub fn power(&self) -> PowerCurve {
        PowerCurve { angles: self.angles.clone(), power: self.values.iter().map(|b| b.norm_sqr()).collect() }
    }
}

impl ArraySpec {
    /// Builds a spec, renormalizing weights to unit sum.
    pub fn new(mut elements: Vec<ElementSpec>, wavelength: f64, steering: f64, taper: Taper) -> Result<Self> {
        if elements.is_empty() {
            return Err(invalid("array has no elements"));
        }
        if !(wavelength > 0.0) || !wavelength.is_finite() {
            return Err(invalid(format!("wavelength {wavelength} must be positive")));
        }
        if elements.iter().any(|e| !(e.diameter >= 0.0)) {
            return Err(invalid("element diameters must be non-negative"));
        }
        if !(taper.end >= taper.start) || taper.start < 0.0 {
            return Err(invalid("taper must satisfy 0 ≤ start ≤ end"));
        }
        let total: f64 = elements.iter().map(|e| e.weight).sum();
        if !total.is_finite() || total.abs() < 1e-300 {
            return Err(invalid("element weights sum to zero"));
        }
        for e in &mut elements {
            e.weight /= total;
        }
        Ok(Self { elements, wavelength, steering, taper, aperture_scale: 1.0 })
    }

    pub fn with_aperture_scale(mut self, scale: f64) -> Self {
        self.aperture_scale = scale;
        self
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.elements.iter().map(|e| e.weight).collect()
    }

    pub fn k(&self, theta: f64) -> [f64; 2] {
        wavevector(theta, self.wavelength)
    }

    pub fn k_steer(&self) -> [f64; 2] {
        self.k(self.steering)
    }

    /// Directivity of element `m` at element-to-wavefield angle `alpha`.
    pub fn element_directivity(&self, m: usize, alpha: f64) -> f64 {
        let e = &self.elements[m];
        directivity(alpha, self.aperture_scale * e.diameter, self.wavelength, &self.taper)
    }

    /// Sensitivity `Σ |w|²`.
    pub fn sensitivity(&self) -> f64 {
        self.elements.iter().map(|e| e.weight * e.weight).sum()
    }
}

pub fn wavevector(theta: f64, wavelength: f64) -> [f64; 2] {
    let k = 2.0 * PI / wavelength;
    [k * theta.sin(), k * theta.cos()]
}

#[inline]
pub(crate) fn dot2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

/// Uniform linear array along x, centred on the origin, facing +y.
pub fn linear_elements(weights: &[f64], pitch: f64, diameter: f64) -> Vec<ElementSpec> {
    let m = weights.len();
    let half = 0.5 * (m as f64 - 1.0);
    weights
        .iter()
        .enumerate()
        .map(|(i, &w)| ElementSpec {
            position: [(i as f64 - half) * pitch, 0.0],
            orientation: 0.0,
            diameter,
            weight: w,
        })
        .collect()
}

/// Elements on a circular arc bulging towards +y, chord pitch `pitch`,
/// centre element at the origin, orientations normal to the arc.
pub fn arc_elements(weights: &[f64], pitch: f64, radius: f64, diameter: f64) -> Result<Vec<ElementSpec>> {
    if !(radius > 0.0) || pitch > 2.0 * radius {
        return Err(invalid(format!("arc radius {radius} incompatible with pitch {pitch}")));
    }
    let step = 2.0 * (pitch / (2.0 * radius)).asin();
    let half = 0.5 * (weights.len() as f64 - 1.0);
    Ok(weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            let b = (i as f64 - half) * step;
            ElementSpec {
                position: [radius * b.sin(), radius * b.cos() - radius],
                orientation: b,
                diameter,
                weight: w,
            }
        })
        .collect())
}

/// Grid from `start` to `stop` inclusive (degrees in, radians out).
pub fn angle_grid_deg(start: f64, step: f64, stop: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(stop >= start) {
        return Err(invalid(format!("bad angle grid {start}:{step}:{stop}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n).map(|i| (start + i as f64 * step).to_radians()).collect())
}

/// `Σ w_m d(θ − ψ_m) e^{j(k(θ) − k_s)·r_m}`.
pub fn nominal_response(array: &ArraySpec, theta: f64) -> Complex {
    let k = array.k(theta);
    let ks = array.k_steer();
    let dk = [k[0] - ks[0], k[1] - ks[1]];
    array
        .elements
        .iter()
        .enumerate()
        .map(|(m, e)| {
            let d = array.element_directivity(m, theta - e.orientation);
            Complex::from_polar(e.weight * d, dot2(dk, e.position))
        })
        .sum()
}

pub fn nominal_beampattern(array: &ArraySpec, thetas: &[f64]) -> BeampatternCurve {
    let values = thetas.par_iter().map(|&t| nominal_response(array, t)).collect();
    BeampatternCurve { angles: thetas.to_vec(), values }
}

/// Variance of a uniform error on `[-δ, δ]`.
pub fn uniform_variance(delta: f64) -> f64 {
    delta * delta / 3.0
}

/// Element-averaged uniform variance for per-element half-widths.
pub fn mean_uniform_variance(deltas: &[f64]) -> f64 {
    if deltas.is_empty() {
        return 0.0;
    }
    deltas.iter().map(|&d| uniform_variance(d)).sum::<f64>() / deltas.len() as f64
}

/// Expected power under small random amplitude/phase errors:
/// `|B|² e^{−σφ²} + T_se (σg² + σφ²)`.
pub fn expected_power(array: &ArraySpec, sigma_g: f64, sigma_phi: f64, thetas: &[f64]) -> Result<PowerCurve> {
    if !(sigma_g >= 0.0 && sigma_phi >= 0.0) {
        return Err(invalid("standard deviations must be non-negative"));
    }
    let (vg, vp) = (sigma_g * sigma_g, sigma_phi * sigma_phi);
    let floor = array.sensitivity() * (vg + vp);
    let nominal = nominal_beampattern(array, thetas);
    let power = nominal.values.iter().map(|b| b.norm_sqr() * (-vp).exp() + floor).collect();
    Ok(PowerCurve { angles: thetas.to_vec(), power })
}
