//! Run configuration (JSON). Angles are in degrees and lengths in
//! wavelengths; [`RunConfig::resolve`] converts to radians and meters.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::arraymodel::{
    angle_grid_deg, arc_elements, chebyshev_weights, linear_elements, ArraySpec, ElementSpec, Taper, FREQUENCY,
    SOUND_SPEED,
};
use crate::boundscore::ErrorSpec;
use crate::error::{Error, Result};
use crate::ivalgeom::RealInterval;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Geometry {
    /// Uniform linear array along x.
    Linear { pitch: f64 },
    /// Elements on a circular arc of the given radius, facing outward.
    Arc { pitch: f64, radius: f64 },
    /// Explicit positions `[x, y]` and optional orientations (degrees).
    Explicit {
        positions: Vec<[f64; 2]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        orientations_deg: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Apodization {
    Uniform,
    Chebyshev { sll_db: f64 },
    Explicit { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrayConfig {
    pub geometry: Geometry,
    pub m: usize,
    /// Element diameter in wavelengths; 0 is omnidirectional.
    #[serde(default)]
    pub diameter: f64,
    pub apodization: Apodization,
    #[serde(default)]
    pub steering_deg: f64,
    /// Wavelength in meters. Mutually exclusive with frequency/sound speed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelength: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sound_speed: Option<f64>,
    /// Start and end of the rear taper, degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taper_deg: Option<[f64; 2]>,
}

/// A per-element error width: one value for all elements, a list of
/// symmetric half-widths, or a list of explicit `[lo, hi]` intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spread {
    Scalar(f64),
    List(Vec<f64>),
    Intervals(Vec<[f64; 2]>),
}

impl Default for Spread {
    fn default() -> Self {
        Spread::Scalar(0.0)
    }
}

impl Spread {
    /// Intervals around `nominal`, each value multiplied by `unit`.
    fn intervals(&self, name: &str, m: usize, nominal: f64, unit: f64) -> Result<Vec<RealInterval>> {
        let sym = |h: f64| {
            if h < 0.0 || !h.is_finite() {
                Err(config_err(format!("errors.{name}: half-width {h} must be finite and non-negative")))
            } else {
                Ok(RealInterval::symmetric(nominal, h * unit))
            }
        };
        let check_len = |n: usize| {
            if n == m {
                Ok(())
            } else {
                Err(config_err(format!("errors.{name}: expected {m} entries, got {n}")))
            }
        };
        match self {
            Spread::Scalar(h) => Ok(vec![sym(*h)?; m]),
            Spread::List(v) => {
                check_len(v.len())?;
                v.iter().map(|&h| sym(h)).collect()
            }
            Spread::Intervals(v) => {
                check_len(v.len())?;
                v.iter()
                    .map(|&[lo, hi]| {
                        RealInterval::new(nominal + lo * unit, nominal + hi * unit)
                            .map_err(|_| config_err(format!("errors.{name}: interval [{lo}, {hi}] is not ordered")))
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErrorsConfig {
    /// Amplitude error, percent.
    #[serde(default)]
    pub amp_pct: Spread,
    #[serde(default)]
    pub phase_deg: Spread,
    /// Position errors, wavelengths.
    #[serde(default)]
    pub pos_x: Spread,
    #[serde(default)]
    pub pos_y: Spread,
    #[serde(default)]
    pub tilt_deg: Spread,
    #[serde(default)]
    pub gamma_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDeg {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

impl Default for GridDeg {
    fn default() -> Self {
        Self { start: -90.0, step: 0.1, stop: 90.0 }
    }
}

impl std::str::FromStr for GridDeg {
    type Err = Error;

    /// Parses `start:step:stop`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || config_err(format!("grid must be start:step:stop in degrees, got {s:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let v: Vec<f64> = parts.iter().map(|p| p.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        Ok(Self { start: v[0], step: v[1], stop: v[2] })
    }
}

fn default_tol_db() -> f64 {
    -60.0
}

fn default_n_mc() -> usize {
    1000
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    #[serde(default)]
    pub grid: GridDeg,
    #[serde(default = "default_tol_db")]
    pub tol_db: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_n_mc")]
    pub n_monte_carlo: usize,
    /// Angle of the Monte Carlo power histogram; defaults to the steering
    /// angle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub histogram_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub backtrack_deg: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep_sll_db: Vec<f64>,
    /// Emit expected-power and approximate-bound columns.
    #[serde(default = "yes")]
    pub extra_columns: bool,
}

impl Default for RunBlock {
    fn default() -> Self {
        Self {
            grid: GridDeg::default(),
            tol_db: default_tol_db(),
            seed: 0,
            n_monte_carlo: default_n_mc(),
            histogram_deg: None,
            backtrack_deg: Vec::new(),
            sweep_sll_db: Vec::new(),
            extra_columns: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub array: ArrayConfig,
    #[serde(default)]
    pub errors: ErrorsConfig,
    #[serde(default)]
    pub run: RunBlock,
}

/// A configuration in internal units.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub array: ArraySpec,
    pub errors: ErrorSpec,
    pub grid: Vec<f64>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| config_err(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn wavelength(&self) -> Result<f64> {
        let a = &self.array;
        let lambda = match (a.wavelength, a.frequency, a.sound_speed) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(config_err("array: give either wavelength or frequency/sound_speed, not both"))
            }
            (Some(l), None, None) => l,
            (None, f, c) => c.unwrap_or(SOUND_SPEED) / f.unwrap_or(FREQUENCY),
        };
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(config_err(format!("array: wavelength {lambda} must be positive")));
        }
        Ok(lambda)
    }

    /// Copy with the wavelength written out explicitly, suitable for
    /// re-running.
    pub fn normalized(&self) -> Result<Self> {
        let mut c = self.clone();
        c.array.wavelength = Some(self.wavelength()?);
        c.array.frequency = None;
        c.array.sound_speed = None;
        c.array.taper_deg = Some(c.array.taper_deg.unwrap_or([80.0, 100.0]));
        Ok(c)
    }

    pub fn weights(&self, m: usize) -> Result<Vec<f64>> {
        match &self.array.apodization {
            Apodization::Uniform => Ok(vec![1.0; m]),
            Apodization::Chebyshev { sll_db } => {
                chebyshev_weights(m, *sll_db).map_err(|e| config_err(format!("array.apodization: {e}")))
            }
            Apodization::Explicit { weights } if weights.len() == m => Ok(weights.clone()),
            Apodization::Explicit { weights } => {
                Err(config_err(format!("array.apodization: expected {m} weights, got {}", weights.len())))
            }
        }
    }

    pub fn array_spec(&self) -> Result<ArraySpec> {
        let a = &self.array;
        let m = a.m;
        if m == 0 {
            return Err(config_err("array.m must be at least 1"));
        }
        let lambda = self.wavelength()?;
        let w = self.weights(m)?;
        let d = a.diameter * lambda;
        let elements = match &a.geometry {
            Geometry::Linear { pitch } => linear_elements(&w, pitch * lambda, d),
            Geometry::Arc { pitch, radius } => {
                arc_elements(&w, pitch * lambda, radius * lambda, d).map_err(|e| config_err(format!("array.geometry: {e}")))?
            }
            Geometry::Explicit { positions, orientations_deg } => {
                if positions.len() != m {
                    return Err(config_err(format!("array.geometry: expected {m} positions, got {}", positions.len())));
                }
                let psi = match orientations_deg {
                    Some(o) if o.len() == m => o.iter().map(|x| x.to_radians()).collect(),
                    Some(o) => {
                        return Err(config_err(format!("array.geometry: expected {m} orientations, got {}", o.len())))
                    }
                    None => vec![0.0; m],
                };
                positions
                    .iter()
                    .zip(psi)
                    .zip(&w)
                    .map(|((p, o), &wt)| ElementSpec {
                        position: [p[0] * lambda, p[1] * lambda],
                        orientation: o,
                        diameter: d,
                        weight: wt,
                    })
                    .collect()
            }
        };
        let taper = match a.taper_deg {
            Some([s, e]) => Taper { start: s.to_radians(), end: e.to_radians() },
            None => Taper::default(),
        };
        ArraySpec::new(elements, lambda, a.steering_deg.to_radians(), taper).map_err(|e| config_err(format!("array: {e}")))
    }

    pub fn error_spec(&self) -> Result<ErrorSpec> {
        let m = self.array.m;
        let lambda = self.wavelength()?;
        let e = &self.errors;
        if !(0.0..100.0).contains(&e.gamma_pct) {
            return Err(config_err(format!("errors.gamma_pct {} must lie in [0, 100)", e.gamma_pct)));
        }
        let spec = ErrorSpec {
            amp: e.amp_pct.intervals("amp_pct", m, 1.0, 0.01)?,
            phase: e.phase_deg.intervals("phase_deg", m, 0.0, 1f64.to_radians())?,
            pos_x: e.pos_x.intervals("pos_x", m, 0.0, lambda)?,
            pos_y: e.pos_y.intervals("pos_y", m, 0.0, lambda)?,
            tilt: e.tilt_deg.intervals("tilt_deg", m, 0.0, 1f64.to_radians())?,
            gamma: e.gamma_pct / 100.0,
        };
        spec.validate(m).map_err(|err| config_err(format!("errors: {err}")))?;
        Ok(spec)
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        let g = self.run.grid;
        angle_grid_deg(g.start, g.step, g.stop).map_err(|e| config_err(format!("run.grid: {e}")))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        Ok(Resolved { array: self.array_spec()?, errors: self.error_spec()?, grid: self.grid()? })
    }
}

/// Table I.
pub fn array_a_config() -> RunConfig {
    RunConfig {
        array: ArrayConfig {
            geometry: Geometry::Arc { pitch: 0.5, radius: 8.0 / 3.0 },
            m: 5,
            diameter: 0.0,
            apodization: Apodization::Explicit { weights: vec![0.14, 0.23, 0.27, 0.23, 0.14] },
            steering_deg: 5.0,
            wavelength: None,
            frequency: None,
            sound_speed: None,
            taper_deg: None,
        },
        errors: ErrorsConfig {
            amp_pct: Spread::Scalar(5.0),
            phase_deg: Spread::List(vec![6.0, 4.5, 4.0, 4.5, 6.0]),
            ..Default::default()
        },
        run: RunBlock { backtrack_deg: vec![50.0], ..Default::default() },
    }
}

/// Table II.
pub fn array_b_config() -> RunConfig {
    RunConfig {
        array: ArrayConfig {
            geometry: Geometry::Linear { pitch: 0.5 },
            m: 31,
            diameter: 0.0,
            apodization: Apodization::Chebyshev { sll_db: -30.0 },
            steering_deg: -10.0,
            wavelength: None,
            frequency: None,
            sound_speed: None,
            taper_deg: None,
        },
        errors: ErrorsConfig {
            amp_pct: Spread::Scalar(5.0),
            phase_deg: Spread::Scalar(5.0),
            gamma_pct: 5.0,
            ..Default::default()
        },
        run: RunBlock {
            histogram_deg: Some(13.6),
            backtrack_deg: vec![13.6],
            sweep_sll_db: vec![-20.0, -30.0, -40.0, -50.0, -60.0, -70.0, -80.0],
            ..Default::default()
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_configs_resolve() {
        let a = array_a_config().resolve().unwrap();
        assert_eq!(a.array.len(), 5);
        assert!((a.array.wavelength - 0.075).abs() < 1e-15);
        assert!((a.errors.phase[0].hi() - 6f64.to_radians()).abs() < 1e-15);
        assert_eq!(a.grid.len(), 1801);
        let b = array_b_config().resolve().unwrap();
        assert_eq!(b.errors.gamma, 0.05);
        assert!((b.array.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let c = array_b_config().normalized().unwrap();
        let back = RunConfig::from_json(&c.to_json().unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn minimal_json_uses_defaults() {
        let c = RunConfig::from_json(
            r#"{"array": {"geometry": {"kind": "linear", "pitch": 0.5}, "m": 3, "apodization": {"kind": "uniform"}}}"#,
        )
        .unwrap();
        assert_eq!(c.run.tol_db, -60.0);
        assert_eq!(c.wavelength().unwrap(), 0.075);
        assert!(c.error_spec().unwrap().amp.iter().all(|x| x.is_degenerate()));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = RunConfig::from_json("{\n \"array\": {\n  \"m\": \"five\"\n }\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn wavelength_and_frequency_conflict() {
        let mut c = array_a_config();
        c.array.wavelength = Some(0.1);
        c.array.frequency = Some(10_000.0);
        assert!(matches!(c.wavelength(), Err(Error::Config(_))));
        c.array.frequency = None;
        assert_eq!(c.wavelength().unwrap(), 0.1);
    }

    #[test]
    fn per_element_lists_must_match_m() {
        let mut c = array_a_config();
        c.errors.phase_deg = Spread::List(vec![1.0, 2.0]);
        assert!(matches!(c.error_spec(), Err(Error::Config(_))));
        c.errors.phase_deg = Spread::Intervals(vec![[-1.0, 2.0]; 5]);
        let e = c.error_spec().unwrap();
        assert!((e.phase[0].lo() + 1f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn grid_parses() {
        let g: GridDeg = "-10:0.5:10".parse().unwrap();
        assert_eq!(g, GridDeg { start: -10.0, step: 0.5, stop: 10.0 });
        assert!("1:2".parse::<GridDeg>().is_err());
    }
}
