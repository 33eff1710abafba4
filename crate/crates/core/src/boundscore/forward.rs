use serde::{Deserialize, Serialize};

use crate::arraymodel::{dot2, ArraySpec, BeampatternCurve};
use crate::error::{consistency, invalid, Result};
use crate::Complex;

use super::ErrorSpec;

/// One concrete draw of every error: `g_c`, `Φ_c`, position offsets, tilt
/// and (optionally) the coupling matrix `C[m][c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub amp: Vec<f64>,
    pub phase: Vec<f64>,
    pub offset: Vec<[f64; 2]>,
    pub tilt: Vec<f64>,
    pub coupling: Option<Vec<Vec<Complex>>>,
}

impl Realization {
    pub fn nominal(m: usize) -> Self {
        Self { amp: vec![1.0; m], phase: vec![0.0; m], offset: vec![[0.0; 2]; m], tilt: vec![0.0; m], coupling: None }
    }

    pub fn len(&self) -> usize {
        self.amp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amp.is_empty()
    }

    /// `ε_c = g_c e^{jΦ_c}`.
    pub fn eps(&self, c: usize) -> Complex {
        Complex::from_polar(self.amp[c], self.phase[c])
    }

    fn coupling_at(&self, m: usize, c: usize) -> Complex {
        match &self.coupling {
            Some(cm) => cm[m][c],
            None if m == c => Complex::new(1.0, 0.0),
            None => Complex::new(0.0, 0.0),
        }
    }

    /// Own response of element `c` before coupling and apodization:
    /// `g_c d(θ − ψ_c + t_c) e^{j(k(θ)·(r_c + δr_c) + Φ_c)}`.
    pub fn element_response(&self, array: &ArraySpec, c: usize, theta: f64) -> Complex {
        let e = &array.elements[c];
        let k = array.k(theta);
        let r = [e.position[0] + self.offset[c][0], e.position[1] + self.offset[c][1]];
        let d = array.element_directivity(c, theta - e.orientation + self.tilt[c]);
        Complex::from_polar(self.amp[c] * d, dot2(k, r) + self.phase[c])
    }

    /// `A_c = Σ_m C_mc w_m e^{−jk_s·r_m}` for every element.
    pub fn structure(&self, array: &ArraySpec) -> Vec<Complex> {
        let ks = array.k_steer();
        let steer: Vec<Complex> = array
            .elements
            .iter()
            .map(|e| Complex::from_polar(e.weight, -dot2(ks, e.position)))
            .collect();
        (0..array.len())
            .map(|c| match &self.coupling {
                None => steer[c],
                Some(_) => (0..array.len()).map(|m| self.coupling_at(m, c) * steer[m]).sum(),
            })
            .collect()
    }

    /// `B(θ) = Σ_c E_c A_c`.
    pub fn response(&self, array: &ArraySpec, theta: f64) -> Complex {
        self.response_with(array, &self.structure(array), theta)
    }

    pub(crate) fn response_with(&self, array: &ArraySpec, structure: &[Complex], theta: f64) -> Complex {
        (0..array.len()).map(|c| structure[c] * self.element_response(array, c, theta)).sum()
    }

    /// The same pattern summed channel by channel:
    /// `Σ_m w_m e^{−jk_s·r_m} Σ_c C_mc E_c`.
    pub fn response_by_channel(&self, array: &ArraySpec, theta: f64) -> Complex {
        let ks = array.k_steer();
        let own: Vec<Complex> = (0..array.len()).map(|c| self.element_response(array, c, theta)).collect();
        array
            .elements
            .iter()
            .enumerate()
            .map(|(m, e)| {
                let channel: Complex = (0..array.len()).map(|c| self.coupling_at(m, c) * own[c]).sum();
                Complex::from_polar(e.weight, -dot2(ks, e.position)) * channel
            })
            .sum()
    }

    pub fn beampattern(&self, array: &ArraySpec, thetas: &[f64]) -> BeampatternCurve {
        let s = self.structure(array);
        BeampatternCurve { angles: thetas.to_vec(), values: thetas.iter().map(|&t| self.response_with(array, &s, t)).collect() }
    }

    /// Checks every value against its interval with absolute slack `eps`.
    pub fn check_within(&self, errors: &ErrorSpec, eps: f64) -> Result<()> {
        let m = errors.len();
        if self.len() != m || self.phase.len() != m || self.offset.len() != m || self.tilt.len() != m {
            return Err(invalid("realization and error spec sizes differ"));
        }
        let check = |name: &str, c: usize, x: f64, iv: &crate::ivalgeom::RealInterval| {
            if iv.contains_within(x, eps) {
                Ok(())
            } else {
                Err(consistency(format!("{name} of element {c} = {x} lies outside {iv}")))
            }
        };
        for c in 0..m {
            check("amplitude", c, self.amp[c], &errors.amp[c])?;
            check("phase", c, self.phase[c], &errors.phase[c])?;
            check("x offset", c, self.offset[c][0], &errors.pos_x[c])?;
            check("y offset", c, self.offset[c][1], &errors.pos_y[c])?;
            check("tilt", c, self.tilt[c], &errors.tilt[c])?;
        }
        if let Some(cm) = &self.coupling {
            for (i, row) in cm.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    if i == c {
                        if (v - Complex::new(1.0, 0.0)).norm() > eps {
                            return Err(consistency(format!("self coupling C[{i}][{i}] = {v} is not 1")));
                        }
                    } else {
                        let cap = errors.gamma.powi(i.abs_diff(c) as i32);
                        if v.norm() > cap + eps {
                            return Err(consistency(format!("|C[{i}][{c}]| = {} exceeds {cap}", v.norm())));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
