//! Backtracking: recovering the error realization behind a bound.
//!
//! The extreme point of `B^I(θ_ref)` is split into one point per summand
//! polygon, the points are moved onto the exact (unwrapped) product sets,
//! and each is factored into element errors and a coupling column. The
//! realization reproduces the bound through the forward model.

pub mod exact;
mod recover;
mod sum;

pub use recover::{backtrack_coupling, coupling_column, recover_element, CouplingSplit, ElementErrors, FEASIBILITY_EPS};
pub use sum::{backtrack_sum, SumSplit};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arraymodel::{ArraySpec, BeampatternCurve};
use crate::boundscore::{
    beampattern_summands, element_interval, structure_interval, summand_tol, ErrorSpec, Realization,
};
use crate::error::{consistency, invalid, Error, Result};
use crate::Complex;
use exact::{ascend, descend, ExactSet, Factored};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" => Ok(Self::Upper),
            "lower" => Ok(Self::Lower),
            _ => Err(invalid(format!("bound must be upper or lower, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktrackOptions {
    /// Cumulative representation tolerance of the polygons, dB.
    pub tol_db: f64,
    /// Position in the feasible band when the phase split is ambiguous
    /// (0 = low edge, 1 = high edge).
    pub split: f64,
}

impl Default for BacktrackOptions {
    fn default() -> Self {
        Self { tol_db: -100.0, split: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ambiguity {
    /// The summand's face in the extreme direction was an edge.
    pub vertex_tie: bool,
    /// The phase could be shared between `Φ` and position in many ways.
    pub phase_split: bool,
}

impl Ambiguity {
    pub fn any(&self) -> bool {
        self.vertex_tie || self.phase_split
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktrackResult {
    pub theta_ref: f64,
    pub bound_kind: BoundKind,
    /// Contributing points of the summand polygons; they sum to the extreme
    /// point of the polygon `B^I`.
    pub z: Vec<Complex>,
    /// The same points moved onto the exact product sets.
    pub z_exact: Vec<Complex>,
    /// `ε_c = g_c e^{jΦ_c}`.
    pub eps: Vec<Complex>,
    pub pos_offsets: Vec<[f64; 2]>,
    pub tilt: Vec<f64>,
    /// `C[m][c]`.
    pub coupling: Vec<Vec<Complex>>,
    /// `|B(θ_ref)|²` of the recovered realization.
    pub attained_power: f64,
    /// Power of the polygon extreme point.
    pub bound_power: f64,
    /// Outward representation error of the polygon, amplitude.
    pub polygon_tol: f64,
    pub ambiguity: Vec<Ambiguity>,
    pub realization: Realization,
}

impl BacktrackResult {
    /// `10 log10(attained / bound)`.
    pub fn attainment_db(&self) -> f64 {
        10.0 * (self.attained_power / self.bound_power).log10()
    }
}

/// Errors for the uncoupled path: `E_c = z_c / A_c` with `A_c` nominal.
pub fn recover_errors(
    z: &[Complex],
    array: &ArraySpec,
    errors: &ErrorSpec,
    theta: f64,
    split: f64,
) -> Result<Vec<ElementErrors>> {
    if errors.has_coupling() {
        return Err(invalid("recover_errors handles the uncoupled case only"));
    }
    z.iter()
        .enumerate()
        .map(|(c, &zc)| {
            let a = structure_interval(c, array, errors).disk.center;
            recover_element(c, zc / a, theta, array, errors, split)
        })
        .collect()
}

/// Recovers the realization attaining the chosen bound at `theta`.
pub fn backtrack(
    array: &ArraySpec,
    errors: &ErrorSpec,
    theta: f64,
    kind: BoundKind,
    opts: &BacktrackOptions,
) -> Result<BacktrackResult> {
    let m = array.len();
    errors.validate(m)?;
    if !(0.0..=1.0).contains(&opts.split) {
        return Err(invalid("split must lie in [0, 1]"));
    }
    let polys = beampattern_summands(theta, array, errors, summand_tol(opts.tol_db, m))?;
    let polygon_tol: f64 = polys.iter().map(|p| p.tol()).sum();
    let split = backtrack_sum(&polys, kind)?;

    let sets: Vec<ExactSet> = (0..m)
        .map(|c| ExactSet { element: element_interval(c, theta, array, errors), structure: structure_interval(c, array, errors) })
        .collect();
    let pts: Vec<Factored> = match kind {
        BoundKind::Upper => ascend(&sets, split.direction),
        BoundKind::Lower => descend(&sets, &split.z),
    };

    let mut coupling = vec![vec![Complex::new(0.0, 0.0); m]; m];
    let mut elems = Vec::with_capacity(m);
    for (c, (set, f)) in sets.iter().zip(&pts).enumerate() {
        let (e_val, column) = if set.structure.disk.radius == 0.0 {
            (f.z / set.structure.disk.center, coupling_column(set.structure.disk.center, c, array, errors).0)
        } else if set.element.amp.lo() >= 0.0 {
            let s = backtrack_coupling(f.z, &set.element, &set.structure, array, errors, c)?;
            (s.e, s.column)
        } else {
            // sign-changing element amplitude: keep the factorization found
            // on the exact set
            (f.e, coupling_column(f.a, c, array, errors).0)
        };
        for (mi, v) in column.into_iter().enumerate() {
            coupling[mi][c] = v;
        }
        elems.push(recover_element(c, e_val, theta, array, errors, opts.split)?);
    }

    let realization = Realization {
        amp: elems.iter().map(|e| e.amp).collect(),
        phase: elems.iter().map(|e| e.phase).collect(),
        offset: elems.iter().map(|e| e.offset).collect(),
        tilt: elems.iter().map(|e| e.tilt).collect(),
        coupling: errors.has_coupling().then(|| coupling.clone()),
    };
    realization.check_within(errors, FEASIBILITY_EPS)?;
    let attained = realization.response(array, theta);
    let exact_sum: Complex = pts.iter().map(|f| f.z).sum();
    let scale = pts.iter().map(|f| f.z.norm()).sum::<f64>().max(f64::MIN_POSITIVE);
    if (attained - exact_sum).norm() > 1e-9 * scale {
        return Err(consistency(format!(
            "recovered realization misses the backtracked sum by {:e}",
            (attained - exact_sum).norm()
        )));
    }
    Ok(BacktrackResult {
        theta_ref: theta,
        bound_kind: kind,
        z: split.z,
        z_exact: pts.iter().map(|f| f.z).collect(),
        eps: (0..m).map(|c| realization.eps(c)).collect(),
        pos_offsets: realization.offset.clone(),
        tilt: realization.tilt.clone(),
        coupling,
        attained_power: attained.norm_sqr(),
        bound_power: split.target.norm_sqr(),
        polygon_tol,
        ambiguity: split
            .ambiguous
            .iter()
            .zip(&elems)
            .map(|(&v, e)| Ambiguity { vertex_tie: v, phase_split: e.ambiguous })
            .collect(),
        realization,
    })
}

/// Backtracks several reference angles in parallel.
pub fn backtrack_many(
    array: &ArraySpec,
    errors: &ErrorSpec,
    thetas: &[f64],
    kind: BoundKind,
    opts: &BacktrackOptions,
) -> Vec<Result<BacktrackResult>> {
    thetas.par_iter().map(|&t| backtrack(array, errors, t, kind, opts)).collect()
}

/// Beampattern of the recovered realization over `thetas`.
pub fn reconstruct_beampattern(result: &BacktrackResult, array: &ArraySpec, thetas: &[f64]) -> BeampatternCurve {
    result.realization.beampattern(array, thetas)
}
