use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde::{Deserialize, Serialize};

use crate::arraymodel::{expected_power, mean_uniform_variance, nominal_beampattern, PowerCurve};
use crate::backtrack::{backtrack, reconstruct_beampattern, Ambiguity, BacktrackOptions, BacktrackResult, BoundKind};
use crate::boundscore::{approx_upper_bound, power_bounds, psll, BoundsResult};
use crate::error::{Error, Result};

use super::config::{Apodization, Geometry, RunConfig};
use super::mc::{monte_carlo_check, McReport};

/// Power in dB; values below −200 dB are clamped.
pub fn power_db(p: f64) -> f64 {
    10.0 * p.max(1e-20).log10()
}

fn deg(rad: f64) -> f64 {
    (rad.to_degrees() * 1e9).round() / 1e9
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Io(std::io::Error::other(e)))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Writes the resolved configuration next to the outputs.
pub fn write_resolved(cfg: &RunConfig, out: &Path) -> Result<()> {
    ensure_dir(out)?;
    write_json(&out.join("config.resolved.json"), &cfg.normalized()?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BoundsRow {
    theta_deg: f64,
    p_nominal_db: f64,
    p_lower_db: f64,
    p_upper_db: f64,
    p_expected_db: Option<f64>,
    p_approx_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsSummary {
    pub n_angles: usize,
    pub psll_nominal_db: Option<f64>,
    pub psll_upper_db: Option<f64>,
    pub psll_approx_db: Option<f64>,
    pub tol_db_requested: f64,
    pub tol_db_achieved: f64,
    pub seed: u64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone)]
pub struct BoundsRun {
    pub bounds: BoundsResult,
    pub nominal: PowerCurve,
    pub expected: Option<PowerCurve>,
    pub approx: Option<PowerCurve>,
    pub summary: BoundsSummary,
}

/// Bounds over the configured grid, with `bounds.csv` and `summary.json`
/// written to `out` when given.
pub fn run_bounds(cfg: &RunConfig, out: Option<&Path>) -> Result<BoundsRun> {
    let start = Instant::now();
    let r = cfg.resolve()?;
    let bounds = power_bounds(&r.array, &r.errors, &r.grid, cfg.run.tol_db, false)?;
    let nominal = nominal_beampattern(&r.array, &r.grid).power();
    let (expected, approx) = if cfg.run.extra_columns {
        let dg: Vec<f64> = r.errors.amp.iter().map(|a| a.max_deviation(1.0)).collect();
        let dp: Vec<f64> = r.errors.phase.iter().map(|p| p.max_deviation(0.0)).collect();
        let e = expected_power(&r.array, mean_uniform_variance(&dg).sqrt(), mean_uniform_variance(&dp).sqrt(), &r.grid)?;
        (Some(e), Some(approx_upper_bound(&r.array, &r.errors, &r.grid)))
    } else {
        (None, None)
    };
    let ok = |x: Result<f64>| x.ok();
    let summary = BoundsSummary {
        n_angles: r.grid.len(),
        psll_nominal_db: ok(psll(&nominal.power, &nominal.power)),
        psll_upper_db: ok(psll(&bounds.p_upper, &nominal.power)),
        psll_approx_db: approx.as_ref().and_then(|a| ok(psll(&a.power, &nominal.power))),
        tol_db_requested: cfg.run.tol_db,
        tol_db_achieved: bounds.tol_db,
        seed: cfg.run.seed,
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    if let Some(dir) = out {
        write_resolved(cfg, dir)?;
        let mut w = csv_writer(&dir.join("bounds.csv"))?;
        for i in 0..r.grid.len() {
            w.serialize(BoundsRow {
                theta_deg: deg(r.grid[i]),
                p_nominal_db: power_db(nominal.power[i]),
                p_lower_db: power_db(bounds.p_lower[i]),
                p_upper_db: power_db(bounds.p_upper[i]),
                p_expected_db: expected.as_ref().map(|e| power_db(e.power[i])),
                p_approx_db: approx.as_ref().map(|a| power_db(a.power[i])),
            })
            .map_err(csv_err)?;
        }
        w.flush()?;
        write_json(&dir.join("summary.json"), &summary)?;
        info!("bounds written to {}", dir.display());
    }
    Ok(BoundsRun { bounds, nominal, expected, approx, summary })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ElementRow {
    elem: usize,
    amp: f64,
    phase_deg: f64,
    dx_lambda: f64,
    dy_lambda: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CurveRow {
    theta_deg: f64,
    p_reconstructed_db: f64,
    p_lower_db: f64,
    p_upper_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktrackSummary {
    pub theta_ref_deg: f64,
    pub bound: BoundKind,
    pub bound_db: f64,
    pub attained_db: f64,
    pub attainment_db: f64,
    pub tilt_deg: Vec<f64>,
    pub ambiguity: Vec<Ambiguity>,
}

#[derive(Debug, Clone)]
pub struct BacktrackRun {
    pub result: BacktrackResult,
    pub bounds: BoundsResult,
    pub reconstructed: PowerCurve,
    pub summary: BacktrackSummary,
}

/// Directory name used for one backtrack run.
pub fn backtrack_dir(out: &Path, theta_deg: f64, kind: BoundKind) -> PathBuf {
    let k = match kind {
        BoundKind::Upper => "upper",
        BoundKind::Lower => "lower",
    };
    out.join(format!("backtrack_{k}_{theta_deg}deg"))
}

/// Backtracks the chosen bound at `theta_deg` and reconstructs the
/// realization's beampattern over the grid.
pub fn run_backtrack(cfg: &RunConfig, theta_deg: f64, kind: BoundKind, out: Option<&Path>) -> Result<BacktrackRun> {
    let r = cfg.resolve()?;
    let result = backtrack(&r.array, &r.errors, theta_deg.to_radians(), kind, &BacktrackOptions::default())?;
    let bounds = power_bounds(&r.array, &r.errors, &r.grid, cfg.run.tol_db, false)?;
    let reconstructed = reconstruct_beampattern(&result, &r.array, &r.grid).power();
    let summary = BacktrackSummary {
        theta_ref_deg: theta_deg,
        bound: kind,
        bound_db: power_db(result.bound_power),
        attained_db: power_db(result.attained_power),
        attainment_db: result.attainment_db(),
        tilt_deg: result.tilt.iter().map(|t| t.to_degrees()).collect(),
        ambiguity: result.ambiguity.clone(),
    };
    if let Some(base) = out {
        write_resolved(cfg, base)?;
        let dir = backtrack_dir(base, theta_deg, kind);
        ensure_dir(&dir)?;
        let lambda = r.array.wavelength;
        let mut w = csv_writer(&dir.join("elements.csv"))?;
        for (c, e) in result.eps.iter().enumerate() {
            w.serialize(ElementRow {
                elem: c,
                amp: e.norm(),
                phase_deg: e.arg().to_degrees(),
                dx_lambda: result.pos_offsets[c][0] / lambda,
                dy_lambda: result.pos_offsets[c][1] / lambda,
            })
            .map_err(csv_err)?;
        }
        w.flush()?;
        for (name, f) in [
            ("coupling_mag.csv", (|z: crate::Complex| z.norm()) as fn(crate::Complex) -> f64),
            ("coupling_phase_deg.csv", |z: crate::Complex| z.arg().to_degrees()),
        ] {
            let mut w = csv_writer(&dir.join(name))?;
            let m = result.coupling.len();
            let mut header = vec!["m".to_string()];
            header.extend((0..m).map(|c| format!("c{c}")));
            w.write_record(&header).map_err(csv_err)?;
            for (i, row) in result.coupling.iter().enumerate() {
                let mut rec = vec![i.to_string()];
                rec.extend(row.iter().map(|&z| f(z).to_string()));
                w.write_record(&rec).map_err(csv_err)?;
            }
            w.flush()?;
        }
        let mut w = csv_writer(&dir.join("curve.csv"))?;
        for i in 0..r.grid.len() {
            w.serialize(CurveRow {
                theta_deg: deg(r.grid[i]),
                p_reconstructed_db: power_db(reconstructed.power[i]),
                p_lower_db: power_db(bounds.p_lower[i]),
                p_upper_db: power_db(bounds.p_upper[i]),
            })
            .map_err(csv_err)?;
        }
        w.flush()?;
        write_json(&dir.join("summary.json"), &summary)?;
        write_json(&dir.join("realization.json"), &result.realization)?;
    }
    Ok(BacktrackRun { result, bounds, reconstructed, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sll_db: f64,
    pub nominal_psll_db: f64,
    pub exact_psll_db: f64,
    pub approx_psll_db: f64,
}

/// Worst-case, approximate and nominal PSLL of a Chebyshev linear array
/// for each design sidelobe level.
pub fn run_sweep(cfg: &RunConfig, sll_db: &[f64], out: Option<&Path>) -> Result<Vec<SweepRow>> {
    if !matches!(cfg.array.geometry, Geometry::Linear { .. }) || !matches!(cfg.array.apodization, Apodization::Chebyshev { .. }) {
        return Err(Error::Config("sweep needs a linear array with Chebyshev apodization".into()));
    }
    let mut rows = Vec::with_capacity(sll_db.len());
    for &sll in sll_db {
        let mut c = cfg.clone();
        c.array.apodization = Apodization::Chebyshev { sll_db: sll };
        let r = c.resolve()?;
        let b = power_bounds(&r.array, &r.errors, &r.grid, cfg.run.tol_db, false)?;
        let nominal = nominal_beampattern(&r.array, &r.grid).power();
        let approx = approx_upper_bound(&r.array, &r.errors, &r.grid);
        rows.push(SweepRow {
            sll_db: sll,
            nominal_psll_db: psll(&nominal.power, &nominal.power)?,
            exact_psll_db: psll(&b.p_upper, &nominal.power)?,
            approx_psll_db: psll(&approx.power, &nominal.power)?,
        });
        info!("sweep {sll} dB done");
    }
    if let Some(dir) = out {
        write_resolved(cfg, dir)?;
        let mut w = csv_writer(&dir.join("sweep.csv"))?;
        for row in &rows {
            w.serialize(row).map_err(csv_err)?;
        }
        w.flush()?;
    }
    Ok(rows)
}

/// Monte Carlo containment check against freshly computed bounds.
pub fn run_mc(cfg: &RunConfig, n: usize, seed: u64, out: Option<&Path>) -> Result<McReport> {
    let r = cfg.resolve()?;
    let bounds = power_bounds(&r.array, &r.errors, &r.grid, cfg.run.tol_db, false)?;
    let hist = cfg.run.histogram_deg.unwrap_or(cfg.array.steering_deg).to_radians();
    let report = monte_carlo_check(&r.array, &r.errors, &bounds, n, seed, Some(hist))?;
    if let Some(dir) = out {
        write_resolved(cfg, dir)?;
        write_json(&dir.join("mc_report.json"), &report)?;
    }
    Ok(report)
}
