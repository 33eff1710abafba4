//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Exits 0 so that `cargo test` reports the suite; set
//! `BEAMBOUND_STRICT=1` to turn any FAIL into a non-zero exit.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use beambound::arraymodel::{angle_grid_deg, linear_elements, nominal_beampattern, ArraySpec, Taper};
use beambound::backtrack::{backtrack, BacktrackOptions, BacktrackResult, BoundKind};
use beambound::boundscore::{
    approx_upper_bound, beampattern_interval, naive_beampattern_interval, power_bounds, product_interval,
    ElementInterval, ErrorSpec, Realization, StructureInterval,
};
use beambound::harness::{array_a_config, array_b_config, corner_oracle, monte_carlo_check, run_sweep, RunConfig};
use beambound::ivalgeom::{wrap_annular_sector, wrap_disk, AnnularSector, ConvexPolygon, DiskInterval, RealInterval};
use beambound::Complex;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, what: &str, detail: String) {
        if !ok {
            self.failed += 1;
        }
        println!("{} {id:<3} {what}: {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn db(p: f64) -> f64 {
    10.0 * p.log10()
}

fn inclusivity(rep: &mut Report) {
    let t0 = Instant::now();
    let cfg = array_a_config();
    let r = cfg.resolve().unwrap();
    let bounds = power_bounds(&r.array, &r.errors, &r.grid, -60.0, false).unwrap();
    let mc = monte_carlo_check(&r.array, &r.errors, &bounds, 1000, 2024, None).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    rep.line(
        "1",
        mc.violations == 0 && secs < 30.0,
        "inclusivity, array A, 1000 draws",
        format!(
            "{} violations over {} angles, max P/P_upper {:.4} dB, {:.2} s",
            mc.violations,
            r.grid.len(),
            mc.max_overshoot_db.unwrap_or(f64::NAN),
            secs
        ),
    );
}

fn in_phase_box(res: &BacktrackResult, half_deg: &[f64]) -> bool {
    res.realization.phase.iter().zip(half_deg).all(|(p, h)| p.abs() <= h.to_radians() + 1e-9)
}

fn attain_a(rep: &mut Report) {
    let r = array_a_config().resolve().unwrap();
    let half = [6.0, 4.5, 4.0, 4.5, 6.0];
    for (id, kind) in [("2a", BoundKind::Upper), ("2b", BoundKind::Lower)] {
        match backtrack(&r.array, &r.errors, 50f64.to_radians(), kind, &BacktrackOptions::default()) {
            Ok(res) => {
                let feasible = res.realization.check_within(&r.errors, 1e-9).is_ok();
                let extreme_amp = res.realization.amp.iter().all(|g| (g - 0.95).abs() < 1e-9 || (g - 1.05).abs() < 1e-9);
                let phases = in_phase_box(&res, &half);
                let att = res.attainment_db();
                rep.line(
                    id,
                    att.abs() <= 0.01 && feasible && extreme_amp && phases,
                    &format!("backtrack array A 50 deg {kind:?}"),
                    format!(
                        "attained {:.6} dB vs bound {:.6} dB (diff {:.2e} dB), amplitudes {:?}, phases deg {:?}",
                        db(res.attained_power),
                        db(res.bound_power),
                        att,
                        res.realization.amp.iter().map(|g| (g * 1e6).round() / 1e6).collect::<Vec<_>>(),
                        res.realization.phase.iter().map(|p| (p.to_degrees() * 1e3).round() / 1e3).collect::<Vec<_>>()
                    ),
                );
            }
            Err(e) => rep.line(id, false, &format!("backtrack array A 50 deg {kind:?}"), e.to_string()),
        }
    }
}

fn attain_b(rep: &mut Report) {
    let r = array_b_config().resolve().unwrap();
    let theta = 13.6f64.to_radians();
    match backtrack(&r.array, &r.errors, theta, BoundKind::Upper, &BacktrackOptions::default()) {
        Ok(res) => {
            let m = res.coupling.len();
            let mut caps = true;
            for i in 0..m {
                for c in 0..m {
                    let v = res.coupling[i][c];
                    caps &= if i == c { v == Complex::new(1.0, 0.0) } else { v.norm() <= 0.05f64.powi(i.abs_diff(c) as i32) + 1e-12 };
                }
            }
            let feasible = res.realization.check_within(&r.errors, 1e-9).is_ok();
            let forward = res.realization.response_by_channel(&r.array, theta).norm_sqr();
            let fwd_db = db(forward / res.bound_power);
            rep.line(
                "3",
                res.attainment_db().abs() <= 0.01 && fwd_db.abs() <= 0.01 && caps && feasible,
                "coupled backtrack array B 13.6 deg upper",
                format!(
                    "bound {:.4} dB, attained diff {:.2e} dB, channel-order forward model diff {:.2e} dB, coupling caps {}, errors feasible {}",
                    db(res.bound_power),
                    res.attainment_db(),
                    fwd_db,
                    caps,
                    feasible
                ),
            );
        }
        Err(e) => rep.line("3", false, "coupled backtrack array B 13.6 deg upper", e.to_string()),
    }
}

fn ula3() -> ArraySpec {
    let lambda = 0.075;
    ArraySpec::new(linear_elements(&[1.0; 3], 0.5 * lambda, 0.0), lambda, 0.0, Taper::default()).unwrap()
}

fn oracle(rep: &mut Report) {
    let a = ula3();
    let grid = angle_grid_deg(-90.0, 10.0, 90.0).unwrap();

    let e = ErrorSpec::uniform(3, 0.05, 0.0, 0.0);
    let b = power_bounds(&a, &e, &grid, -60.0, false).unwrap();
    let tau = 10f64.powf(b.tol_db / 20.0);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for (i, &t) in grid.iter().enumerate() {
        let p = corner_oracle(&a, &e, t, 2).unwrap();
        let gap = b.p_upper[i].sqrt() - p.sqrt();
        ok &= (-1e-12..=tau).contains(&gap);
        worst = worst.max(gap);
    }
    rep.line(
        "4a",
        ok,
        "corner oracle, amplitude only",
        format!("{} angles, largest amplitude gap {:.3e} (tol {:.1e})", grid.len(), worst, tau),
    );

    let e = ErrorSpec::uniform(3, 0.05, 5f64.to_radians(), 0.0);
    let b = power_bounds(&a, &e, &grid, -80.0, false).unwrap();
    let approx = approx_upper_bound(&a, &e, &grid);
    let mut worst_db: f64 = 0.0;
    let mut ok = true;
    for (i, &t) in grid.iter().enumerate() {
        let coarse = corner_oracle(&a, &e, t, 11).unwrap();
        let fine = corner_oracle(&a, &e, t, 1001).unwrap();
        let gap = db(b.p_upper[i] / fine);
        ok &= coarse <= fine * (1.0 + 1e-15) && fine <= b.p_upper[i] * (1.0 + 1e-12) && gap <= 0.05;
        ok &= b.p_upper[i] <= approx.power[i] * (1.0 + 1e-12);
        worst_db = worst_db.max(gap);
    }
    rep.line(
        "4b",
        ok,
        "oracle sandwich, amplitude and phase",
        format!("{} angles, oracle <= upper <= approx everywhere: {ok}, largest gap at density 1000: {worst_db:.4} dB", grid.len()),
    );
}

fn sweep(rep: &mut Report) {
    let slls: Vec<f64> = (2..=8).map(|k| -10.0 * k as f64).collect();
    let mut case3: RunConfig = array_b_config();
    case3.errors.amp_pct = beambound::harness::config::Spread::Scalar(1.0);
    case3.errors.phase_deg = beambound::harness::config::Spread::Scalar(1.0);
    case3.errors.gamma_pct = 0.0;
    let case1 = array_b_config();
    let t0 = Instant::now();
    let r3 = run_sweep(&case3, &slls, None).unwrap();
    let r1 = run_sweep(&case1, &slls, None).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let show = |rows: &[beambound::harness::SweepRow]| {
        rows.iter()
            .map(|r| format!("{:.0}:{:.2}/{:.2}", r.sll_db, r.exact_psll_db, r.approx_psll_db))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let floor3 = r3.last().unwrap().exact_psll_db;
    let floor1 = r1.last().unwrap().exact_psll_db;
    rep.line(
        "5a",
        (floor3 + 33.9).abs() <= 1.0,
        "Case 3 worst-case PSLL floor",
        format!("{floor3:.3} dB at -80 dB nominal (target -33.9 +/- 1); sll:exact/approx {}", show(&r3)),
    );
    rep.line(
        "5b",
        (floor1 + 14.0).abs() <= 1.0,
        "Case 1 worst-case PSLL floor",
        format!("{floor1:.3} dB at -80 dB nominal (target -14.0 +/- 1); sll:exact/approx {}", show(&r1)),
    );
    for (id, name, rows) in [("5c", "Case 3", &r3), ("5d", "Case 1", &r1)] {
        let worst = rows.iter().map(|r| r.exact_psll_db - r.approx_psll_db).fold(f64::NEG_INFINITY, f64::max);
        rep.line(
            id,
            rows.iter().all(|r| r.approx_psll_db >= r.exact_psll_db),
            &format!("{name} approximate PSLL >= exact PSLL"),
            format!("max(exact - approx) = {worst:+.3} dB over {} levels ({secs:.1} s for both sweeps)", rows.len()),
        );
    }
}

fn collapse(rep: &mut Report) {
    let mut worst: f64 = 0.0;
    for cfg in [array_a_config(), array_b_config()] {
        let r = cfg.resolve().unwrap();
        let zero = ErrorSpec::zero(r.array.len());
        let b = power_bounds(&r.array, &zero, &r.grid, -60.0, false).unwrap();
        let nom = nominal_beampattern(&r.array, &r.grid).power();
        let peak = nom.power.iter().cloned().fold(0.0, f64::max);
        for i in 0..nom.power.len() {
            worst = worst.max((b.p_upper[i] - nom.power[i]).abs() / peak);
            worst = worst.max((b.p_lower[i] - nom.power[i]).abs() / peak);
        }
    }
    rep.line("6a", worst < 1e-6, "zero-width errors collapse to nominal", format!("max |P - P_nom| / peak = {:.2} dB", db(worst.max(1e-300))));

    let r = array_b_config().resolve().unwrap();
    let mut e0 = r.errors.clone();
    e0.gamma = 0.0;
    let mut e1 = e0.clone();
    e1.gamma = 1e-12;
    let b0 = power_bounds(&r.array, &e0, &r.grid, -60.0, false).unwrap();
    let b1 = power_bounds(&r.array, &e1, &r.grid, -60.0, false).unwrap();
    let peak = b0.p_upper.iter().cloned().fold(0.0, f64::max);
    let mut diff: f64 = 0.0;
    for i in 0..r.grid.len() {
        diff = diff.max((b0.p_upper[i] - b1.p_upper[i]).abs() / peak).max((b0.p_lower[i] - b1.p_lower[i]).abs() / peak);
    }
    let mut real = Realization::nominal(r.array.len());
    real.amp = (0..r.array.len()).map(|c| 1.0 + 0.01 * (c % 3) as f64).collect();
    let uncoupled = real.beampattern(&r.array, &r.grid);
    let m = r.array.len();
    real.coupling = Some((0..m).map(|i| (0..m).map(|c| Complex::new(if i == c { 1.0 } else { 0.0 }, 0.0)).collect()).collect());
    let coupled = real.beampattern(&r.array, &r.grid);
    let fwd = uncoupled.values.iter().zip(&coupled.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    rep.line(
        "6b",
        diff < 1e-6 && fwd < 1e-12,
        "gamma = 0 coupled path equals uncoupled path",
        format!("bounds max rel diff {diff:.2e}, forward model max diff {fwd:.2e}"),
    );
}

fn random_polygon(rng: &mut ChaCha8Rng) -> ConvexPolygon {
    let n = rng.gen_range(3..20);
    let c = Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let pts: Vec<Complex> = (0..n).map(|_| c + Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    ConvexPolygon::hull(&pts, 0.0)
}

fn geometry(rep: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (p, q) = (random_polygon(&mut rng), random_polygon(&mut rng));
        let s = p.minkowski_sum(&q);
        for k in 0..360 {
            let u = Complex::from_polar(1.0, (k as f64).to_radians());
            let (a, b) = (s.support(u), p.support(u) + q.support(u));
            worst = worst.max((a - b).abs() / b.abs().max(1.0));
        }
    }
    rep.line("7a", worst <= 1e-10, "Minkowski support additivity", format!("200 pairs x 360 directions, max rel err {worst:.2e}"));

    let mut misses = 0;
    let mut shapes = 0;
    for _ in 0..20 {
        let r0 = rng.gen_range(0.0..1.0);
        let sector = AnnularSector::new(
            RealInterval::new(r0, r0 + rng.gen_range(0.0..0.5)).unwrap(),
            RealInterval::symmetric(rng.gen_range(-3.0..3.0), rng.gen_range(0.0..1.5)),
        )
        .unwrap();
        let disk = DiskInterval::new(Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)), rng.gen_range(0.0..0.3)).unwrap();
        let tol = 1e-4;
        let ps = wrap_annular_sector(&sector, tol).unwrap();
        let pd = wrap_disk(&disk, tol).unwrap();
        let e = ElementInterval { amp: sector.amp, phase: sector.phase };
        let pp = product_interval(&e, &StructureInterval { disk }, tol).unwrap();
        shapes += 3;
        for _ in 0..10_000 {
            let z = Complex::from_polar(
                rng.gen_range(sector.amp.lo()..=sector.amp.hi()),
                rng.gen_range(sector.phase.lo()..=sector.phase.hi()),
            );
            let w = disk.center + Complex::from_polar(disk.radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            misses += usize::from(!ps.contains(z, 1e-12)) + usize::from(!pd.contains(w, 1e-12)) + usize::from(!pp.contains(z * w, 1e-12));
        }
    }
    rep.line("7b", misses == 0, "wrapping inclusivity", format!("{shapes} shapes x 10^4 samples, {misses} outside"));

    let r = array_b_config().resolve().unwrap();
    let mut strict = 0;
    let mut contained = true;
    let ts = [-60.0, -20.0, 0.0, 13.6, 45.0];
    for t in ts {
        let t = f64::to_radians(t);
        let sw = beampattern_interval(t, &r.array, &r.errors, 1e-7).unwrap();
        let nv = naive_beampattern_interval(t, &r.array, &r.errors, 1e-7).unwrap();
        contained &= sw.vertices().iter().all(|v| nv.contains(*v, 1e-9));
        if nv.abs_interval().hi() > sw.abs_interval().hi() * (1.0 + 1e-6) {
            strict += 1;
        }
    }
    rep.line(
        "7c",
        contained && strict == ts.len(),
        "dependence problem: swapped sum strictly inside naive sum",
        format!("contained at all angles: {contained}, strictly larger naive upper bound at {strict}/{} angles", ts.len()),
    );
}

fn main() {
    // ignore libtest flags such as --nocapture
    let mut rep = Report { failed: 0 };
    let t0 = Instant::now();
    inclusivity(&mut rep);
    attain_a(&mut rep);
    attain_b(&mut rep);
    oracle(&mut rep);
    sweep(&mut rep);
    collapse(&mut rep);
    geometry(&mut rep);
    println!("{} failed, {:.1} s total", rep.failed, t0.elapsed().as_secs_f64());
    if rep.failed > 0 && std::env::var_os("BEAMBOUND_STRICT").is_some() {
        std::process::exit(1);
    }
}
