use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Dolph-Chebyshev taper with equiripple sidelobes at `sll_db` (negative)
/// relative to the mainlobe, normalized to unit sum.
///
/// Built by sampling the Chebyshev polynomial on the unit circle and taking
/// its DFT, with the half-sample shift for even lengths.
pub fn chebyshev_weights(m: usize, sll_db: f64) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(invalid("Chebyshev window needs at least two elements"));
    }
    if !(sll_db < 0.0) {
        return Err(invalid(format!("sidelobe level {sll_db} dB must be negative")));
    }
    let order = (m - 1) as f64;
    let r = 10f64.powf(-sll_db / 20.0);
    let beta = (r.acosh() / order).cosh();
    let mf = m as f64;
    let p: Vec<f64> = (0..m)
        .map(|k| {
            let x = beta * (PI * k as f64 / mf).cos();
            if x > 1.0 {
                (order * x.acosh()).cosh()
            } else if x < -1.0 {
                let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
                sign * (order * (-x).acosh()).cosh()
            } else {
                (order * x.acos()).cos()
            }
        })
        .collect();
    // real part of the DFT of p (times the half-sample shift when m is even)
    let shift = if m % 2 == 1 { 0.0 } else { PI / mf };
    let dft = |n: usize| -> f64 {
        p.iter()
            .enumerate()
            .map(|(k, &pk)| pk * (shift * k as f64 - 2.0 * PI * (n * k) as f64 / mf).cos())
            .sum()
    };
    let w: Vec<f64> = if m % 2 == 1 {
        let h = m.div_ceil(2);
        let half: Vec<f64> = (0..h).map(dft).collect();
        half[1..].iter().rev().chain(half.iter()).copied().collect()
    } else {
        let h = m / 2 + 1;
        let half: Vec<f64> = (0..h).map(dft).collect();
        half[1..].iter().rev().chain(half[1..].iter()).copied().collect()
    };
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / total).collect())
}
