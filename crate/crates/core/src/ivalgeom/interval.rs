use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Closed interval `[lo, hi]` of reals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct RealInterval {
    lo: f64,
    hi: f64,
}

impl RealInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(invalid(format!("non-finite interval [{lo}, {hi}]")));
        }
        if lo > hi {
            return Err(invalid(format!("interval lower end {lo} exceeds upper end {hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    /// `[mid - half, mid + half]`; `half` is taken by magnitude.
    pub fn symmetric(mid: f64, half: f64) -> Self {
        let half = half.abs();
        Self { lo: mid - half, hi: mid + half }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains_within(&self, x: f64, eps: f64) -> bool {
        self.lo - eps <= x && x <= self.hi + eps
    }

    pub fn encloses(&self, other: &RealInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Point at fraction `t` of the way from `lo` to `hi`.
    pub fn lerp(&self, t: f64) -> f64 {
        self.lo + t * (self.hi - self.lo)
    }

    pub fn scale(&self, k: f64) -> Self {
        let (a, b) = (k * self.lo, k * self.hi);
        Self { lo: a.min(b), hi: a.max(b) }
    }

    pub fn shift(&self, dx: f64) -> Self {
        Self { lo: self.lo + dx, hi: self.hi + dx }
    }

    pub fn hull(&self, other: &RealInterval) -> Self {
        Self { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi) }
    }

    /// Largest deviation from `nominal` over the interval.
    pub fn max_deviation(&self, nominal: f64) -> f64 {
        (self.hi - nominal).abs().max((nominal - self.lo).abs())
    }

    /// Exact square `{x^2 : x in self}`.
    pub fn sqr(&self) -> Self {
        unimodal_range(|x| x * x, Extremum::Min, 0.0, None, *self)
            .expect("square is unimodal on the whole line")
    }
}

impl TryFrom<[f64; 2]> for RealInterval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        RealInterval::new(v[0], v[1])
    }
}

impl From<RealInterval> for [f64; 2] {
    fn from(v: RealInterval) -> Self {
        [v.lo, v.hi]
    }
}

impl fmt::Display for RealInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for RealInterval {
    type Output = RealInterval;

    fn add(self, rhs: RealInterval) -> RealInterval {
        RealInterval { lo: self.lo + rhs.lo, hi: self.hi + rhs.hi }
    }
}

impl Neg for RealInterval {
    type Output = RealInterval;

    fn neg(self) -> RealInterval {
        RealInterval { lo: -self.hi, hi: -self.lo }
    }
}

impl Sub for RealInterval {
    type Output = RealInterval;

    fn sub(self, rhs: RealInterval) -> RealInterval {
        self + (-rhs)
    }
}

impl Mul for RealInterval {
    type Output = RealInterval;

    fn mul(self, rhs: RealInterval) -> RealInterval {
        let p = [self.lo * rhs.lo, self.lo * rhs.hi, self.hi * rhs.lo, self.hi * rhs.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        RealInterval { lo, hi }
    }
}

/// Which extremum a unimodal function has.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremum {
    Min,
    Max,
}

/// Exact range of a function that is monotone on either side of a single
/// extremum at `at`.
///
/// `domain`, when given, is the region on which the caller asserts
/// unimodality; `x` must lie inside it.
pub fn unimodal_range<F: Fn(f64) -> f64>(
    f: F,
    extremum: Extremum,
    at: f64,
    domain: Option<RealInterval>,
    x: RealInterval,
) -> Result<RealInterval> {
    if let Some(d) = domain {
        if !d.encloses(&x) {
            return Err(Error::Domain(format!("{x} leaves the unimodal region {d}")));
        }
    }
    let (flo, fhi) = (f(x.lo), f(x.hi));
    let (lo, hi) = if x.hi <= at {
        // Left branch: rises towards a maximum, falls towards a minimum.
        match extremum {
            Extremum::Max => (flo, fhi),
            Extremum::Min => (fhi, flo),
        }
    } else if x.lo >= at {
        match extremum {
            Extremum::Max => (fhi, flo),
            Extremum::Min => (flo, fhi),
        }
    } else {
        let fat = f(at);
        match extremum {
            Extremum::Max => (flo.min(fhi), fat),
            Extremum::Min => (fat, flo.max(fhi)),
        }
    };
    RealInterval::new(lo.min(hi), hi.max(lo))
}
