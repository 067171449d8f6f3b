//! Band functions, spectra as interval unions, pseudospectra and gaps.
//!
//! The spectrum of a periodic operator is `⋃_θ σ(f(θ))`. Sampling `θ` on a
//! uniform grid of `N` points and padding every band by `δ = L·π/N`, where
//! `L` bounds `|dλ_j/dθ|`, gives intervals that contain the true bands up to
//! eigensolver tolerance. Every computed endpoint is within `δ` of a true one.
//!
//! For a self-adjoint operator, `Λ_ε(A) = σ(A) + Δ_ε` with `Δ_ε` the closed
//! disk. Disks centred on a real interval union form a connected planar set
//! exactly when the ε-fattened real intervals are connected, so
//! connectedness is decided on the real line.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eig::{hermitian_eigenvalues, EIG_TOL};
use crate::error::{Error, Result};
use crate::operator::{OperatorKind, OperatorSpec};
use crate::symbols::symbol;

pub const DEFAULT_GRID: usize = 1024;

/// Intervals closer than this are merged.
pub const MERGE_TOL: f64 = 1e-12;

/// Sorted eigenvalue curves `λ_j(f_k(θ_i))` on `θ_i = −π + 2πi/N`, `i = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandTable {
    pub grid: Vec<f64>,
    /// `bands[j][i]` is the j-th smallest eigenvalue at `grid[i]`.
    pub bands: Vec<Vec<f64>>,
    /// Upper bound on `|dλ_j/dθ|`.
    pub lipschitz: f64,
    /// Extra uncertainty added to every band (a truncated Fourier tail).
    pub extra_uncertainty: f64,
}

impl BandTable {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Endpoint padding `δ = L·π/N` plus any extra uncertainty.
    pub fn padding(&self) -> f64 {
        self.lipschitz * PI / self.grid.len() as f64 + self.extra_uncertainty
    }

    /// Sampled `(min, max)` of band `j`, without padding.
    pub fn band_range(&self, j: usize) -> (f64, f64) {
        let band = &self.bands[j];
        let lo = band.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = band.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// Rows `(theta, band_index, lambda)`, band index 1-based.
    pub fn rows(&self) -> impl Iterator<Item = (f64, usize, f64)> + '_ {
        self.grid
            .iter()
            .enumerate()
            .flat_map(move |(i, &theta)| self.bands.iter().enumerate().map(move |(j, b)| (theta, j + 1, b[i])))
    }
}

/// `|d f/dθ|` bound for the symbol’s corner: `2a` for tridiagonal operators
/// (the factor 2 covers `p = 1`, where both corners share an entry) and
/// `2 Σ|k a_k|` in the general Laurent case.
pub fn band_lipschitz(spec: &OperatorSpec, shift: usize) -> f64 {
    match spec.kind() {
        OperatorKind::Schrodinger | OperatorKind::Jacobi => {
            let p = spec.period();
            2.0 * spec.couplings()[(shift + p - 1) % p]
        }
        OperatorKind::LaurentGeneral => {
            2.0 * spec.fourier().iter().map(|t| (t.k as f64 * t.coefficient).abs()).sum::<f64>()
        }
    }
}

pub fn theta_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| -PI + TAU * i as f64 / n as f64).collect()
}

/// Samples every band of the shifted symbol `f_k` on an `n`-point grid.
pub fn band_table(spec: &OperatorSpec, shift: usize, n: usize) -> Result<BandTable> {
    if n < 2 {
        return Err(Error::InvalidGrid(n));
    }
    let grid = theta_grid(n);
    let columns: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&theta| hermitian_eigenvalues(&symbol(spec, shift, theta)?).map(|e| e.values))
        .collect::<Result<_>>()?;
    let p = spec.period();
    let bands = (0..p).map(|j| columns.iter().map(|col| col[j]).collect()).collect();
    let extra_uncertainty = match spec.kind() {
        OperatorKind::LaurentGeneral => 2.0 * spec.tail_bound(),
        _ => 0.0,
    };
    Ok(BandTable { grid, bands, lipschitz: band_lipschitz(spec, shift), extra_uncertainty })
}

/// A closed real interval `[lo, hi]`, serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        if x < self.lo {
            self.lo - x
        } else if x > self.hi {
            x - self.hi
        } else {
            0.0
        }
    }
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval { lo, hi }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

/// A finite union of disjoint closed intervals with positive gaps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpectrum")]
pub struct RealSpectrum {
    intervals: Vec<Interval>,
    resolution_error: f64,
}

#[derive(Deserialize)]
struct RawSpectrum {
    intervals: Vec<Interval>,
    resolution_error: f64,
}

impl TryFrom<RawSpectrum> for RealSpectrum {
    type Error = Error;

    fn try_from(raw: RawSpectrum) -> Result<Self> {
        RealSpectrum::new(raw.intervals, raw.resolution_error)
    }
}

impl RealSpectrum {
    /// Sorts and merges intervals that overlap or touch within [`MERGE_TOL`].
    pub fn new(intervals: impl IntoIterator<Item = Interval>, resolution_error: f64) -> Result<Self> {
        let mut list: Vec<Interval> = intervals.into_iter().collect();
        if let Some(bad) = list.iter().find(|i| !(i.lo.is_finite() && i.hi.is_finite() && i.lo <= i.hi)) {
            return Err(Error::InvalidParameter(format!("invalid interval [{}, {}]", bad.lo, bad.hi)));
        }
        if !(resolution_error.is_finite() && resolution_error >= 0.0) {
            return Err(Error::InvalidParameter(format!("invalid resolution error {resolution_error}")));
        }
        list.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut merged: Vec<Interval> = Vec::with_capacity(list.len());
        for next in list {
            match merged.last_mut() {
                Some(last) if next.lo <= last.hi + MERGE_TOL => last.hi = last.hi.max(next.hi),
                _ => merged.push(next),
            }
        }
        Ok(RealSpectrum { intervals: merged, resolution_error })
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn resolution_error(&self) -> f64 {
        self.resolution_error
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn component_count(&self) -> usize {
        self.intervals.len()
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<Interval> {
        Some(Interval::new(self.intervals.first()?.lo, self.intervals.last()?.hi))
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::width).sum()
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        // first interval whose upper end is at or beyond x
        let idx = self.intervals.partition_point(|i| i.hi < x);
        let right = self.intervals.get(idx).map_or(f64::INFINITY, |i| i.distance_to(x));
        let left = idx.checked_sub(1).map_or(f64::INFINITY, |k| self.intervals[k].distance_to(x));
        left.min(right)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.distance_to(x) <= tol
    }

    /// All open gaps between consecutive components.
    pub fn gaps(&self) -> impl Iterator<Item = Gap> + '_ {
        self.intervals.windows(2).map(|w| Gap { left_hi: w[0].hi, right_lo: w[1].lo, width: w[1].lo - w[0].hi })
    }

    /// Width a gap must exceed to count: `2δ + 4·EIG_TOL`.
    pub fn gap_threshold(&self) -> f64 {
        2.0 * self.resolution_error + 4.0 * EIG_TOL
    }

    /// Whether `other` is contained in `self` (up to `tol`).
    pub fn covers(&self, other: &RealSpectrum, tol: f64) -> bool {
        other.intervals.iter().all(|o| self.intervals.iter().any(|s| s.lo <= o.lo + tol && o.hi <= s.hi + tol))
    }
}

/// Band images `[min − δ, max + δ]`, merged into a union of intervals.
pub fn spectrum_intervals(bt: &BandTable) -> RealSpectrum {
    let delta = bt.padding();
    let intervals = (0..bt.band_count()).map(|j| {
        let (lo, hi) = bt.band_range(j);
        Interval::new(lo - delta, hi + delta)
    });
    RealSpectrum::new(intervals, delta).expect("band ranges are finite")
}

/// Spectrum of `spec` from its shift-0 symbol on an `n`-point grid.
pub fn spectrum(spec: &OperatorSpec, n: usize) -> Result<RealSpectrum> {
    Ok(spectrum_intervals(&band_table(spec, 0, n)?))
}

/// The real trace of `σ + Δ_ε`: every interval fattened by `ε`, then merged.
pub fn pseudospectrum_intervals(s: &RealSpectrum, epsilon: f64) -> Result<RealSpectrum> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be finite and >= 0, got {epsilon}")));
    }
    RealSpectrum::new(s.intervals.iter().map(|i| Interval::new(i.lo - epsilon, i.hi + epsilon)), s.resolution_error)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub left_hi: f64,
    pub right_lo: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub connected: bool,
    /// Gaps wider than the significance threshold.
    pub gaps: Vec<Gap>,
    /// Half the widest significant gap: the smallest `ε` connecting `Λ_ε`.
    pub epsilon_star: f64,
}

pub fn gap_report(s: &RealSpectrum) -> GapReport {
    let threshold = s.gap_threshold();
    let gaps: Vec<Gap> = s.gaps().filter(|g| g.width > threshold).collect();
    let epsilon_star = gaps.iter().map(|g| g.width).fold(0.0, f64::max) / 2.0;
    GapReport { connected: gaps.is_empty(), gaps, epsilon_star }
}

/// `sup_{x∈A} dist(x, B)`. On each interval of `A` the distance to `B` is
/// piecewise linear, so the supremum sits at an endpoint or at the midpoint
/// of a gap of `B`.
fn directed_hausdorff(a: &RealSpectrum, b: &RealSpectrum) -> f64 {
    let mut worst = 0.0f64;
    for i in &a.intervals {
        worst = worst.max(b.distance_to(i.lo)).max(b.distance_to(i.hi));
        for g in b.gaps() {
            let mid = 0.5 * (g.left_hi + g.right_lo);
            if mid > i.lo && mid < i.hi {
                worst = worst.max(g.width / 2.0);
            }
        }
    }
    worst
}

/// Exact Hausdorff distance between two finite unions of closed intervals.
pub fn hausdorff_distance(s1: &RealSpectrum, s2: &RealSpectrum) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(directed_hausdorff(s1, s2).max(directed_hausdorff(s2, s1)))
}
