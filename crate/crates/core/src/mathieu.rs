//! Periodic approximants of the almost Mathieu operator
//! `(Ax)_j = x_{j−1} + x_{j+1} + λ cos(2πjα) x_j`.
//!
//! Each continued-fraction convergent `a/b` of `α` gives a periodic
//! Schrödinger operator with `v_j = λ cos(2πj·a/b)`. The phase is reduced as
//! `(j·a mod b)/b` before taking the cosine so that `v_{j+b} = v_j` holds
//! bit for bit.
//!
//! The minimal period of `cos(2πj·a/b)` with `gcd(a, b) = 1` is `b`, not
//! `b + 1` as is sometimes stated; [`ApproximantReport`] carries both and a
//! flag when they differ.
//!
//! ```
//! use borg_spectra::mathieu::convergents;
//!
//! let golden = (5f64.sqrt() - 1.0) / 2.0;
//! let list = convergents(golden, 5).unwrap();
//! let bs: Vec<i64> = list.convergents.iter().map(|c| c.b).collect();
//! assert_eq!(bs, [1, 2, 3, 5, 8]);
//! ```

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::borg::best_constant;
use crate::error::{Error, Result};
use crate::operator::OperatorSpec;
use crate::spectra::{
    band_table, gap_report, hausdorff_distance, pseudospectrum_intervals, spectrum_intervals, RealSpectrum,
};

/// Two values closer than this count as equal when searching for periods.
pub const PERIOD_TOL: f64 = 1e-12;

/// Past this denominator `1/b²` drops below double precision.
const MAX_DENOMINATOR: i64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergent {
    pub a: i64,
    pub b: i64,
    pub value: f64,
}

impl Convergent {
    /// `a/b` in lowest terms with `b > 0`.
    pub fn new(a: i64, b: i64) -> Result<Self> {
        if b <= 0 {
            return Err(Error::InvalidParameter(format!("denominator {b} must be positive")));
        }
        let g = gcd(a.unsigned_abs(), b.unsigned_abs()) as i64;
        let (a, b) = (a / g, b / g);
        Ok(Convergent { a, b, value: a as f64 / b as f64 })
    }
}

pub fn gcd(mut x: u64, mut y: u64) -> u64 {
    while y != 0 {
        (x, y) = (y, x % y);
    }
    x.max(1)
}

pub fn lcm(x: u64, y: u64) -> u64 {
    x / gcd(x, y) * y
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergentList {
    pub convergents: Vec<Convergent>,
    /// Fewer than the requested number were produced, either because `α`
    /// was reached exactly or because double precision ran out.
    pub truncated: bool,
}

/// Continued-fraction convergents of `alpha`, skipping a leading `0/1`.
pub fn convergents(alpha: f64, count: usize) -> Result<ConvergentList> {
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be finite, got {alpha}")));
    }
    if count == 0 {
        return Err(Error::InvalidParameter("count must be at least 1".into()));
    }
    let floor = alpha.floor();
    let mut x = alpha - floor;
    let (mut h_prev, mut h) = (1i64, floor as i64);
    let (mut k_prev, mut k) = (0i64, 1i64);
    let mut out = Vec::with_capacity(count);
    if h != 0 {
        out.push(Convergent::new(h, k)?);
    }
    while out.len() < count {
        if x == 0.0 || (alpha - h as f64 / k as f64).abs() <= f64::EPSILON * alpha.abs() {
            break;
        }
        let y = 1.0 / x;
        let q = y.floor();
        if q > MAX_DENOMINATOR as f64 {
            break;
        }
        x = y - q;
        let q = q as i64;
        let (h_next, k_next) = (q * h + h_prev, q * k + k_prev);
        if k_next > MAX_DENOMINATOR {
            break;
        }
        (h_prev, h, k_prev, k) = (h, h_next, k, k_next);
        let c = Convergent { a: h, b: k, value: h as f64 / k as f64 };
        // rounding in the remainders eventually breaks the approximation property
        if (alpha - c.value).abs() >= 1.0 / (k as f64 * k as f64) {
            break;
        }
        out.push(c);
    }
    let truncated = out.len() < count;
    Ok(ConvergentList { convergents: out, truncated })
}

/// `cos(2πj·a/b)` with the phase reduced modulo `b` in integers.
pub fn rational_cosine(c: &Convergent, j: i64) -> f64 {
    let r = (j as i128 * c.a as i128).rem_euclid(c.b as i128) as f64;
    (TAU * r / c.b as f64).cos()
}

/// Smallest `P ≤ candidate` with `f(j + P) = f(j)` for `j = 1..candidate`.
/// The candidate itself must be a period on `j = 1..2·candidate`.
pub fn minimal_period(f: impl Fn(i64) -> f64, candidate: usize) -> Result<usize> {
    if candidate == 0 {
        return Err(Error::InvalidCandidate(candidate));
    }
    let m = candidate as i64;
    let is_period = |p: i64, upto: i64| (1..=upto).all(|j| (f(j + p) - f(j)).abs() <= PERIOD_TOL);
    if !is_period(m, 2 * m) {
        return Err(Error::InvalidCandidate(candidate));
    }
    Ok((1..=m).find(|&p| is_period(p, m)).unwrap_or(m) as usize)
}

/// One period of `v_j = λ cos(2πj·a/b)` as a Schrödinger operator.
pub fn mathieu_potential(c: &Convergent, coupling: f64) -> Result<OperatorSpec> {
    if !coupling.is_finite() {
        return Err(Error::InvalidParameter(format!("coupling must be finite, got {coupling}")));
    }
    let value = |j: i64| coupling * rational_cosine(c, j);
    let p = minimal_period(value, c.b as usize)?;
    OperatorSpec::schrodinger((1..=p as i64).map(value).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximantReport {
    pub convergent: Convergent,
    /// Minimal period of the potential by brute force.
    pub period: usize,
    /// The period `b + 1` claimed in the literature.
    pub claimed_period: usize,
    pub period_discrepancy: bool,
    pub spectrum: RealSpectrum,
    pub gap_count: usize,
    pub epsilon_star: f64,
    /// `(ε, Λ_ε connected)` for each requested `ε`.
    pub connected_at: Vec<(f64, bool)>,
    /// `sup_{j ≤ W} |λ cos(2πjα) − v_j|` with `W = 10b`.
    pub potential_distance: f64,
    /// `2π|λ||α − a/b|·W`, which dominates `potential_distance`.
    pub potential_distance_bound: f64,
    pub window: usize,
    /// Some sampled gap was swallowed by the grid padding.
    pub coarse_grid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepStep {
    pub from_b: i64,
    pub to_b: i64,
    /// `d_H(σ(A_n), σ(A_{n+1}))` between the computed spectra.
    pub hausdorff: f64,
    /// `sup_j |v_j^n − v_j^{n+1}|` over `10·lcm` of the two periods.
    pub sup_norm: f64,
    /// Sum of the two grid paddings.
    pub tolerance: f64,
    /// `hausdorff ≤ sup_norm + tolerance`.
    pub dominated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub alpha: f64,
    pub coupling: f64,
    pub truncated: bool,
    pub reports: Vec<ApproximantReport>,
    pub steps: Vec<SweepStep>,
}

impl Sweep {
    /// `d_H` from approximant `i` to `i + 1`, if there is one.
    pub fn hausdorff_to_next(&self, i: usize) -> Option<f64> {
        self.steps.get(i).map(|s| s.hausdorff)
    }
}

fn approximant(alpha: f64, c: Convergent, coupling: f64, grid: usize, epsilons: &[f64]) -> Result<ApproximantReport> {
    let spec = mathieu_potential(&c, coupling)?;
    let bt = band_table(&spec, 0, grid)?;
    let spectrum = spectrum_intervals(&bt);
    let report = gap_report(&spectrum);
    let connected_at = epsilons
        .iter()
        .map(|&e| Ok((e, gap_report(&pseudospectrum_intervals(&spectrum, e)?).connected)))
        .collect::<Result<Vec<_>>>()?;

    let mut ranges: Vec<(f64, f64)> = (0..bt.band_count()).map(|j| bt.band_range(j)).collect();
    ranges.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut reach = f64::NEG_INFINITY;
    let mut coarse_grid = false;
    for (lo, hi) in ranges {
        let raw = lo - reach;
        if raw > 0.0 && raw - 2.0 * bt.padding() <= spectrum.gap_threshold() {
            coarse_grid = true;
        }
        reach = reach.max(hi);
    }

    let window = 10 * c.b as usize;
    let potential_distance = (1..=window as i64)
        .map(|j| (coupling * (TAU * j as f64 * alpha).cos() - spec.v_at(j)).abs())
        .fold(0.0, f64::max);
    Ok(ApproximantReport {
        convergent: c,
        period: spec.period(),
        claimed_period: c.b as usize + 1,
        period_discrepancy: spec.period() != c.b as usize + 1,
        gap_count: report.gaps.len(),
        epsilon_star: report.epsilon_star,
        connected_at,
        potential_distance,
        potential_distance_bound: TAU * coupling.abs() * (alpha - c.value).abs() * window as f64,
        window,
        coarse_grid,
        spectrum,
    })
}

/// Exact `sup_j |v_j − w_j|` for two periodic potentials, over `10·lcm` of
/// their periods.
pub fn periodic_sup_distance(x: &OperatorSpec, y: &OperatorSpec) -> f64 {
    let window = 10 * lcm(x.period() as u64, y.period() as u64) as i64;
    (1..=window).map(|j| (x.v_at(j) - y.v_at(j)).abs()).fold(0.0, f64::max)
}

/// Spectra of the approximants for the first `count` convergents of `alpha`,
/// with distances between consecutive ones.
pub fn approximant_sweep(alpha: f64, count: usize, grid: usize, coupling: f64, epsilons: &[f64]) -> Result<Sweep> {
    let list = convergents(alpha, count)?;
    approximant_sweep_for(alpha, &list.convergents, grid, coupling, epsilons)
        .map(|s| Sweep { truncated: list.truncated, ..s })
}

/// Like [`approximant_sweep`] for an explicit list of rationals.
pub fn approximant_sweep_for(
    alpha: f64,
    rationals: &[Convergent],
    grid: usize,
    coupling: f64,
    epsilons: &[f64],
) -> Result<Sweep> {
    if let Some(e) = epsilons.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
        return Err(Error::InvalidParameter(format!("epsilon must be finite and >= 0, got {e}")));
    }
    let reports =
        rationals.par_iter().map(|&c| approximant(alpha, c, coupling, grid, epsilons)).collect::<Result<Vec<_>>>()?;
    let steps = reports
        .windows(2)
        .map(|w| {
            let x = mathieu_potential(&w[0].convergent, coupling)?;
            let y = mathieu_potential(&w[1].convergent, coupling)?;
            let hausdorff = hausdorff_distance(&w[0].spectrum, &w[1].spectrum)?;
            let sup_norm = periodic_sup_distance(&x, &y);
            let tolerance = w[0].spectrum.resolution_error() + w[1].spectrum.resolution_error();
            Ok(SweepStep {
                from_b: w[0].convergent.b,
                to_b: w[1].convergent.b,
                hausdorff,
                sup_norm,
                tolerance,
                dominated: hausdorff <= sup_norm + tolerance,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Sweep { alpha, coupling, truncated: false, reports, steps })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitPointReport {
    /// `dist(picks[n], limit)`.
    pub distances: Vec<f64>,
    /// The last two picks differ by at most the tolerance.
    pub cauchy: bool,
    /// The last distance is below the combined resolution error plus tolerance.
    pub converged: bool,
}

/// Limits of spectral points are spectral points: for picks `λ_n ∈ σ(A_n)`
/// measures how close they come to the limit spectrum.
pub fn limit_point_check(
    spectra: &[RealSpectrum],
    limit: &RealSpectrum,
    picks: &[f64],
    tolerance: f64,
) -> Result<LimitPointReport> {
    if spectra.len() != picks.len() || picks.is_empty() {
        return Err(Error::InvalidParameter(format!("{} spectra for {} picks", spectra.len(), picks.len())));
    }
    if limit.is_empty() {
        return Err(Error::EmptySet);
    }
    for (index, (s, &value)) in spectra.iter().zip(picks).enumerate() {
        if !s.contains(value, 1e-12) {
            return Err(Error::InvalidPick { index, value });
        }
    }
    let distances: Vec<f64> = picks.iter().map(|&x| limit.distance_to(x)).collect();
    let cauchy = picks.windows(2).last().is_none_or(|w| (w[1] - w[0]).abs() <= tolerance);
    let last = spectra.last().expect("nonempty");
    let converged = distances[distances.len() - 1] <= limit.resolution_error() + last.resolution_error() + tolerance;
    Ok(LimitPointReport { distances, cauchy, converged })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PremiseReport {
    pub period_bound: usize,
    /// Every supplied period is at most `period_bound`.
    pub periods_bounded: bool,
    pub epsilon: f64,
    /// `2ε(p − 1)`: the deviation a connected `Λ_ε` forces on the limit.
    pub bound: f64,
    pub deviation: f64,
    /// `deviation ≤ bound`.
    pub compatible: bool,
    /// `deviation / (2(p − 1))`: below this `ε`, approximants with periods
    /// at most `p` cannot have a limit with connected `Λ_ε`.
    pub contradiction_threshold: f64,
}

/// If norm-convergent periodic approximants have periods at most `p` and the
/// limit has connected `Λ_ε`, the limit potential deviates from a constant
/// by at most `2ε(p − 1)`.
pub fn tenmartini_premise(
    periods: &[usize],
    period_bound: usize,
    epsilon: f64,
    deviation: f64,
) -> Result<PremiseReport> {
    if period_bound == 0 || periods.is_empty() {
        return Err(Error::InvalidParameter("need a positive period bound and at least one period".into()));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite() && deviation >= 0.0 && deviation.is_finite()) {
        return Err(Error::InvalidParameter("epsilon and deviation must be finite and >= 0".into()));
    }
    let steps = (period_bound - 1) as f64;
    let bound = 2.0 * epsilon * steps;
    let contradiction_threshold = if deviation == 0.0 {
        0.0
    } else if steps == 0.0 {
        f64::INFINITY
    } else {
        deviation / (2.0 * steps)
    };
    Ok(PremiseReport {
        period_bound,
        periods_bounded: periods.iter().all(|&p| p <= period_bound),
        epsilon,
        bound,
        deviation,
        compatible: deviation <= bound,
        contradiction_threshold,
    })
}

/// Deviation of the limit potential `λ cos(2πjα)` from its best constant:
/// `|λ|` for irrational `α`, estimated from the largest computed approximant.
pub fn mathieu_deviation(c: &Convergent, coupling: f64) -> Result<f64> {
    let spec = mathieu_potential(c, coupling)?;
    Ok(best_constant(spec.potential())?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::DEFAULT_GRID;

    fn golden() -> f64 {
        (5f64.sqrt() - 1.0) / 2.0
    }

    fn pairs(list: &ConvergentList) -> Vec<(i64, i64)> {
        list.convergents.iter().map(|c| (c.a, c.b)).collect()
    }

    #[test]
    fn golden_mean_convergents() {
        let list = convergents(golden(), 6).unwrap();
        assert_eq!(pairs(&list), [(1, 1), (1, 2), (2, 3), (3, 5), (5, 8), (8, 13)]);
        assert!(!list.truncated);
    }

    #[test]
    fn pi_convergents() {
        let list = convergents(std::f64::consts::PI - 3.0, 3).unwrap();
        assert_eq!(pairs(&list), [(1, 7), (15, 106), (16, 113)]);
        let list = convergents(std::f64::consts::PI, 2).unwrap();
        assert_eq!(pairs(&list), [(3, 1), (22, 7)]);
    }

    #[test]
    fn near_rational_convergents() {
        let below = convergents(1.0 / 3.0 - 1e-9, 3).unwrap();
        assert_eq!(below.convergents[0].b, 3);
        let above = convergents(1.0 / 3.0 + 1e-9, 3).unwrap();
        assert_eq!(pairs(&above)[..2], [(1, 2), (1, 3)]);
    }

    #[test]
    fn rational_alpha_truncates() {
        let list = convergents(0.5, 4).unwrap();
        assert_eq!(pairs(&list), [(1, 2)]);
        assert!(list.truncated);
        let list = convergents(golden(), 500).unwrap();
        assert!(list.truncated && list.convergents.len() > 30);
        assert!(convergents(f64::NAN, 3).is_err());
        assert!(convergents(0.3, 0).is_err());
    }

    #[test]
    fn small_potentials() {
        let half = mathieu_potential(&Convergent::new(1, 2).unwrap(), 1.0).unwrap();
        assert_eq!(half.potential(), &[-1.0, 1.0]);
        let third = mathieu_potential(&Convergent::new(1, 3).unwrap(), 1.0).unwrap();
        let v = third.potential();
        assert_eq!(v.len(), 3);
        assert!((v[0] + 0.5).abs() < 1e-15 && (v[1] + 0.5).abs() < 1e-15 && v[2] == 1.0);
        let two_thirds = mathieu_potential(&Convergent::new(2, 3).unwrap(), 1.0).unwrap();
        let mut a = v.to_vec();
        let mut b = two_thirds.potential().to_vec();
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
    }

    #[test]
    fn minimal_periods() {
        let c = Convergent::new(1, 2).unwrap();
        assert_eq!(minimal_period(|j| rational_cosine(&c, j), 2).unwrap(), 2);
        let c = Convergent::new(2, 5).unwrap();
        assert_eq!(minimal_period(|j| rational_cosine(&c, j), 5).unwrap(), 5);
        assert_eq!(minimal_period(|_| 0.7, 4).unwrap(), 1);
        assert!(matches!(minimal_period(|j| rational_cosine(&c, j), 4), Err(Error::InvalidCandidate(4))));
        assert!(minimal_period(|_| 0.0, 0).is_err());
    }

    #[test]
    fn free_laplacian_sweep() {
        let sweep = approximant_sweep(golden(), 4, 256, 0.0, &[]).unwrap();
        assert_eq!(sweep.reports.len(), 4);
        for r in &sweep.reports {
            assert_eq!(r.gap_count, 0);
            assert_eq!(r.period, 1);
            let hull = r.spectrum.hull().unwrap();
            let pad = r.spectrum.resolution_error();
            assert!((hull.lo + 2.0).abs() <= pad + 1e-9 && (hull.hi - 2.0).abs() <= pad + 1e-9);
        }
    }

    #[test]
    fn self_approximation_has_zero_distance() {
        let c = Convergent::new(2, 5).unwrap();
        let sweep = approximant_sweep_for(c.value, &[c, c], 256, 1.0, &[]).unwrap();
        assert_eq!(sweep.steps[0].hausdorff, 0.0);
        assert_eq!(sweep.steps[0].sup_norm, 0.0);
        assert!(sweep.reports[0].potential_distance < 1e-12);
    }

    #[test]
    fn golden_sweep_is_dominated() {
        let sweep = approximant_sweep(golden(), 5, DEFAULT_GRID, 1.0, &[0.1]).unwrap();
        let periods: Vec<usize> = sweep.reports.iter().map(|r| r.period).collect();
        assert_eq!(periods, [1, 2, 3, 5, 8]);
        assert!(sweep.reports.iter().all(|r| r.period_discrepancy));
        assert!(sweep.steps.iter().all(|s| s.dominated), "{:?}", sweep.steps);
        for r in &sweep.reports {
            assert!(r.potential_distance <= r.potential_distance_bound + 1e-12);
        }
    }

    #[test]
    fn limit_points() {
        let a = RealSpectrum::new([crate::spectra::Interval::new(-1.0, 1.0)], 0.0).unwrap();
        let r = limit_point_check(&[a.clone(), a.clone()], &a, &[0.5, 0.5], 1e-9).unwrap();
        assert!(r.cauchy && r.converged && r.distances == [0.0, 0.0]);
        assert!(matches!(limit_point_check(std::slice::from_ref(&a), &a, &[3.0], 1e-9), Err(Error::InvalidPick { index: 0, .. })));
    }

    #[test]
    fn premise_arithmetic() {
        let r = tenmartini_premise(&[1, 2, 3, 5], 5, 0.1, 1.0).unwrap();
        assert!(r.periods_bounded && !r.compatible);
        assert!((r.bound - 0.8).abs() < 1e-15);
        assert!((r.contradiction_threshold - 0.125).abs() < 1e-15);
        let r = tenmartini_premise(&[5], 5, 0.2, 0.2).unwrap();
        assert!(r.compatible && (r.bound - 1.6).abs() < 1e-15);
        let r = tenmartini_premise(&[3], 3, 0.01, 0.0).unwrap();
        assert!(r.compatible);
        assert!(!tenmartini_premise(&[8], 5, 0.1, 1.0).unwrap().periods_bounded);
    }

    #[test]
    fn mathieu_deviation_is_coupling() {
        let c = Convergent::new(5, 8).unwrap();
        assert!((mathieu_deviation(&c, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }
}
