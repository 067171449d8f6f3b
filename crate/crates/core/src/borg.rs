//! Numerical checks of the pseudospectral Borg-type theorems.
//!
//! * forward: if `Λ_ε(A)` is connected then `sup |v_n − c| ≤ 2ε(p−1)` for
//!   some `c` (Schrödinger, Jacobi, and general Laurent operators with an
//!   ascending potential);
//! * converse: if `sup |v_n − c| ≤ ε` (and `sup |a_n − c₂| ≤ ε` for Jacobi)
//!   then `Λ_{2ε}(A)` is connected.
//!
//! Connectedness is always decided on a padded spectrum, which contains the
//! true one. A connected verdict therefore only certifies the true
//! `Λ_{ε + ε_res}` with `ε_res = 2δ + 2·EIG_TOL`; the forward check carries
//! the matching slack `2ε_res(p−1)` in its margin.
//!
//! The forward argument runs through Cauchy interlacing: the eigenvalues of
//! the `(p−1)` submatrices `J_k` sit inside the closed gaps of the symbol's
//! bands for every `θ`, so their traces, which telescope to differences of
//! potential values, differ by at most `2ε(p−1)`. [`interlacing_report`] and
//! [`trace_gap`] expose both steps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eig::{hermitian_eigenvalues, interlacing_violation};
use crate::error::{Error, Result};
use crate::operator::{OperatorKind, OperatorSpec};
use crate::spectra::{gap_report, pseudospectrum_intervals, spectrum, theta_grid, RealSpectrum};
use crate::symbols::{interlacing_submatrix, symbol};

/// Tolerance on the forward margin.
pub const FORWARD_TOL: f64 = 1e-8;

/// Relative slack when comparing a deviation with `ε`.
pub const HYPOTHESIS_TOL: f64 = 1e-12;

/// Tolerance on interlacing violations.
pub const INTERLACING_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BorgTheorem {
    ForwardSchrodinger,
    ConverseSchrodinger,
    ForwardJacobi,
    ConverseJacobi,
    ForwardLaurent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BorgReport {
    pub theorem: BorgTheorem,
    pub epsilon: f64,
    /// Chebyshev centre of the potential.
    pub best_c: f64,
    /// `sup_n |v_n − best_c|`.
    pub deviation: f64,
    /// Forward: `2ε(p−1)`. Converse: the fattening radius `2ε`.
    pub bound: f64,
    pub satisfied: bool,
    /// Forward with the hypothesis met: `bound + resolution_slack − deviation`.
    /// Converse with the hypothesis met: `2ε − epsilon_star`.
    /// Hypothesis unmet (vacuous): how far the hypothesis is from holding.
    pub margin: f64,
    /// `satisfied ⟺ margin ≥ −tolerance`.
    pub tolerance: f64,
    pub hypothesis_met: bool,
    /// Connectedness of the fattened spectrum that the theorem talks about.
    pub connected: bool,
    /// Half the widest significant gap of the spectrum.
    pub epsilon_star: f64,
    pub resolution_slack: f64,
    /// `sup_n |a_n − c₂|` for Jacobi operators.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling_deviation: Option<f64>,
    pub period: usize,
}

/// Chebyshev centre `c = (min + max)/2` and deviation `(max − min)/2`.
pub fn best_constant(v: &[f64]) -> Result<(f64, f64)> {
    if v.is_empty() {
        return Err(Error::InvalidParameter("best constant of an empty sequence".into()));
    }
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((0.5 * (lo + hi), 0.5 * (hi - lo)))
}

fn positive_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn forward_theorem(spec: &OperatorSpec) -> Result<BorgTheorem> {
    match spec.kind() {
        OperatorKind::Schrodinger => Ok(BorgTheorem::ForwardSchrodinger),
        OperatorKind::Jacobi => Ok(BorgTheorem::ForwardJacobi),
        OperatorKind::LaurentGeneral if spec.potential_sorted() => Ok(BorgTheorem::ForwardLaurent),
        OperatorKind::LaurentGeneral => {
            Err(Error::HypothesisViolation("the laurent forward check needs v_1 <= v_2 <= ... <= v_p".into()))
        }
    }
}

/// Forward check on the shift-0 spectrum computed on an `n`-point grid.
pub fn check_forward(spec: &OperatorSpec, epsilon: f64, n: usize) -> Result<BorgReport> {
    positive_epsilon(epsilon)?;
    forward_theorem(spec)?;
    let s = spectrum(spec, n)?;
    forward_from_spectrum(spec, &s, epsilon)
}

/// Forward check against an already computed spectrum of `spec`.
pub fn forward_from_spectrum(spec: &OperatorSpec, s: &RealSpectrum, epsilon: f64) -> Result<BorgReport> {
    positive_epsilon(epsilon)?;
    let theorem = forward_theorem(spec)?;
    let p = spec.period();
    let (best_c, deviation) = best_constant(spec.potential())?;
    let epsilon_star = gap_report(s).epsilon_star;
    let connected = gap_report(&pseudospectrum_intervals(s, epsilon)?).connected;
    let bound = 2.0 * epsilon * (p - 1) as f64;
    let resolution_slack = 2.0 * (s.gap_threshold() / 2.0 + s.resolution_error()) * (p - 1) as f64;
    let margin = if connected { bound + resolution_slack - deviation } else { epsilon_star - epsilon };
    Ok(BorgReport {
        theorem,
        epsilon,
        best_c,
        deviation,
        bound,
        satisfied: margin >= -FORWARD_TOL,
        margin,
        tolerance: FORWARD_TOL,
        hypothesis_met: connected,
        connected,
        epsilon_star,
        resolution_slack,
        coupling_deviation: coupling_deviation(spec),
        period: p,
    })
}

fn coupling_deviation(spec: &OperatorSpec) -> Option<f64> {
    (spec.kind() == OperatorKind::Jacobi).then(|| best_constant(spec.couplings()).map(|(_, d)| d).unwrap_or(0.0))
}

/// Converse check: with the hypothesis met, `Λ_{2ε}` must be connected.
/// Hypothesis failures are reported, not raised.
pub fn check_converse(spec: &OperatorSpec, epsilon: f64, n: usize) -> Result<BorgReport> {
    positive_epsilon(epsilon)?;
    converse_theorem(spec)?;
    let s = spectrum(spec, n)?;
    converse_from_spectrum(spec, &s, epsilon)
}

fn converse_theorem(spec: &OperatorSpec) -> Result<BorgTheorem> {
    match spec.kind() {
        OperatorKind::Schrodinger => Ok(BorgTheorem::ConverseSchrodinger),
        OperatorKind::Jacobi => Ok(BorgTheorem::ConverseJacobi),
        OperatorKind::LaurentGeneral => {
            Err(Error::Unsupported("no converse is asserted for general laurent operators".into()))
        }
    }
}

pub fn converse_from_spectrum(spec: &OperatorSpec, s: &RealSpectrum, epsilon: f64) -> Result<BorgReport> {
    positive_epsilon(epsilon)?;
    let theorem = converse_theorem(spec)?;
    let (best_c, deviation) = best_constant(spec.potential())?;
    let coupling_deviation = coupling_deviation(spec);
    let worst_deviation = deviation.max(coupling_deviation.unwrap_or(0.0));
    // decimal inputs such as (0.9, 1.1) round to a deviation a few ulps above ε
    let hypothesis_met = worst_deviation <= epsilon + HYPOTHESIS_TOL * epsilon.max(1.0);
    let epsilon_star = gap_report(s).epsilon_star;
    let connected = gap_report(&pseudospectrum_intervals(s, 2.0 * epsilon)?).connected;
    // fattening by 2ε closes a gap g exactly when g − 4ε is below the threshold
    let tolerance = s.gap_threshold() / 4.0;
    let margin = if hypothesis_met { 2.0 * epsilon - epsilon_star } else { worst_deviation - epsilon };
    Ok(BorgReport {
        theorem,
        epsilon,
        best_c,
        deviation,
        bound: 2.0 * epsilon,
        satisfied: margin >= -tolerance,
        margin,
        tolerance,
        hypothesis_met,
        connected,
        epsilon_star,
        resolution_slack: 0.0,
        coupling_deviation,
        period: spec.period(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterlacingReport {
    pub holds: bool,
    pub worst_violation: f64,
    pub points_checked: usize,
}

/// Checks that the eigenvalues of both `(p−1)` submatrices of `f_k` interlace
/// the eigenvalues of `f_k(θ)` at every grid point.
pub fn interlacing_report(spec: &OperatorSpec, shift: usize, n: usize) -> Result<InterlacingReport> {
    let p = spec.period();
    if p < 2 {
        return Err(Error::DegeneratePeriod);
    }
    let (lead, trail) = match spec.kind() {
        OperatorKind::LaurentGeneral if shift != 0 => return Err(Error::InvalidShift { shift, period: 1 }),
        OperatorKind::LaurentGeneral => (0, 1),
        _ if shift >= p => return Err(Error::InvalidShift { shift, period: p }),
        _ => (shift, (shift + 1) % p),
    };
    if n < 2 {
        return Err(Error::InvalidGrid(n));
    }
    let mu_lead = hermitian_eigenvalues(&interlacing_submatrix(spec, lead)?)?.values;
    let mu_trail = hermitian_eigenvalues(&interlacing_submatrix(spec, trail)?)?.values;
    let worst = theta_grid(n)
        .par_iter()
        .map(|&theta| {
            let lambda = hermitian_eigenvalues(&symbol(spec, shift, theta)?)?.values;
            Ok(interlacing_violation(&lambda, &mu_lead).max(interlacing_violation(&lambda, &mu_trail)))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(InterlacingReport { holds: worst <= INTERLACING_TOL, worst_violation: worst, points_checked: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceGap {
    /// `|Tr J_{k1} − Tr J_{k2}|` from the matrix diagonals.
    pub difference: f64,
    /// `|v_{k2} − v_{k1}|` (with `v_0 = v_p`), which the trace difference telescopes to.
    pub telescoped: f64,
    pub period: usize,
}

impl TraceGap {
    /// Whether the trace difference respects `2ε(p−1)`.
    pub fn within(&self, epsilon: f64) -> bool {
        self.difference <= 2.0 * epsilon * (self.period - 1) as f64
    }
}

pub fn trace_gap(spec: &OperatorSpec, k1: usize, k2: usize) -> Result<TraceGap> {
    let j1 = interlacing_submatrix(spec, k1)?;
    let j2 = interlacing_submatrix(spec, k2)?;
    let difference = (j1.trace() - j2.trace()).abs();
    let telescoped = (spec.v_at(k2 as i64) - spec.v_at(k1 as i64)).abs();
    Ok(TraceGap { difference, telescoped, period: spec.period() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub instances: usize,
    pub min_period: usize,
    pub max_period: usize,
    pub grid: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, instances: 500, min_period: 2, max_period: 8, grid: crate::spectra::DEFAULT_GRID }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCase {
    pub index: usize,
    pub spec: OperatorSpec,
    pub forward: BorgReport,
    pub converse: BorgReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub forward_violations: usize,
    /// Instances whose converse hypothesis held.
    pub converse_checked: usize,
    pub converse_violations: usize,
    pub worst_forward_margin: f64,
    pub worst_converse_margin: f64,
    /// Every instance with at least one unsatisfied check.
    pub failures: Vec<SuiteCase>,
}

/// Even instances are Schrödinger operators, odd ones Jacobi with
/// `a_j ∈ [0.5, 2]`; potentials are uniform in `[−1, 1]`.
pub fn random_spec<R: Rng>(rng: &mut R, index: usize, min_period: usize, max_period: usize) -> OperatorSpec {
    let p = rng.gen_range(min_period..=max_period);
    let v: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    if index.is_multiple_of(2) {
        OperatorSpec::schrodinger(v).expect("random potential is finite")
    } else {
        let a = (0..p).map(|_| rng.gen_range(0.5..=2.0)).collect();
        OperatorSpec::jacobi(v, a).expect("random couplings are positive")
    }
}

/// Forward check at `ε = epsilon_star` and converse check at the smallest
/// `ε` meeting its hypothesis, on seeded random operators.
pub fn random_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if config.min_period < 1 || config.min_period > config.max_period {
        return Err(Error::InvalidParameter("invalid period range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let specs: Vec<OperatorSpec> =
        (0..config.instances).map(|i| random_spec(&mut rng, i, config.min_period, config.max_period)).collect();
    let cases = specs
        .into_par_iter()
        .enumerate()
        .map(|(index, spec)| {
            let s = spectrum(&spec, config.grid)?;
            let epsilon_star = gap_report(&s).epsilon_star;
            let forward = forward_from_spectrum(&spec, &s, epsilon_star.max(1e-12))?;
            let (_, dv) = best_constant(spec.potential())?;
            let da = coupling_deviation(&spec).unwrap_or(0.0);
            let converse = converse_from_spectrum(&spec, &s, dv.max(da).max(1e-12))?;
            Ok(SuiteCase { index, spec, forward, converse })
        })
        .collect::<Result<Vec<_>>>()?;
    let forward_violations = cases.iter().filter(|c| !c.forward.satisfied).count();
    let converse_checked = cases.iter().filter(|c| c.converse.hypothesis_met).count();
    let converse_violations = cases.iter().filter(|c| c.converse.hypothesis_met && !c.converse.satisfied).count();
    let worst_forward_margin =
        cases.iter().filter(|c| c.forward.hypothesis_met).map(|c| c.forward.margin).fold(f64::INFINITY, f64::min);
    let worst_converse_margin =
        cases.iter().filter(|c| c.converse.hypothesis_met).map(|c| c.converse.margin).fold(f64::INFINITY, f64::min);
    let failures = cases.into_iter().filter(|c| !(c.forward.satisfied && c.converse.satisfied)).collect();
    Ok(SuiteReport {
        config: config.clone(),
        forward_violations,
        converse_checked,
        converse_violations,
        worst_forward_margin,
        worst_converse_margin,
        failures,
    })
}
