//! Finite sections of the bi-infinite matrix, as an independent check on the
//! symbol-based spectrum.
//!
//! The plain principal section (Dirichlet truncation) can carry edge states
//! inside spectral gaps, so its eigenvalues approach the symbol spectrum only
//! up to a margin. The periodic wrap is a block circulant whose eigenvalues
//! are exactly `⋃_j σ(f(2πj/n))`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eig::{hermitian_eigenvalues, interlacing_violation};
use crate::error::{Error, Result};
use crate::operator::{OperatorKind, OperatorSpec};
use crate::spectra::{hausdorff_distance, spectrum, Interval, RealSpectrum};

/// Largest section the oracle will build.
pub const MAX_SIZE: usize = 4096;

/// Slack on the monotonicity of the one-sided distance.
pub const MONOTONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub entries: DMatrix<f64>,
    pub period: usize,
}

impl TruncatedOperator {
    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigenvalues(&self.entries)?.values)
    }
}

fn couple(m: &mut DMatrix<f64>, i: usize, j: usize, x: f64) {
    if i == j {
        m[(i, i)] += 2.0 * x;
    } else {
        m[(i, j)] += x;
        m[(j, i)] += x;
    }
}

fn check_size(sites: usize) -> Result<()> {
    if sites == 0 {
        return Err(Error::InvalidParameter("a section needs at least one site".into()));
    }
    if sites > MAX_SIZE {
        return Err(Error::SizeLimit { size: sites, limit: MAX_SIZE });
    }
    Ok(())
}

fn blocks_to_sites(spec: &OperatorSpec, blocks: usize) -> Result<usize> {
    blocks.checked_mul(spec.period()).ok_or(Error::SizeLimit { size: usize::MAX, limit: MAX_SIZE })
}

/// General Laurent entries on `blocks` blocks. With `wrap`, block offsets are
/// taken modulo `blocks`.
fn laurent_entries(spec: &OperatorSpec, blocks: usize, wrap: bool) -> DMatrix<f64> {
    let p = spec.period();
    let mut m = DMatrix::zeros(blocks * p, blocks * p);
    for b in 0..blocks {
        for i in 0..p {
            m[(b * p + i, b * p + i)] = spec.potential()[i];
        }
        for i in 0..p.saturating_sub(1) {
            couple(&mut m, b * p + i, b * p + i + 1, 1.0);
        }
        // block b, first site couples to block b − k, last site
        for t in spec.fourier() {
            let col = b as i64 - t.k;
            let col = if wrap {
                col.rem_euclid(blocks as i64)
            } else if (0..blocks as i64).contains(&col) {
                col
            } else {
                continue;
            };
            couple(&mut m, b * p, col as usize * p + p - 1, t.coefficient);
        }
    }
    m
}

/// Leading `sites × sites` principal section, starting at site 1.
pub fn truncate_sites(spec: &OperatorSpec, sites: usize) -> Result<TruncatedOperator> {
    check_size(sites)?;
    let entries = match spec.kind() {
        OperatorKind::Schrodinger | OperatorKind::Jacobi => {
            let mut m = DMatrix::zeros(sites, sites);
            for i in 0..sites {
                m[(i, i)] = spec.v_at(i as i64 + 1);
                if i + 1 < sites {
                    couple(&mut m, i, i + 1, spec.a_at(i as i64 + 1));
                }
            }
            m
        }
        OperatorKind::LaurentGeneral => {
            let blocks = sites.div_ceil(spec.period());
            laurent_entries(spec, blocks, false).view((0, 0), (sites, sites)).into_owned()
        }
    };
    Ok(TruncatedOperator { entries, period: spec.period() })
}

/// Principal section on `blocks` full periods.
pub fn truncate(spec: &OperatorSpec, blocks: usize) -> Result<TruncatedOperator> {
    if blocks == 0 {
        return Err(Error::InvalidParameter("at least one block is required".into()));
    }
    truncate_sites(spec, blocks_to_sites(spec, blocks)?)
}

/// Section on `blocks` periods with the ends joined.
pub fn truncate_periodic(spec: &OperatorSpec, blocks: usize) -> Result<TruncatedOperator> {
    if blocks == 0 {
        return Err(Error::InvalidParameter("at least one block is required".into()));
    }
    let sites = blocks_to_sites(spec, blocks)?;
    check_size(sites)?;
    let entries = match spec.kind() {
        OperatorKind::Schrodinger | OperatorKind::Jacobi => {
            let mut m = DMatrix::zeros(sites, sites);
            for i in 0..sites {
                m[(i, i)] += spec.v_at(i as i64 + 1);
                couple(&mut m, i, (i + 1) % sites, spec.a_at(i as i64 + 1));
            }
            m
        }
        OperatorKind::LaurentGeneral => laurent_entries(spec, blocks, true),
    };
    Ok(TruncatedOperator { entries, period: spec.period() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationRow {
    pub n: usize,
    pub size: usize,
    /// `max_μ dist(μ, σ)` over the section's eigenvalues.
    pub one_sided: f64,
    /// Two-sided distance between the eigenvalue set and `σ`.
    pub hausdorff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub n: usize,
    /// 1-based, ascending.
    pub index: usize,
    pub eigenvalue: f64,
    pub dist_to_symbol_spectrum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationComparison {
    pub symbol_spectrum: RealSpectrum,
    pub rows: Vec<TruncationRow>,
    pub eigen_rows: Vec<EigenRow>,
    /// The one-sided distance never grows along the supplied `n`.
    pub nonincreasing: bool,
}

/// Compares principal sections on each `n` in `blocks` with the symbol
/// spectrum on an `grid`-point grid.
pub fn truncation_compare(spec: &OperatorSpec, blocks: &[usize], grid: usize) -> Result<TruncationComparison> {
    let symbol_spectrum = spectrum(spec, grid)?;
    let per_n = blocks
        .par_iter()
        .map(|&n| {
            let t = truncate(spec, n)?;
            let mu = t.eigenvalues()?;
            let dists: Vec<f64> = mu.iter().map(|&x| symbol_spectrum.distance_to(x)).collect();
            let points = RealSpectrum::new(mu.iter().map(|&x| Interval::new(x, x)), 0.0)?;
            let row = TruncationRow {
                n,
                size: t.size(),
                one_sided: dists.iter().copied().fold(0.0, f64::max),
                hausdorff: hausdorff_distance(&points, &symbol_spectrum)?,
            };
            let eigen_rows: Vec<EigenRow> = mu
                .iter()
                .zip(&dists)
                .enumerate()
                .map(|(j, (&eigenvalue, &dist))| EigenRow {
                    n,
                    index: j + 1,
                    eigenvalue,
                    dist_to_symbol_spectrum: dist,
                })
                .collect();
            Ok((row, eigen_rows))
        })
        .collect::<Result<Vec<_>>>()?;
    let (rows, eigen): (Vec<TruncationRow>, Vec<Vec<EigenRow>>) = per_n.into_iter().unzip();
    let nonincreasing = rows.windows(2).all(|w| w[1].one_sided <= w[0].one_sided + MONOTONE_TOL);
    Ok(TruncationComparison { symbol_spectrum, rows, eigen_rows: eigen.concat(), nonincreasing })
}

/// Worst interlacing violation between the sections on `sites` and
/// `sites + 1` sites.
pub fn section_interlacing(spec: &OperatorSpec, sites: usize) -> Result<f64> {
    let small = truncate_sites(spec, sites)?.eigenvalues()?;
    let big = truncate_sites(spec, sites + 1)?.eigenvalues()?;
    Ok(interlacing_violation(&big, &small))
}
