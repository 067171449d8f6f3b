//! Hermitian eigenvalue contract.
//!
//! Eigenvalues are returned in ascending order. Proof sketches of the Borg
//! theorems usually index them descending (`λ_1 ≥ λ_2 ≥ …`); callers that
//! mirror those arguments reverse the index.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symbols::{JacobiSubmatrix, SymbolMatrix};

/// Backward-error tolerance of the eigensolver, relative to `‖M‖`.
pub const EIG_TOL: f64 = 1e-10;

/// Maximum relative asymmetry accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub values: Vec<f64>,
    /// `max_j ‖M x_j − λ_j x_j‖ / ‖M‖` when eigenvectors were formed,
    /// otherwise the solver's a priori backward-error guarantee.
    pub residual_bound: f64,
}

/// Borrowed view of a dense Hermitian matrix.
pub enum HermitianView<'a> {
    Real(&'a DMatrix<f64>),
    Complex(&'a DMatrix<Complex64>),
}

pub trait AsHermitian {
    fn as_hermitian(&self) -> HermitianView<'_>;
}

impl AsHermitian for DMatrix<f64> {
    fn as_hermitian(&self) -> HermitianView<'_> {
        HermitianView::Real(self)
    }
}

impl AsHermitian for DMatrix<Complex64> {
    fn as_hermitian(&self) -> HermitianView<'_> {
        HermitianView::Complex(self)
    }
}

impl AsHermitian for SymbolMatrix {
    fn as_hermitian(&self) -> HermitianView<'_> {
        HermitianView::Complex(self.entries())
    }
}

impl AsHermitian for JacobiSubmatrix {
    fn as_hermitian(&self) -> HermitianView<'_> {
        HermitianView::Real(self.entries())
    }
}

fn a_priori_bound(n: usize) -> f64 {
    // Householder tridiagonalization plus implicit QR: O(n ε) backward error.
    4.0 * (n.max(1) as f64) * f64::EPSILON
}

fn check_square(rows: usize, cols: usize) -> Result<()> {
    if rows != cols {
        return Err(Error::InvalidParameter(format!("matrix is {rows}x{cols}, expected square")));
    }
    Ok(())
}

/// Largest relative violation of `M = Mᴴ`.
pub fn asymmetry<M: AsHermitian + ?Sized>(m: &M) -> f64 {
    match m.as_hermitian() {
        HermitianView::Real(m) => relative_asymmetry(m, |i, j| (m[(i, j)] - m[(j, i)]).abs(), |x| x.abs()),
        HermitianView::Complex(m) => relative_asymmetry(m, |i, j| (m[(i, j)] - m[(j, i)].conj()).norm(), |z| z.norm()),
    }
}

fn relative_asymmetry<T: nalgebra::Scalar>(
    m: &DMatrix<T>,
    diff: impl Fn(usize, usize) -> f64,
    abs: impl Fn(&T) -> f64,
) -> f64 {
    let scale = m.iter().map(abs).fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows().min(m.ncols());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max(diff(i, j));
        }
    }
    worst / scale
}

fn validate<M: AsHermitian + ?Sized>(m: &M) -> Result<usize> {
    let (rows, cols) = match m.as_hermitian() {
        HermitianView::Real(m) => m.shape(),
        HermitianView::Complex(m) => m.shape(),
    };
    check_square(rows, cols)?;
    let asym = asymmetry(m);
    if !(asym <= HERMITIAN_TOL) {
        return Err(Error::NotHermitian(asym));
    }
    Ok(rows)
}

fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues<M: AsHermitian + ?Sized>(m: &M) -> Result<EigenResult> {
    let n = validate(m)?;
    if n == 0 {
        return Ok(EigenResult { values: Vec::new(), residual_bound: 0.0 });
    }
    let values: Vec<f64> = match m.as_hermitian() {
        HermitianView::Real(m) => SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS)
            .ok_or(Error::NoConvergence)?
            .eigenvalues
            .iter()
            .copied()
            .collect(),
        HermitianView::Complex(m) => SymmetricEigen::try_new(m.clone(), f64::EPSILON, MAX_SWEEPS)
            .ok_or(Error::NoConvergence)?
            .eigenvalues
            .iter()
            .copied()
            .collect(),
    };
    Ok(EigenResult { values: sorted(values), residual_bound: a_priori_bound(n) })
}

/// Like [`hermitian_eigenvalues`], but forms eigenvectors and reports the
/// measured relative residual.
pub fn hermitian_eigen_checked<M: AsHermitian + ?Sized>(m: &M) -> Result<EigenResult> {
    let n = validate(m)?;
    if n == 0 {
        return Ok(EigenResult { values: Vec::new(), residual_bound: 0.0 });
    }
    let dense: DMatrix<Complex64> = match m.as_hermitian() {
        HermitianView::Real(m) => m.map(|x| Complex64::new(x, 0.0)),
        HermitianView::Complex(m) => m.clone(),
    };
    let eig = SymmetricEigen::try_new(dense.clone(), f64::EPSILON, MAX_SWEEPS).ok_or(Error::NoConvergence)?;
    let norm = eig.eigenvalues.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let mut residual = 0.0f64;
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let x = eig.eigenvectors.column(j);
        let r = &dense * x - x * Complex64::new(lambda, 0.0);
        residual = residual.max(r.norm());
    }
    let residual_bound = if norm > 0.0 { residual / norm } else { residual };
    Ok(EigenResult { values: sorted(eig.eigenvalues.iter().copied().collect()), residual_bound })
}

/// Spectral norm of a Hermitian matrix, `max |λ_j|`.
pub fn operator_norm<M: AsHermitian + ?Sized>(m: &M) -> Result<f64> {
    let eig = hermitian_eigenvalues(m)?;
    Ok(eig.values.iter().fold(0.0, |acc: f64, x| acc.max(x.abs())))
}

/// Worst violation of Cauchy interlacing between an ascending spectrum
/// `full` of size `n` and an ascending spectrum `sub` of size `n − 1`:
/// `full[j] ≤ sub[j] ≤ full[j+1]`.
pub fn interlacing_violation(full: &[f64], sub: &[f64]) -> f64 {
    assert_eq!(full.len(), sub.len() + 1, "sub spectrum must have one fewer value");
    sub.iter().enumerate().map(|(j, &mu)| (full[j] - mu).max(mu - full[j + 1]).max(0.0)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn antidiagonal_two_by_two() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 3.0, 3.0, 0.0]);
        let eig = hermitian_eigenvalues(&m).unwrap();
        assert!((eig.values[0] + 3.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn identity_has_unit_eigenvalues() {
        let m = DMatrix::<Complex64>::identity(6, 6);
        let eig = hermitian_eigenvalues(&m).unwrap();
        assert_eq!(eig.values.len(), 6);
        assert!(eig.values.iter().all(|x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn empty_matrix_gives_empty_result() {
        let m = DMatrix::<f64>::zeros(0, 0);
        assert!(hermitian_eigenvalues(&m).unwrap().values.is_empty());
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian(_))));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0 + 1e-9, 1.0]);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian(_))));
        let m = DMatrix::<f64>::zeros(2, 3);
        assert!(hermitian_eigenvalues(&m).is_err());
    }

    #[test]
    fn complex_hermitian_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)]);
        let eig = hermitian_eigen_checked(&m).unwrap();
        assert!(eig.values[0].abs() < 1e-14);
        assert!((eig.values[1] - 2.0).abs() < 1e-14);
        assert!(eig.residual_bound < EIG_TOL);
    }

    #[test]
    fn interlacing_violation_measures_excursions() {
        assert_eq!(interlacing_violation(&[0.0, 2.0], &[1.0]), 0.0);
        assert!((interlacing_violation(&[0.0, 2.0], &[2.5]) - 0.5).abs() < 1e-15);
        assert!((interlacing_violation(&[0.0, 2.0, 4.0], &[-1.0, 3.0]) - 1.0).abs() < 1e-15);
    }
}
