//! Matrix-valued symbols of periodic operators.
//!
//! A `p`-periodic operator is a block Laurent operator with `p×p` blocks
//! `A_k`; its symbol `f(θ) = Σ_k A_k e^{ikθ}` is a Hermitian matrix for each
//! `θ ∈ (−π, π]`, and the operator spectrum is the union of the pointwise
//! spectra of `f(θ)`.
//!
//! For periodic tridiagonal operators the choice of period origin gives `p`
//! shifted symbols `f_k`, all unitarily equivalent. The corner coupling sits
//! at position `(1, p)` with `e^{iθ}` and at `(p, 1)` with `e^{−iθ}`. When
//! `p ≤ 2` several contributions land on the same entry; they are summed, so
//! `p = 1` gives the scalar `v_1 + 2a_1 cos θ`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{OperatorKind, OperatorSpec};

/// Wraps `theta` into `(−π, π]`.
pub fn wrap_theta(theta: f64) -> f64 {
    if theta > -PI && theta <= PI {
        return theta;
    }
    let wrapped = theta - TAU * ((theta - PI) / TAU).ceil();
    // rounding can land exactly on −π
    if wrapped <= -PI {
        wrapped + TAU
    } else {
        wrapped
    }
}

/// The `p×p` value `f_k(θ)` of a symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix {
    theta: f64,
    entries: DMatrix<Complex64>,
}

impl SymbolMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[(row, col)]
    }

    /// True if every nonzero lies on the three central diagonals or the two corners.
    pub fn has_periodic_band_pattern(&self) -> bool {
        let p = self.dim();
        (0..p).all(|i| {
            (0..p).all(|j| {
                let banded = i.abs_diff(j) <= 1 || (i, j) == (0, p - 1) || (i, j) == (p - 1, 0);
                banded || self.entries[(i, j)] == Complex64::new(0.0, 0.0)
            })
        })
    }
}

/// Leading `(p−1)×(p−1)` principal submatrix `J_k` of a shifted symbol.
///
/// It does not depend on `θ`; it is a real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSubmatrix {
    shift: usize,
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
    entries: DMatrix<f64>,
}

impl JacobiSubmatrix {
    fn new(shift: usize, diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Self {
        let n = diagonal.len();
        let mut entries = DMatrix::zeros(n, n);
        for (i, &d) in diagonal.iter().enumerate() {
            entries[(i, i)] = d;
        }
        for (i, &b) in off_diagonal.iter().enumerate() {
            entries[(i, i + 1)] = b;
            entries[(i + 1, i)] = b;
        }
        JacobiSubmatrix { shift, diagonal, off_diagonal, entries }
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Sum of the diagonal read back from the dense entries.
    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// Adds the Hermitian pair `z` at `(i, j)` and `z̄` at `(j, i)`; on the
/// diagonal (`i == j`) the pair collapses to `2 Re z`.
fn couple(m: &mut DMatrix<Complex64>, i: usize, j: usize, z: Complex64) {
    if i == j {
        m[(i, i)] += Complex64::new(2.0 * z.re, 0.0);
    } else {
        m[(i, j)] += z;
        m[(j, i)] += z.conj();
    }
}

fn periodic_tridiagonal(spec: &OperatorSpec, shift: usize, theta: f64) -> Result<SymbolMatrix> {
    let p = spec.period();
    if shift >= p {
        return Err(Error::InvalidShift { shift, period: p });
    }
    let theta = wrap_theta(theta);
    let k = shift as i64;
    let mut m = DMatrix::from_element(p, p, Complex64::new(0.0, 0.0));
    for i in 0..p {
        m[(i, i)] = Complex64::new(spec.v_at(k + i as i64 + 1), 0.0);
    }
    for i in 0..p.saturating_sub(1) {
        couple(&mut m, i, i + 1, Complex64::new(spec.a_at(k + i as i64 + 1), 0.0));
    }
    let corner = spec.a_at(k + p as i64) * Complex64::from_polar(1.0, theta);
    couple(&mut m, 0, p - 1, corner);
    Ok(SymbolMatrix { theta, entries: m })
}

/// Shifted symbol `f_k(θ)` of a discrete Schrödinger operator.
pub fn schrodinger_symbol(spec: &OperatorSpec, shift: usize, theta: f64) -> Result<SymbolMatrix> {
    if spec.kind() != OperatorKind::Schrodinger {
        return Err(Error::InvalidSpec(format!("expected a schrodinger operator, got {:?}", spec.kind())));
    }
    periodic_tridiagonal(spec, shift, theta)
}

/// Shifted symbol `f_k(θ)` of a periodic Jacobi operator: off-diagonals
/// `a_{k+1}, …, a_{k+p−1}` and corner `a_{k+p} e^{iθ}`.
pub fn jacobi_symbol(spec: &OperatorSpec, shift: usize, theta: f64) -> Result<SymbolMatrix> {
    if spec.kind() != OperatorKind::Jacobi {
        return Err(Error::InvalidSpec(format!("expected a jacobi operator, got {:?}", spec.kind())));
    }
    periodic_tridiagonal(spec, shift, theta)
}

/// Value of the corner function `Σ a_k e^{ikθ}`.
pub fn corner_function(spec: &OperatorSpec, theta: f64) -> Complex64 {
    spec.fourier().iter().map(|t| t.coefficient * Complex64::from_polar(1.0, t.k as f64 * theta)).sum()
}

/// Symbol of a general block Laurent operator: unit interior bands and the
/// corner function at `(1, p)`.
pub fn laurent_symbol(spec: &OperatorSpec, theta: f64) -> Result<SymbolMatrix> {
    if spec.kind() != OperatorKind::LaurentGeneral {
        return Err(Error::InvalidSpec(format!("expected a laurent operator, got {:?}", spec.kind())));
    }
    if !spec.potential_sorted() {
        return Err(Error::InvalidSpec("laurent operators need an ascending potential".into()));
    }
    let p = spec.period();
    let theta = wrap_theta(theta);
    let mut m = DMatrix::from_element(p, p, Complex64::new(0.0, 0.0));
    for (i, &v) in spec.potential().iter().enumerate() {
        m[(i, i)] = Complex64::new(v, 0.0);
    }
    for i in 0..p.saturating_sub(1) {
        couple(&mut m, i, i + 1, Complex64::new(1.0, 0.0));
    }
    couple(&mut m, 0, p - 1, corner_function(spec, theta));
    Ok(SymbolMatrix { theta, entries: m })
}

/// Dispatches on the operator kind. Laurent operators only have shift 0.
pub fn symbol(spec: &OperatorSpec, shift: usize, theta: f64) -> Result<SymbolMatrix> {
    match spec.kind() {
        OperatorKind::Schrodinger | OperatorKind::Jacobi => periodic_tridiagonal(spec, shift, theta),
        OperatorKind::LaurentGeneral if shift == 0 => laurent_symbol(spec, theta),
        OperatorKind::LaurentGeneral => Err(Error::InvalidShift { shift, period: 1 }),
    }
}

/// The `(p−1)×(p−1)` submatrix used for interlacing.
///
/// For Schrödinger and Jacobi operators this is `J_k`, the leading principal
/// submatrix of `f_k`; `J_{k+1}` is then the trailing one of `f_k`. A general
/// Laurent operator has one symbol, so shift 0 is its leading submatrix and
/// shift 1 its trailing one.
pub fn interlacing_submatrix(spec: &OperatorSpec, shift: usize) -> Result<JacobiSubmatrix> {
    let p = spec.period();
    if p < 2 {
        return Err(Error::DegeneratePeriod);
    }
    let start = match spec.kind() {
        OperatorKind::LaurentGeneral if shift > 1 => {
            return Err(Error::InvalidShift { shift, period: 2 });
        }
        _ if shift >= p => return Err(Error::InvalidShift { shift, period: p }),
        _ => shift as i64,
    };
    let diagonal = (1..p as i64).map(|i| spec.v_at(start + i)).collect();
    let off_diagonal = (1..p as i64 - 1).map(|i| spec.a_at(start + i)).collect();
    Ok(JacobiSubmatrix::new(shift, diagonal, off_diagonal))
}
