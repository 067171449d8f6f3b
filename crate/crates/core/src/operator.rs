//! Periodic operator descriptions and their JSON wire format.
//!
//! An [`OperatorSpec`] describes one period of a bi-infinite self-adjoint
//! operator on `ℓ²(ℤ)`:
//!
//! * `Schrodinger`: `(Ax)_n = x_{n-1} + x_{n+1} + v_n x_n`,
//! * `Jacobi`: the same tridiagonal pattern with positive periodic
//!   off-diagonals `a_n` (the link between sites `n` and `n+1` is `a_n`),
//! * `LaurentGeneral`: unit interior bands inside each block and a corner
//!   function `f(θ) = Σ a_k e^{ikθ}` coupling the first and last site of
//!   blocks `k` apart.
//!
//! ```
//! use borg_spectra::OperatorSpec;
//!
//! let spec: OperatorSpec =
//!     serde_json::from_str(r#"{"kind": "jacobi", "period": 2, "v": [0, 0], "a": [1, 2]}"#)
//!         .unwrap();
//! assert_eq!(spec.period(), 2);
//! assert_eq!(spec.couplings(), &[1.0, 2.0]);
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    #[serde(rename = "schrodinger")]
    Schrodinger,
    #[serde(rename = "jacobi")]
    Jacobi,
    #[serde(rename = "laurent")]
    LaurentGeneral,
}

/// One harmonic `a_k e^{ikθ}` of the corner function of a general Laurent operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierTerm {
    pub k: i64,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument", into = "SpecDocument")]
pub struct OperatorSpec {
    kind: OperatorKind,
    v: Vec<f64>,
    a: Vec<f64>,
    fourier: Vec<FourierTerm>,
    tail_bound: f64,
}

impl OperatorSpec {
    pub fn schrodinger(v: Vec<f64>) -> Result<Self> {
        let a = vec![1.0; v.len()];
        Self::build(OperatorKind::Schrodinger, v, a, Vec::new(), 0.0)
    }

    pub fn jacobi(v: Vec<f64>, a: Vec<f64>) -> Result<Self> {
        Self::build(OperatorKind::Jacobi, v, a, Vec::new(), 0.0)
    }

    /// A general block Laurent operator with corner function `Σ a_k e^{ikθ}`.
    ///
    /// Sortedness of `v` is not required here: it is a hypothesis of the
    /// forward theorem and is checked by the symbol and the checker.
    pub fn laurent(v: Vec<f64>, fourier: Vec<FourierTerm>) -> Result<Self> {
        let a = vec![1.0; v.len()];
        Self::build(OperatorKind::LaurentGeneral, v, a, fourier, 0.0)
    }

    /// Records a bound on `|Σ_{|k|>K} a_k|` for a truncated Fourier tail.
    pub fn with_tail_bound(mut self, tail_bound: f64) -> Result<Self> {
        if !(tail_bound.is_finite() && tail_bound >= 0.0) {
            return Err(Error::InvalidSpec(format!("tail bound {tail_bound} must be finite and >= 0")));
        }
        if self.kind != OperatorKind::LaurentGeneral && tail_bound > 0.0 {
            return Err(Error::InvalidSpec("a tail bound only applies to laurent operators".into()));
        }
        self.tail_bound = tail_bound;
        Ok(self)
    }

    fn build(kind: OperatorKind, v: Vec<f64>, a: Vec<f64>, fourier: Vec<FourierTerm>, tail_bound: f64) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::InvalidSpec("period must be at least 1".into()));
        }
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidSpec(format!("potential entry {x} is not finite")));
        }
        if a.len() != v.len() {
            return Err(Error::InvalidSpec(format!("expected {} off-diagonal coefficients, got {}", v.len(), a.len())));
        }
        match kind {
            OperatorKind::Jacobi => {
                if let Some(x) = a.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                    return Err(Error::InvalidSpec(format!("jacobi coefficients must be positive, found {x}")));
                }
            }
            OperatorKind::Schrodinger | OperatorKind::LaurentGeneral => {
                if a.iter().any(|&x| x != 1.0) {
                    return Err(Error::InvalidSpec(format!("{kind:?} operators have unit off-diagonals")));
                }
            }
        }
        if kind != OperatorKind::LaurentGeneral && !fourier.is_empty() {
            return Err(Error::InvalidSpec("fourier terms only apply to laurent operators".into()));
        }
        if let Some(t) = fourier.iter().find(|t| !t.coefficient.is_finite()) {
            return Err(Error::InvalidSpec(format!("fourier coefficient for k={} is not finite", t.k)));
        }
        let spec = OperatorSpec { kind, v, a, fourier, tail_bound: 0.0 };
        if tail_bound != 0.0 {
            spec.with_tail_bound(tail_bound)
        } else {
            Ok(spec)
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn period(&self) -> usize {
        self.v.len()
    }

    pub fn potential(&self) -> &[f64] {
        &self.v
    }

    /// Off-diagonal coefficients `a_1..a_p` (all ones unless the operator is Jacobi).
    pub fn couplings(&self) -> &[f64] {
        &self.a
    }

    pub fn fourier(&self) -> &[FourierTerm] {
        &self.fourier
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// `Σ |a_k|` over the supplied Fourier terms.
    pub fn fourier_l1(&self) -> f64 {
        self.fourier.iter().map(|t| t.coefficient.abs()).sum()
    }

    /// Potential value `v_n` for any integer site (1-based, periodic).
    pub fn v_at(&self, n: i64) -> f64 {
        self.v[periodic_index(n, self.period())]
    }

    /// Coupling `a_n` for any integer site (1-based, periodic).
    pub fn a_at(&self, n: i64) -> f64 {
        self.a[periodic_index(n, self.period())]
    }

    pub fn potential_sorted(&self) -> bool {
        self.v.windows(2).all(|w| w[0] <= w[1])
    }

    /// The same operator with its period origin moved by `shift` sites.
    pub fn rotated(&self, shift: usize) -> Result<Self> {
        if self.kind == OperatorKind::LaurentGeneral {
            return Err(Error::Unsupported("laurent operators have a single symbol".into()));
        }
        let p = self.period();
        let mut v = self.v.clone();
        let mut a = self.a.clone();
        v.rotate_left(shift % p);
        a.rotate_left(shift % p);
        Ok(OperatorSpec { v, a, ..self.clone() })
    }
}

/// Maps a 1-based periodic site index onto `0..p`.
pub(crate) fn periodic_index(n: i64, p: usize) -> usize {
    (n - 1).rem_euclid(p as i64) as usize
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecDocument {
    kind: OperatorKind,
    period: usize,
    v: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    fourier: Vec<(i64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail_bound: Option<f64>,
}

impl TryFrom<SpecDocument> for OperatorSpec {
    type Error = Error;

    fn try_from(doc: SpecDocument) -> Result<Self> {
        if doc.period != doc.v.len() {
            return Err(Error::InvalidSpec(format!(
                "period {} does not match {} potential entries",
                doc.period,
                doc.v.len()
            )));
        }
        let a = doc.a.unwrap_or_else(|| vec![1.0; doc.v.len()]);
        let fourier = doc.fourier.into_iter().map(|(k, coefficient)| FourierTerm { k, coefficient }).collect();
        Self::build(doc.kind, doc.v, a, fourier, doc.tail_bound.unwrap_or(0.0))
    }
}

impl From<OperatorSpec> for SpecDocument {
    fn from(spec: OperatorSpec) -> Self {
        SpecDocument {
            kind: spec.kind,
            period: spec.v.len(),
            a: (spec.kind == OperatorKind::Jacobi).then(|| spec.a.clone()),
            v: spec.v,
            fourier: spec.fourier.iter().map(|t| (t.k, t.coefficient)).collect(),
            tail_bound: (spec.tail_bound > 0.0).then_some(spec.tail_bound),
        }
    }
}

impl std::str::FromStr for OperatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
