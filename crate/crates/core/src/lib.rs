//! Spectra and pseudospectra of periodic self-adjoint operators on `ℓ²(ℤ)`,
//! computed from their `p × p` matrix-valued symbols, with numerical checks
//! of Borg-type theorems.
//!
//! ```
//! use borg_spectra::{gap_report, pseudospectrum_intervals, spectrum, OperatorSpec};
//!
//! let spec = OperatorSpec::schrodinger(vec![1.0, 1.1, 1.2, 1.3, 1.4]).unwrap();
//! let s = spectrum(&spec, 1024).unwrap();
//! assert!(!gap_report(&s).connected);
//! let fat = pseudospectrum_intervals(&s, 0.2).unwrap();
//! assert!(gap_report(&fat).connected);
//! ```

pub mod borg;
pub mod eig;
pub mod error;
pub mod mathieu;
pub mod operator;
pub mod oracle;
pub mod spectra;
pub mod symbols;

pub use borg::{best_constant, check_converse, check_forward, BorgReport, BorgTheorem};
pub use error::{Error, Result};
pub use operator::{FourierTerm, OperatorKind, OperatorSpec};
pub use spectra::{
    band_table, gap_report, hausdorff_distance, pseudospectrum_intervals, spectrum, BandTable, Gap, GapReport,
    Interval, RealSpectrum, DEFAULT_GRID,
};
pub use symbols::{symbol, SymbolMatrix};

/// Library version embedded in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// The guide's and README's Rust snippets run as doc-tests, one module per file.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/symbols.md")]
    mod symbols {}
    #[doc = include_str!("../../../book/src/spectra.md")]
    mod spectra {}
    #[doc = include_str!("../../../book/src/borg.md")]
    mod borg {}
    #[doc = include_str!("../../../book/src/mathieu.md")]
    mod mathieu {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
