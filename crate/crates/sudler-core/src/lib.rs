//! High-precision evaluation of Sudler sine products for quadratic irrationals.
//!
//! This crate computes the trigonometric products
//!
//! ```text
//! P_n(α) = ∏_{r=1}^{n} |2 sin πrα|,      Q_n(α) = P_{q_n}(α),
//! ```
//!
//! where `q_n` are the best approximation denominators of an irrational `α`
//! with an eventually periodic continued fraction expansion. For a purely
//! periodic expansion of period `ℓ`, the subsequence `Q_{ℓm+k}(α)` converges
//! for every residue `k` to a positive constant `C_k`. The crate provides
//!
//! * exact continued-fraction machinery: convergents, Ostrowski numeration,
//!   period rotations/reversals and quadratic-surd arithmetic ([`cf`],
//!   [`convergents`], [`ostrowski`], [`surd`]);
//! * the spectral data of the period: `c(α)`, the roots `a`, `b` of
//!   `x² − c(α)x + (−1)^ℓ`, Lehmer-sequence closed forms for `q_n`, and the
//!   per-residue constants `c_k`, `e_k` ([`lehmer`], [`constants`]);
//! * the exact factorization `Q_{ℓm+k} = A_m·B_m·C_m` into a scaled small
//!   sine, a perturbed-to-rational sine ratio product, and a correction
//!   product ([`eval`]);
//! * the limit values `lim A_m`, `lim B_m`, `lim C_m` and their product
//!   `C_k`, with truncation tail bounds ([`limits`]);
//! * scans of `P_n` minima and empirical polynomial envelopes ([`scan`]).
//!
//! All arithmetic that can be exact is exact: identities between convergents
//! are checked in integer arithmetic, and residuals such as
//! `q_nα − p_n − e_k bᵐ` are verified to be identically zero in the quadratic
//! field `ℚ(√(c²+4(−1)^{ℓ−1}))` rather than numerically small. Floating-point
//! evaluation uses arbitrary-precision arithmetic with explicit guard-bit
//! policies throughout.
//!
//! The crate is `no_std`-compatible (requires `alloc`). The `parallel`
//! feature enables multi-threaded product evaluation with a fixed reduction
//! tree, so results are bit-identical with and without it.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod cf;
pub mod constants;
pub mod convergents;
pub mod error;
pub mod eval;
pub mod fixed;
pub mod kernel;
pub mod lehmer;
pub mod limits;
pub mod ostrowski;
pub mod real;
pub mod scan;
pub mod surd;

pub use cf::PeriodicCf;
pub use constants::{PreperiodConstants, SpectralConstants};
pub use convergents::ConvergentTable;
pub use error::Error;
pub use eval::{DecompositionTrace, FracMode, HSplit, PerturbedSineRow};
pub use lehmer::LehmerParams;
pub use limits::LimitReport;
pub use ostrowski::OstrowskiDigits;
pub use real::RealCtx;
pub use scan::ScanResult;
pub use surd::{QuadExt, QuadraticSurd};
/// Result type used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
