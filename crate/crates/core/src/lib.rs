//! Digit spectra: correlations of strongly b-multiplicative functions along
//! squares.
//!
//! The crate is organised bottom-up:
//!
//! * [`digitcore`]: base-b digits, exact circle angles, and strongly
//!   b-multiplicative functions `g` with `|g| = 1`, together with the
//!   two-scale products `f(n) = g(Pn) · conj(g(Qn))` and their digit
//!   truncations.
//! * [`sieve`]: segmented Möbius sieve and small prime utilities.
//! * [`pairgraph`]: the digraph on pairs `(i, j)` of carry states generated
//!   by `(i, j) -> (⌊(i + rP)/b⌋, ⌊(j + rQ)/b⌋)`, its distinguished component
//!   `C`, and path-count checks.
//! * [`transfer`]: Fourier coefficient averages of `f` over `u < b^λ`, the
//!   transfer matrices that propagate them between digit scales, certified
//!   sup-norm bounds for matrix products, and exponential decay profiles.
//! * [`correlation`]: long partial sums (Möbius-twisted, two-prime
//!   correlations, linear twists), carry-mismatch counting, and block
//!   statistics of the Thue-Morse sequence along squares.
//!
//! Floating-point kernels are generic over the [`scalar::Scalar`] trait
//! (any `num_traits` float: `f32`, `f64`); angle bookkeeping that must be
//! exact is done in reduced fractions of a turn, see
//! [`digitcore::Angle`].

pub mod correlation;
pub mod digitcore;
pub mod error;
pub mod pairgraph;
pub mod scalar;
pub mod sieve;
pub mod transfer;

pub use error::{Error, Result};

/// Default floating scalar used by the command line tools and reports.
pub type Real = f64;

/// Complex number over the default scalar.
pub type Cplx = num_complex::Complex<Real>;
