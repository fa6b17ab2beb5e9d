//! Rational-function operator theory in floating point.
//!
//! A rational function `r = p/q` of degree `N` acts on analytic functions
//! through the generalized backward shift
//!
//! ```text
//! (R_α f)(z) = f(z)/(r(z) − α) − Σ f(w_n) / (r'(w_n)(z − w_n)),   r(w_n) = α
//! ```
//!
//! The crate builds the state space spanned by the divided differences of
//! `r`, realizes it as `Z_r(z) = G(I − (z−a)T)^{-1}`, and exposes the
//! identities tying these objects together as computations that return
//! residuals.
//!
//! * [`polyrat`]: polynomials, rational functions, roots, fibers.
//! * [`statespace`]: realizations and the basis row `Z_r`.
//! * [`resolvent`]: `R_α`, its identities, eigenfunctions, the model operator.
//! * [`symmat`]: the associated symmetric matrix `X(J, r)`.
//! * [`representation`]: `f = (Z_r ⊗ I) F∘r` by contour quadrature.
//! * [`cuntz`]: the weighted composition operators and their relations.
//! * [`kernels`]: reproducing kernels, the Stein equation, de Branges splits.

pub mod cuntz;
pub mod error;
pub mod json;
pub mod kernels;
pub mod linalg;
pub mod polyrat;
pub mod representation;
pub mod resolvent;
pub mod statespace;
pub mod symmat;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

/// `re + i·im`.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
