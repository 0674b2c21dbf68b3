//! PhaseLift phase retrieval with measurement vectors drawn from complex
//! projective t-designs.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: complex vectors, Hermitian matrices, Schatten norms and the
//!   tangent space of rank-one projectors.
//! - [`tensor`]: brute-force tensor powers, the symmetrizer and the closed-form
//!   partial traces they are checked against.
//! - [`designs`]: mutually unbiased bases, stabilizer states, projected
//!   (weighted) stabilizer designs, Haar ensembles and frame-potential checks.
//! - [`measurement`]: sampling, the measurement map `A`, the renormalised
//!   operator `R` and its two-fold truncation.
//! - [`solver`]: the lifted convex program solved by Douglas–Rachford splitting.
//! - [`certificate`]: injectivity spectra and approximate dual certificates
//!   built by the golfing scheme.
//! - [`experiments`]: phase diagrams, converse-bound and moment experiments,
//!   with CSV and SVG output.

pub mod certificate;
pub mod designs;
pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod rng;
pub mod solver;
pub mod tensor;

pub use error::{Error, Result};
pub use linalg::{ComplexVec, HermMat, SchattenOrder, C64};
