//! Stochastic geodesics: diffusions on Riemannian manifolds and Lie groups that
//! are critical points of a regularized kinetic energy functional.
//!
//! The crate is organized around five layers:
//!
//! - [`geometry`]: deterministic Riemannian geometry in local charts (metric,
//!   Christoffel symbols, curvature, Ricci, Laplace–Beltrami, geodesics,
//!   parallel transport, classical energy).
//! - [`frame_bundle`]: stochastic development on the orthonormal frame bundle,
//!   Itô parallel transport along sample paths, and the variation process of
//!   a perturbed driving noise.
//! - [`variational`]: anti-development, the generalized forward derivative,
//!   stochastic kinetic energy, the drift PDE residual, a backward Burgers
//!   solver on the flat circle, and the Monte Carlo first-variation test.
//! - [`lie_group`]: left-invariant geometry from structure constants, the
//!   group-valued SDE, the stochastic Euler–Poincaré equation, and the group
//!   energy/first-variation estimators.
//! - [`fbsde`]: the forward-backward characterization of critical drifts,
//!   solved by Picard iteration with regression-based conditional
//!   expectations.
//!
//! The crate is `no_std` (with `alloc`): all operations are pure functions of
//! their inputs and safe to call concurrently. IO, file formats, and the
//! experiment CLI live in the companion `stogeo` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod fbsde;
pub mod frame_bundle;
pub mod geometry;
pub mod lie_group;
pub mod stats;
pub mod variational;

mod fft;
mod tensor;

pub use error::{Error, Result};
pub use tensor::{Rank3, Rank4};

/// Convenience alias used throughout: dynamically-sized column vector of `f64`.
pub type DVec = nalgebra::DVector<f64>;
/// Convenience alias used throughout: dynamically-sized matrix of `f64`.
pub type DMat = nalgebra::DMatrix<f64>;
