//! Elliptically polarized coherent states of the two-dimensional isotropic
//! harmonic oscillator.
//!
//! The library constructs the states, evolves them, and cross-checks every
//! closed-form result (wavefunctions, overlaps, packet moments, uncertainty
//! products, ladder-operator relations) against independent brute-force
//! oracles: Fock-series summation, polar grid quadrature, and
//! finite-difference operators.
//!
//! All quantities are in oscillator units (`M = omega = hbar = 1`). Every
//! function is pure; grids and fields are immutable once built, so everything
//! is safe to use from multiple threads.

pub mod contour;
pub mod dynamics;
pub mod error;
pub mod fock;
pub mod grid;
pub mod polar_ops;
pub mod special;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use state::{Chirality, CoherentParams, PolarPoint};
