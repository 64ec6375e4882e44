//! Geometry of symmetric positive definite matrices under the S-divergence
//! `S(X, Y) = log det((X+Y)/2) − ½ log det(XY)`.
//!
//! The crate provides validated SPD matrices ([`pd`]), the S-divergence and its
//! companions ([`divergences`]), matrix means ([`means`]), determinant kernels
//! ([`kernels`]), a labeled matrix bundle file format ([`bundle`]) and a randomized
//! verification engine for the inequalities relating all of these ([`laws`]).

pub mod bundle;
pub mod divergences;
mod error;
pub mod kernels;
pub mod laws;
pub mod means;
pub mod pd;

pub use bundle::MatrixBundle;
pub use error::{Error, Result};
pub use pd::SpdMatrix;
