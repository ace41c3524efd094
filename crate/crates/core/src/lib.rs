//! Hyperbolic densities on planar domains, Kobayashi distances, and randomized
//! certification of Harnack, Landau and Schottky-type inequalities.

// `!(x > y)` is the NaN-rejecting form throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod certificate;
pub mod dbar;
pub mod error;
pub mod function;
pub mod geometry;
pub mod inequalities;
pub mod kobayashi;
pub mod modular;
pub mod motions;
pub mod quadrature;
pub mod rho01;
pub mod special;

pub use certificate::{Certificate, SlackRecord};
pub use error::{Error, Result};
pub use geometry::{BaseDisk, ComplexPoint, ExtendedPoint, MobiusMap, TangentVector};
pub use num_complex::Complex64;
