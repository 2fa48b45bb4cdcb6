//! Exact computer algebra for Weyl-Moyal star products on a flat cone
//! and their reduction to the symplectic quotient.
//!
//! The crate is organized bottom-up:
//! - [`scalar`], [`poly`], [`laurent`], [`series`]: exact rational,
//!   polynomial, Laurent-in-H and truncated-series arithmetic;
//! - [`model`], [`frame`]: the flat cone model and its verified
//!   structure equations;
//! - [`moyal`]: the Weyl-Moyal star product and its derivations;
//! - [`koszul`]: classical and quantum Koszul reduction, ideals,
//!   module structures and the reduced star product;
//! - [`closedform`]: the second-order operator, derived curvature
//!   scalars, the closed-form recursion and the second-order theorems;
//! - [`chart`]: chart-level symbol calculus (symmetrized covariant
//!   derivatives, curvature, ordered quantizations, formal adjoints);
//! - [`expr`], [`samples`], [`report`], [`verify`]: input parsing,
//!   seeded sample generation and the verification suites.

pub mod error;
pub mod scalar;
pub mod poly;
pub mod laurent;
pub mod series;
pub mod model;
pub mod frame;
pub mod moyal;
pub mod koszul;
pub mod closedform;

pub use error::{Error, Result};
