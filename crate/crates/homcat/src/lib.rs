//! Exact homological algebra over finite linear categories.
//!
//! The crate computes Ext, Tor and Hochschild-style cohomology for modules
//! over finite-dimensional linear categories built from prestacks on a finite
//! base category, and cross-checks the dimensions along several comparison
//! functors (graded bimodules, natural systems, collapsed algebras).

pub mod cat;
pub mod comparison;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod instance;
pub mod lincat;
pub mod natsys;
pub mod prestack;

pub use error::{Error, Result};
