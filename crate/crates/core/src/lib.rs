//! Homotopy-invariant iterated integrals on punctured spheres and tori.

pub mod checks;
pub mod error;
pub mod mzv;
pub mod path;
pub mod quadrature;
pub mod regularization;
pub mod series;
pub mod shuffle;
pub mod surface;
pub mod theta;
pub mod transport;
pub mod variation;

pub use error::{Error, Result};
