//! Numerical laboratory for Laplace(-Beltrami and p-Laplace) eigenfunctions
//! on model domains: spectra, nodal decompositions, superlevel-set volumes,
//! rearrangement machinery, and the explicit reverse Hölder / isoperimetric
//! bound checks built on top of them.

pub mod bounds;
pub mod error;
pub mod nodal;
pub mod plap;
pub mod rearrange;
pub mod specfun;
pub mod spectra;

pub use error::{Error, Result};
