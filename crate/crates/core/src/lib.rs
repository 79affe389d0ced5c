//! Numerics for the costratified quantum theory of the SU(2) single-plaquette
//! lattice gauge model, together with checkers for the classical stratified
//! Poisson structures it is reduced from.

pub mod characters;
pub mod costratified;
pub mod error;
pub mod geometry;
pub mod mathieu;
pub mod quadrature;
pub mod spectrum;
pub mod theta;
pub mod tridiag;

pub use error::{Error, Result};
