//! Lennard-Jones second virial coefficient, its self-similar fixed point,
//! the fugacity scaling map with its exact fixed-point derivative, and the
//! inversion of cluster integrals into virial coefficients.

pub mod balance;
pub mod cli;
pub mod cluster_expansion;
pub mod error;
pub mod lj_virial;
pub mod quadrature;
pub mod roots;
pub mod scaling_map;
pub mod selfsim;
pub mod specfun;

pub use error::{Error, Result};
