//! Subordinated Schrödinger operators on finite weighted graphs.

pub mod bernstein;
pub mod check;
pub mod config;
pub mod criticality;
pub mod error;
pub mod hardy;
pub mod krylov;
pub mod lattice;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod runner;
pub mod sparse;
pub mod spectral;
pub mod stats;
pub mod wave;

pub use error::{Error, Result};
