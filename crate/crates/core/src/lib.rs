//! Solvers for planar nonlinear Beltrami and Leray-Lions equations, the field conversions
//! between them, and probes measuring the regularity of their solutions.

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod fields;
pub mod grid;
pub mod numeric;
pub mod probes;
pub mod report;
pub mod solvers;
pub mod transforms;

pub use error::{Error, Result};
pub use grid::{ComplexGrid, Jet2};
pub use num_complex::Complex64;
