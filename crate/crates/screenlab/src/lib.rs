//! Variable screening for high-dimensional computer experiments (p > n).
//!
//! The library fits best linear approximations of deterministic simulators,
//! screens active inputs with l0/lasso/marginal methods under linear or
//! quadratic basis transforms, selects the screening size by GCV, and runs
//! seeded coverage-rate benchmarks on a suite of test simulators.

pub mod basis;
pub mod bla;
pub mod core;
pub mod diagnostics;
pub mod experiments;
pub mod modelsel;
pub mod sampling;
pub mod screeners;
pub mod testbed;
