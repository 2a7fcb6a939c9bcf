//! Finite volume solvers for 2D hyperbolic conservation laws (compressible
//! Euler and ideal MHD) built around incomplete Riemann solvers whose
//! numerical viscosity is a polynomial or rational approximation of |A|.
//!
//! The crate provides scalar basis functions approximating |x| on [-1, 1]
//! ([`basis`]), matrix evaluation kernels ([`smallmat`]), the physical models
//! ([`physics`]), one-dimensional edge fluxes ([`flux1d`]), corner fluxes for
//! the truly two-dimensional scheme ([`flux2d`]), the time-stepping driver
//! ([`grid`]), the benchmark problem definitions ([`problems`]) and the
//! command line / file I/O layer ([`cli`]).

pub mod basis;
pub mod cli;
pub mod error;
pub mod flux1d;
pub mod flux2d;
pub mod grid;
pub mod physics;
pub mod problems;
pub mod smallmat;
pub mod state;

pub use error::{Error, Result};
