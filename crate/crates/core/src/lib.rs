//! Exact symbolic kernel and structure recovery for port-Hamiltonian systems.
//!
//! Everything here is pure and allocation-only; file formats, hashing and the
//! command line live in the `phsify` crate.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod param;
pub mod poly;
pub mod render;
pub mod linalg;
pub mod odedsl;
pub mod depgraph;
pub mod catalog;
pub mod decomposer;
pub mod energy;
pub mod generator;
pub mod graph;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

pub use param::{ParamPoly, ParamScalar};
pub use poly::{gradient, homotopy_integrate, is_closed, KernelError, Monomial, PolyMatrix, PolyVector, Polynomial};
