//! Decision procedures for uniform Lyapunov exponents of matrix tuples.
//!
//! A tuple `M = (M_1, ..., M_k)` of real `d x d` matrices has a *uniform
//! Lyapunov exponent modulo 0* when there are constants `C > 0` and `λ` such
//! that every product `M_{i_1} ... M_{i_n}` is either the zero matrix or has
//! norm in `[C^{-1} e^{λn}, C e^{λn}]`.
//!
//! The crate decides this property in two independent ways:
//!
//! * [`ule::criterion_a`] / [`ule::criterion_a_fast`] for positively
//!   irreducible nonnegative tuples, through the Perron data of an averaged
//!   product matrix and its irreducible block decomposition;
//! * [`ule::criterion_b`] for irreducible (or positively irreducible) tuples,
//!   through the affinity test `P(2) + P(6) = 2 P(4)` on the matrix pressure.
//!
//! The supporting kernels live in [`matrix`], [`spectral`], [`graph`],
//! [`linalg`], [`rational`] and [`symdyn`]; the application pipelines
//! (sofic carpets, integral self-affine measures, finite-type self-similar
//! measures) live in [`apps`].
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod apps;
pub mod error;
pub mod exec;
pub mod graph;
pub mod linalg;
pub mod matrix;
pub mod rational;
pub mod spectral;
pub mod symdyn;
pub mod ule;

pub use error::{Error, Result};
pub use matrix::{Mat, MatTuple, Word};
pub use ule::{Decision, UleVerdict};

/// Default relative tolerance used by every numeric decision.
pub const DEFAULT_TOL: f64 = 1e-8;
