//! Exact symbolic engine for odd Poisson geometry.
//!
//! * [`graded`]: free graded-commutative polynomials over the rationals.
//! * [`poisson`]: odd Poisson structures as odd quadratic functions on the
//!   cotangent bundle, derived brackets and the master equation.
//! * [`deformed`]: the filtered noncommutative algebra of forms determined
//!   by `[f, dg] = {f, g}`, as a normal-ordering rewriting system.
//! * [`bv`]: the BV operator on semidensities, δ-densities of linear
//!   Lagrangians, pairings and composition of Lagrangian kernels.
//! * [`examples`]: worked models (crossed products, contractions on forms,
//!   odd Fourier transform, pair groupoid).
//! * [`suites`]: randomized verification suites returning pass/fail reports.
//! * [`defs`]: the plain-text definition-file format.

#![allow(clippy::needless_range_loop)]

pub mod bv;
pub mod deformed;
pub mod defs;
pub mod error;
pub mod examples;
pub mod graded;
pub mod linalg;
pub mod poisson;
pub mod rational;
pub mod report;
pub mod suites;
pub mod testing;

pub use error::{Error, Result};
pub use graded::{Monomial, Parity, Role, Substitution, SuperPolynomial, TableRef, VarTable, Variable};
pub use rational::Q;
