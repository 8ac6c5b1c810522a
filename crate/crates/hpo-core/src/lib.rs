//! Continuous-time history algebras on finite lattices.
//!
//! The crate realizes, at desk scale, the operator structures of
//! continuous-time consistent-histories quantum mechanics:
//!
//! - [`lattice`]: discretized time and spacetime grids, test functions,
//!   and spectral calculus of functions of differential operators;
//! - [`quadratic`]: an exact symbolic algebra of normal-ordered operators
//!   of degree at most two in bosonic modes, closed under commutators and
//!   conjugation by Gaussian unitaries;
//! - [`oscillator`]: the history operators of the harmonic oscillator
//!   (smeared position/momentum, time-averaged energies, angular momenta,
//!   velocity-extended energies) expressed as quadratic operators;
//! - [`qft`]: the same constructions for a free scalar field on a 4D grid;
//! - [`fock`]: truncated occupation-number Fock spaces, numerical matrices
//!   of quadratic operators, n-particle and coherent vectors;
//! - [`histories`]: class operators, the decoherence functional, and
//!   tensor-product history projectors on finite time grids.
//!
//! The crate is `no_std` (with `alloc`); all IO, configuration and
//! reporting lives in the companion `hpo-verify` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod error;
pub mod fock;
pub mod histories;
pub mod lattice;
pub mod linalg;
pub mod oscillator;
pub mod qft;
pub mod quadratic;

pub use error::HpoError;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Result alias over [`HpoError`].
pub type Result<T> = core::result::Result<T, HpoError>;
