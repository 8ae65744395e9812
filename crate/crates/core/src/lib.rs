//! Exact computations in vector lattices of rational functions over a
//! finite atom set: the scalar f-algebra and its Boolean algebra of
//! idempotents, partially ordered modules over it, and the lattice of
//! order-bounded operators between such modules, together with
//! brute-force verification suites that certify every implemented
//! lattice identity by an independent route.
//!
//! All arithmetic is arbitrary-precision rational; order-theoretic
//! assertions are checked with exact equality.

#![forbid(unsafe_code)]

pub mod error;
pub mod falgebra;
pub mod gen;
pub mod operators;
pub mod pomodule;
pub mod rational;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rat;
