//! Ground-state entanglement of periodic spin-1/2 chains.
//!
//! Two model families are built in: the XX chain with a three-spin chiral
//! term (`xx3`) and the XXZ chain (`xxz`). Nearest-neighbour concurrence and
//! single-site von Neumann entropy are obtained along two independent routes,
//! closed-form thermodynamic-limit expressions ([`analytic`]) and
//! magnetization-sector exact diagonalization ([`ed`]), and parameter sweeps
//! ([`sweep`]) look for slope discontinuities in the resulting curves.

pub mod analytic;
pub mod ed;
pub mod entanglement;
pub mod error;
pub mod observables;
pub mod pauli;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};

pub use num_complex::Complex64;
