//! Exactly solvable discrete quantum mechanics.
//!
//! Hamiltonians of the form `V(x) e^{γp} + V(x)* e^{-γp} - V(x) - V(x)*`
//! whose eigenfunctions are the Askey-scheme polynomials of the Wilson and
//! Askey-Wilson families. The crate is `no_std` with `alloc`.
//!
//! | module | contents |
//! |---|---|
//! | [`specfun`] | Pochhammer symbols, q-products, complex gamma, hypergeometric sums |
//! | [`family`] | the eleven families: potentials, energies, polynomials, coefficients |
//! | [`operators`] | difference operators acting on analytic functions |
//! | [`quadrature`] | double-exponential and Gauss-Legendre integration, inner products |
//! | [`verify`] | identity checks grouped into suites |
#![no_std]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod dd;
mod error;
pub mod family;
pub mod operators;
pub mod poly;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
pub use family::{FamilyId, ParamSet, System};
pub use num_complex::Complex64 as C64;
pub use poly::{EtaPolynomial, Point};
