//! Spectral renormalization group on truncated bosonic Fock spaces.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: momentum grids, occupation bases, ladder operators, `H_f`, the
//!   dilation generator `B` and the weights `<B>^-θ`.
//! - [`kernel`]: Wick kernels `w_{m,n}`, their norms, assembly into operators and
//!   extraction back out of them.
//! - [`feshbach`]: the smooth Feshbach-Schur map and its isospectrality checks.
//! - [`rg`]: the renormalization map, flows, contraction audits and ground-state
//!   energy bisection.
//! - [`models`]: the Nelson-type toy model and its initial decimation.
//! - [`verify`]: exact diagonalization and the resolvent, decay and Mourre scans.

pub mod error;
pub mod feshbach;
pub mod fock;
pub mod kernel;
pub mod linalg;
pub mod models;
pub mod rg;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fock-space.md")]
    mod fock_space {}
    #[doc = include_str!("../../../book/src/wick-kernels.md")]
    mod wick_kernels {}
    #[doc = include_str!("../../../book/src/feshbach.md")]
    mod feshbach {}
    #[doc = include_str!("../../../book/src/renormalization.md")]
    mod renormalization {}
    #[doc = include_str!("../../../book/src/nelson.md")]
    mod nelson {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
}
