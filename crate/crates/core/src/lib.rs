//! Approximate solutions of the Stokes/Cahn–Hilliard system near its
//! sharp-interface limit, together with the reference solvers used to
//! measure them.
//!
//! The crate is `no_std` (with `alloc`). Everything here is pure
//! computation; file formats and the command line live in `sil-lab`.
//!
//! Module map:
//!
//! - [`profiles`]: the heteroclinic profile, the cutoff `η`, moments, and
//!   the bordered solver for the linearized profile operator.
//! - [`geometry`]: curves, signed distance, tubular charts, surface
//!   operators and the cutoff `ξ`.
//! - [`sharp`]: the radial Mullins–Sekerka problem and its integrator.
//! - [`expansion`]: outer, inner and boundary-layer terms glued into
//!   `(c_A, μ_A, v_A, p_A)`.
//! - [`diffuse`]: radially symmetric implicit Cahn–Hilliard solver.
//! - [`residuals`]: residual evaluation, stratified norms, weak norms and
//!   order fits.

#![cfg_attr(not(any(test, feature = "std")), no_std)]
#![forbid(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod diffuse;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod linalg;
pub mod potential;
pub mod profiles;
pub mod quad;
pub mod residuals;
pub mod sharp;
pub mod vec2;

pub use error::{Error, Result};
pub use potential::DoubleWell;
pub use vec2::Vec2;
