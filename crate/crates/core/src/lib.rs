//! Exact curvature invariants for submodules of weighted polydisc Hilbert
//! modules generated by polynomial ideals.
//!
//! The crate is organised bottom-up:
//!
//! * [`algebra`]: exact rationals, sparse polynomials, truncated series in
//!   `(w, w̄)` and rational matrices.
//! * [`rkhs`]: diagonal reproducing kernels and the kernels of ideal-generated
//!   submodules.
//! * [`ideals`]: ideal descriptions, zero sets, minimality and localization
//!   dimension.
//! * [`frames`]: kernel decomposition frames and their Grammian metrics.
//! * [`curvature`]: line, determinant-bundle and matrix curvature, gauge
//!   action, and a floating finite-difference cross-check.
//! * [`invariants`]: rigidity decisions built on top of the above.

pub mod algebra;
pub mod curvature;
pub mod error;
pub mod frames;
pub mod ideals;
pub mod invariants;
pub mod rkhs;

pub use error::{Error, Result};
