//! Jet space Carnot groups `J^k(ℝⁿ)`, biLipschitz sphere embeddings into
//! them, and the Lipschitz-form obstruction integral that rules out
//! Lipschitz extensions of those embeddings to the ball.
//!
//! Modules, bottom-up:
//!
//! - [`multiindex`]: multi-index enumeration and dense coordinate layouts.
//! - [`jetgroup`]: group law, inverse, dilations, homogeneous norm, box
//!   quasi-metric, contact forms.
//! - [`taylor`]: truncated Taylor arithmetic on expression trees.
//! - [`embeddings`]: the circle and sphere embeddings and the auxiliary maps
//!   (polar lift, cube-to-ball map, cylinder map).
//! - [`metrics`]: segment-lift Lipschitz bounds and sampled distortion scans.
//! - [`checks`]: randomized property suites shared by the CLI and tests.
//! - [`forms`]: Gauss–Legendre integration of `dg₁∧⋯∧dg_{n+1}` over the cube
//!   and its boundary, the obstruction integral and its scaling law, and the
//!   comass check.

// `!(x <= y)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod checks;
pub mod embeddings;
pub mod error;
pub mod forms;
pub mod jetgroup;
pub mod metrics;
pub mod multiindex;
pub mod taylor;

pub use error::{Error, Result};
pub use jetgroup::{
    box_distance, compose, dilate, homogeneous_norm, inverse, GroupParams, JetPoint,
};
pub use multiindex::MultiIndex;
pub use taylor::{jet_eval, jet_to_point, SmoothExpr, TruncatedJet};
