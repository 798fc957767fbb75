//! Truncated Taylor (jet) arithmetic on expression trees.
//!
//! [`jet_eval`] pushes truncated multivariate series through a
//! [`SmoothExpr`]: sums and products act coefficientwise and by truncated
//! Cauchy product, univariate primitives by substituting the argument series
//! into the primitive's own Taylor expansion. Results are reported in the
//! derivative convention `∂_I g(x₀)`, matching jet coordinates `u_I`.

mod expr;
mod series;
mod sexpr;

pub use expr::{jet_eval, jet_to_point, SmoothExpr, TruncatedJet};
pub use series::Series;
pub use sexpr::parse;
