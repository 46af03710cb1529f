//! Truncated power series in `z`, polynomials in `w` over them, and the
//! fiber changes of coordinates used to normalize a skew-product germ.

mod bivariate;
mod change;
mod germ;
mod lambda;
mod truncated;

pub use change::{conjugate, conjugate_all, residual_invariant_curve, reversion_in_w, FiberChange};
pub use germ::{horner, horner_with_derivative, random_parabolic_germ, CoeffJson, GermSpec, SkewGerm, Truncation, DEFAULT_RADIUS};
pub use lambda::LambdaPowers;
pub use truncated::TruncatedSeries;
