//! Normalization of the fiber map near the invariant fiber: base
//! linearization, invariant curve, linear gauge, order bumps, and the
//! constant-coefficient reduction of the parabolic jet.

mod base;
mod lemmas;
mod normal;

pub use base::{base_residual, linearize_base, pull_back_base};
pub use lemmas::{solve_invariant_curve, solve_linear_gauge, solve_order_bump, PRECONDITION_TOL};
pub use normal::{
    normalize, normalize_with_base, parabolic_order, reduce_parabolic_tail, ChangeLog, NormalForm, StageReport,
    ORDER_DETECTION_TOL,
};
