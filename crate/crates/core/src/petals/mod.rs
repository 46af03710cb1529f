//! Parabolic local dynamics: petals, orbit classification, slices and the
//! critical-orbit checker.

mod hypotheses;
mod local;
mod orbit;
mod roots;
mod slice;

pub use hypotheses::{critical_orbit_check, CriticalOrbit, HypothesisReport};
pub use local::{
    attracting_directions, attracting_margin, forward_invariance_check, in_attracting_petal, in_repelling_petal,
    repelling_expansion_check, ExpansionReport, InvarianceReport, ParabolicLocal, DEFAULT_ETA, DEFAULT_RHO,
};
pub use orbit::{
    iterate_orbit, parabolic_points, vertical_derivative_sum, Classification, Classifier, FiberPolynomial,
    FiberSchedule, OrbitConfig, OrbitRecord, ParabolicPoint, StopReason, Verdict, VerticalMap,
};
pub use roots::{derivative, polynomial_roots, taylor_shift, Root};
pub use slice::{
    code_color, fatou_slice, Grid, SliceGrid, CODE_ATTRACTING, CODE_ESCAPE, CODE_PARABOLIC, CODE_UNDECIDED,
    CYCLE_COLORS, ESCAPE_COLOR, MAX_RESOLUTION, PETAL_COLORS, UNDECIDED_COLOR,
};
