//! Small divisors, fiber normal forms and parabolic orbit diagnostics for
//! polynomial skew-products `F(z, w) = (lambda z, g_z(w))` near an elliptic
//! invariant fiber.
//!
//! The numerics are generic over the [`Real`] scalar (`f32` or `f64`); the
//! `*F64` aliases below fix the common double-precision instantiation.

pub mod conjugator;
pub mod cremer;
pub mod error;
pub mod petals;
pub mod scalar;
pub mod scaled;
pub mod series;
pub mod smalldiv;

pub use conjugator::{normalize, reduce_parabolic_tail, ChangeLog, NormalForm};
pub use error::{Error, Result};
pub use petals::{OrbitConfig, OrbitRecord, ParabolicLocal, Verdict};
pub use scalar::Real;
pub use scaled::ScaledComplex;
pub use series::{FiberChange, GermSpec, LambdaPowers, SkewGerm, TruncatedSeries};
pub use smalldiv::{divisor_table, DivisorTable, RotationNumber, RotationSpec};

pub type ScaledComplexF64 = ScaledComplex<f64>;
pub type ScaledComplexF32 = ScaledComplex<f32>;
pub type DivisorTableF64 = DivisorTable<f64>;
pub type TruncatedSeriesF64 = TruncatedSeries<f64>;
pub type SkewGermF64 = SkewGerm<f64>;
pub type FiberChangeF64 = FiberChange<f64>;
pub type NormalFormF64 = NormalForm<f64>;
pub type ParabolicLocalF64 = ParabolicLocal<f64>;
pub type OrbitRecordF64 = OrbitRecord<f64>;
