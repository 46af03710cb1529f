//! Rotation numbers and small-divisor arithmetic.
//!
//! `k theta mod 1` is computed exactly in multiword fixed point; divisors
//! `|lambda^k - 1|` come from `2 |sin(pi x)|` on the reduced fraction, never
//! from `lambda^k` itself.

mod fixed;
mod rotation;
mod table;

pub use fixed::FixedFrac;
pub use rotation::{
    double_exponential_growth, liouville_quotients, Multiples, Quotient, RotationNumber,
    RotationSource, RotationSpec, DEFAULT_FRAC_BITS, DEFAULT_QUOTIENT_DEPTH, FRAC_BITS_CEILING,
};
pub use table::{
    divisor_table, twice_half_turn_sine, unit_minus_one, unit_power, DivisorTable,
};
