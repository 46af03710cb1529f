use std::fmt::{Debug, Display, LowerExp};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the numerics are generic over: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Debug
    + Display
    + LowerExp
    + Default
    + Send
    + Sync
    + 'static
{
    /// Significand width including the implicit bit.
    const MANTISSA_BITS: u32;

    /// Lossy conversion from a literal.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    const MANTISSA_BITS: u32 = f32::MANTISSA_DIGITS;
}

impl Real for f64 {
    const MANTISSA_BITS: u32 = f64::MANTISSA_DIGITS;
}

/// `2^e` in `T`, saturating to zero or infinity outside the representable range.
pub(crate) fn pow2<T: Real>(e: i64) -> T {
    let two = T::one() + T::one();
    let clamped = e.clamp(-4000, 4000) as i32;
    // powi by squaring is exact for powers of two inside the normal range.
    if clamped >= 0 {
        two.powi(clamped)
    } else {
        let half = two.recip();
        half.powi(-clamped)
    }
}
