//! Complex numbers with a detached binary exponent.
//!
//! Coefficients of the formal solutions for Cremer-like rotations grow like
//! `exp(c m log m)`, far past the range of `f64`. [`ScaledComplex`] keeps the
//! mantissa modulus in `[1, 2)` and carries the scale in an `i64` exponent.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::scalar::{pow2, Real};

/// Smallest magnitude (as a base-2 logarithm) that comparisons distinguish from zero.
pub const COMPARISON_FLOOR_LOG2: i64 = -1000;

#[derive(Clone, Copy, PartialEq)]
pub struct ScaledComplex<T> {
    mantissa: Complex<T>,
    exponent: i64,
}

impl<T: Real> ScaledComplex<T> {
    /// `mantissa * 2^exponent`, renormalized.
    pub fn new(mantissa: Complex<T>, exponent: i64) -> Self {
        normalize(mantissa, exponent)
    }

    pub fn from_complex(z: Complex<T>) -> Self {
        normalize(z, 0)
    }

    pub fn from_real(x: T) -> Self {
        normalize(Complex::new(x, T::zero()), 0)
    }

    pub fn mantissa(&self) -> Complex<T> {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// Value as a plain complex number (may overflow to infinity or underflow to zero).
    pub fn to_complex(&self) -> Complex<T> {
        if self.is_zero() {
            return Complex::zero();
        }
        // Split the scaling so a representable result is never lost to an
        // out-of-range intermediate power.
        let half = self.exponent / 2;
        self.mantissa * pow2::<T>(half) * pow2::<T>(self.exponent - half)
    }

    /// `log2 |self|`; negative infinity for zero.
    pub fn log2_abs(&self) -> T {
        if self.is_zero() {
            return T::neg_infinity();
        }
        T::from_i64(self.exponent).unwrap() + self.mantissa.norm().log2()
    }

    /// `ln |self|`; negative infinity for zero.
    pub fn ln_abs(&self) -> T {
        self.log2_abs() * T::LN_2()
    }

    /// `|self|` as a scaled real.
    pub fn abs(&self) -> Self {
        Self::from_parts_unchecked(Complex::new(self.mantissa.norm(), T::zero()), self.exponent).renormalized()
    }

    pub fn conj(&self) -> Self {
        Self::from_parts_unchecked(self.mantissa.conj(), self.exponent)
    }

    pub fn recip(&self) -> Self {
        normalize(self.mantissa.inv(), -self.exponent)
    }

    pub fn scale_pow2(&self, e: i64) -> Self {
        if self.is_zero() {
            *self
        } else {
            Self::from_parts_unchecked(self.mantissa, self.exponent + e)
        }
    }

    pub fn scale(&self, c: T) -> Self {
        normalize(self.mantissa * c, self.exponent)
    }

    pub fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        let mut base = *self;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    /// Equality within `rel` times the larger modulus, with an absolute floor of `2^-1000`.
    pub fn approx_eq(&self, other: &Self, rel: T) -> bool {
        let diff = (*self - *other).log2_abs();
        if diff < T::from_i64(COMPARISON_FLOOR_LOG2).unwrap() {
            return true;
        }
        let scale = self.log2_abs().max(other.log2_abs());
        diff <= scale + rel.log2()
    }

    fn from_parts_unchecked(mantissa: Complex<T>, exponent: i64) -> Self {
        Self { mantissa, exponent }
    }

    fn renormalized(self) -> Self {
        normalize(self.mantissa, self.exponent)
    }
}

fn normalize<T: Real>(m: Complex<T>, e: i64) -> ScaledComplex<T> {
    let r = m.norm();
    if r == T::zero() {
        return ScaledComplex::zero();
    }
    debug_assert!(r.is_finite(), "non-finite mantissa {m:?}");
    let mut shift = r.log2().floor().to_i64().unwrap_or(0);
    let mut mant = m * pow2::<T>(-shift);
    // log2 rounding can leave the modulus a hair outside [1, 2).
    let two = T::one() + T::one();
    let mut norm = mant.norm();
    while norm >= two {
        mant = mant / two;
        norm = norm / two;
        shift += 1;
    }
    while norm < T::one() {
        mant = mant * two;
        norm = norm * two;
        shift -= 1;
    }
    ScaledComplex {
        mantissa: mant,
        exponent: e + shift,
    }
}

impl<T: Real> Zero for ScaledComplex<T> {
    fn zero() -> Self {
        Self {
            mantissa: Complex::zero(),
            exponent: 0,
        }
    }

    fn is_zero(&self) -> bool {
        self.mantissa.re == T::zero() && self.mantissa.im == T::zero()
    }
}

impl<T: Real> One for ScaledComplex<T> {
    fn one() -> Self {
        Self {
            mantissa: Complex::one(),
            exponent: 0,
        }
    }
}

impl<T: Real> Add for ScaledComplex<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.exponent >= rhs.exponent {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = big.exponent - small.exponent;
        if gap > T::MANTISSA_BITS as i64 + 2 {
            return big;
        }
        normalize(big.mantissa + small.mantissa * pow2::<T>(-gap), big.exponent)
    }
}

impl<T: Real> Sub for ScaledComplex<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Real> Neg for ScaledComplex<T> {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl<T: Real> Mul for ScaledComplex<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        normalize(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl<T: Real> Div for ScaledComplex<T> {
    type Output = Self;

    /// Division by zero yields a NaN mantissa; callers check divisors first.
    fn div(self, rhs: Self) -> Self {
        if rhs.is_zero() {
            return Self {
                mantissa: Complex::new(T::nan(), T::nan()),
                exponent: 0,
            };
        }
        if self.is_zero() {
            return Self::zero();
        }
        normalize(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl<T: Real> AddAssign for ScaledComplex<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<T: Real> SubAssign for ScaledComplex<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<T: Real> MulAssign for ScaledComplex<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<T: Real> From<Complex<T>> for ScaledComplex<T> {
    fn from(z: Complex<T>) -> Self {
        Self::from_complex(z)
    }
}

impl<T: fmt::Debug> fmt::Debug for ScaledComplex<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?} + {:?}i) * 2^{}",
            self.mantissa.re, self.mantissa.im, self.exponent
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type S = ScaledComplex<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn normalization_invariant() {
        for &(re, im) in &[(1.0, 0.0), (3.0, 4.0), (1e-300, 0.0), (0.0, -7e250), (1.999, 0.0)] {
            let s = S::from_complex(c(re, im));
            let r = s.mantissa().norm();
            assert!((1.0..2.0).contains(&r), "{re} {im} -> {r}");
            assert!((s.to_complex() - c(re, im)).norm() <= 1e-15 * c(re, im).norm());
        }
        let z = S::from_complex(c(0.0, 0.0));
        assert_eq!(z.exponent(), 0);
        assert!(z.is_zero());
    }

    #[test]
    fn survives_far_outside_f64_range() {
        let big = S::from_real(1e300);
        let huge = big * big * big;
        assert!((huge.log2_abs() - 3.0 * 1e300f64.log2()).abs() < 1e-9);
        let back = huge / big / big;
        assert!(back.approx_eq(&big, 1e-14));
        assert!(huge.to_complex().re.is_infinite());
    }

    #[test]
    fn addition_drops_negligible_terms() {
        let a = S::from_real(1.0).scale_pow2(200);
        let b = S::from_real(1.0);
        assert_eq!(a + b, a);
        assert_eq!((a - a).exponent(), 0);
        assert!((a - a).is_zero());
    }

    #[test]
    fn log_and_powers() {
        let two = S::from_real(2.0);
        assert_eq!(two.powu(1000).log2_abs(), 1000.0);
        assert!((S::from_real(10.0).ln_abs() - 10f64.ln()).abs() < 1e-15);
        assert_eq!(S::zero().log2_abs(), f64::NEG_INFINITY);
        assert!((S::from_complex(c(0.0, 2.0)).recip().to_complex() - c(0.0, -0.5)).norm() < 1e-16);
    }

    #[test]
    fn comparison_floor() {
        let tiny = S::from_real(1.0).scale_pow2(-1100);
        assert!(tiny.approx_eq(&S::zero(), 1e-300));
        assert!(!S::from_real(1.0).approx_eq(&S::from_real(1.0 + 1e-10), 1e-12));
        assert!(S::from_real(1.0).approx_eq(&S::from_real(1.0 + 1e-13), 1e-12));
    }

    #[test]
    fn division_by_zero_is_nan() {
        let q = S::one() / S::zero();
        assert!(q.mantissa().re.is_nan());
    }

    #[test]
    fn single_precision_instance() {
        let a = ScaledComplex::<f32>::from_complex(Complex::new(3.0f32, 4.0));
        let b = a * a * a * a;
        assert!((b.log2_abs() - 4.0 * 5f32.log2()).abs() < 1e-5);
        let huge = ScaledComplex::<f32>::from_real(1e30).powu(10);
        assert!((huge.log2_abs() - 300.0 * 10f32.log2()).abs() < 1e-2);
    }
}
