use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};

use super::lambda::LambdaPowers;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaled::{ScaledComplex, COMPARISON_FLOOR_LOG2};

/// Power series in `z` truncated after `z^N`: exactly `N + 1` coefficients.
#[derive(Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<ScaledComplex<T>>,
}

impl<T: Real> TruncatedSeries<T> {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![ScaledComplex::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(order, ScaledComplex::one())
    }

    pub fn constant(order: usize, c: ScaledComplex<T>) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c z^k` (zero when `k > order`).
    pub fn monomial(order: usize, k: usize, c: ScaledComplex<T>) -> Self {
        let mut s = Self::zero(order);
        if k <= order {
            s.coeffs[k] = c;
        }
        s
    }

    pub fn from_scaled(coeffs: Vec<ScaledComplex<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Malformed("a series needs at least one coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    /// Coefficients padded with zeros or cut to the requested order.
    pub fn from_complex(order: usize, coeffs: &[Complex<T>]) -> Self {
        let mut s = Self::zero(order);
        for (slot, &c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = ScaledComplex::from_complex(c);
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[ScaledComplex<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> ScaledComplex<T> {
        self.coeffs.get(n).copied().unwrap_or_else(ScaledComplex::zero)
    }

    pub fn set_coeff(&mut self, n: usize, c: ScaledComplex<T>) {
        self.coeffs[n] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when every coefficient past the constant term vanishes.
    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::TruncationMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect(),
        })
    }

    /// Cauchy product truncated at `z^N`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.order();
        let mut out = vec![ScaledComplex::zero(); n + 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs[..=n - i].iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Ok(Self { coeffs: out })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.order());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).expect("same order");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same order");
            }
        }
        acc
    }

    pub fn neg(&self) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
        }
    }

    pub fn scale(&self, c: ScaledComplex<T>) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    /// `s(lambda^power z)`: coefficient `c_n` times `lambda^(n power)`.
    pub fn rotate(&self, lambda: &LambdaPowers<T>, power: i64) -> Result<Self> {
        let reach = self.order() as u64 * power.unsigned_abs();
        if reach > lambda.max_power() as u64 {
            return Err(Error::Precondition(format!(
                "rotation needs lambda^{reach}, table holds up to lambda^{}",
                lambda.max_power()
            )));
        }
        Ok(Self {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| c * ScaledComplex::from_complex(lambda.signed_power(n as i64 * power)))
                .collect(),
        })
    }

    /// `self(inner(z))` for `inner(0) = 0`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        self.check(inner)?;
        if !inner.coeffs[0].is_zero() {
            return Err(Error::Precondition(
                "inner series of a composition must vanish at 0".into(),
            ));
        }
        let n = self.order();
        let mut acc = Self::zero(n);
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(inner)?;
            acc.coeffs[0] += c;
        }
        Ok(acc)
    }

    /// Multiplicative inverse; the constant term must not vanish.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::Precondition(
                "series with zero constant term has no inverse".into(),
            ));
        }
        let inv0 = c0.recip();
        let n = self.order();
        let mut out = vec![ScaledComplex::zero(); n + 1];
        out[0] = inv0;
        for k in 1..=n {
            let mut acc = ScaledComplex::zero();
            for j in 1..=k {
                acc += self.coeffs[j] * out[k - j];
            }
            out[k] = -(acc * inv0);
        }
        Ok(Self { coeffs: out })
    }

    /// Horner evaluation at a point.
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::zero(), |acc, c| acc * z + c.to_complex())
    }

    /// `log2 max_n |c_n|` (negative infinity for the zero series).
    pub fn max_log2(&self) -> T {
        self.coeffs
            .iter()
            .map(|c| c.log2_abs())
            .fold(T::neg_infinity(), T::max)
    }

    /// `max_n |a_n - b_n| / max(max_n |a_n|, max_n |b_n|)`, zero when both vanish.
    pub fn rel_distance(&self, other: &Self) -> Result<T> {
        let diff = self.sub(other)?.max_log2();
        if diff == T::neg_infinity() {
            return Ok(T::zero());
        }
        let scale = self.max_log2().max(other.max_log2());
        Ok((diff - scale).exp2())
    }

    /// Coefficientwise agreement relative to the larger series, with an absolute
    /// floor of `2^-1000`.
    pub fn approx_eq(&self, other: &Self, rel: T) -> bool {
        let Ok(diff) = self.sub(other) else {
            return false;
        };
        let d = diff.max_log2();
        d < T::from_i64(COMPARISON_FLOOR_LOG2).unwrap()
            || d <= self.max_log2().max(other.max_log2()) + rel.log2()
    }
}

impl<T: fmt::Debug> fmt::Debug for TruncatedSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
