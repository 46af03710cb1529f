use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaled::ScaledComplex;
use crate::smalldiv::{unit_minus_one, unit_power, RotationNumber};

/// Cached `lambda^j` and `lambda^j - 1` for `0 <= j <= max_power`, all derived
/// from the exact fractional multiples of the rotation number.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPowers<T> {
    rotation: Arc<RotationNumber>,
    powers: Vec<Complex<T>>,
    minus_one: Vec<Option<ScaledComplex<T>>>,
}

impl<T: Real> LambdaPowers<T> {
    pub fn new(rotation: Arc<RotationNumber>, max_power: usize) -> Result<Self> {
        rotation.check_multiples(max_power.max(1) as u64)?;
        let mut powers = Vec::with_capacity(max_power + 1);
        let mut minus_one = Vec::with_capacity(max_power + 1);
        for x in rotation.multiples().take(max_power + 1) {
            powers.push(unit_power(&x));
            minus_one.push(unit_minus_one(&x));
        }
        Ok(Self {
            rotation,
            powers,
            minus_one,
        })
    }

    pub fn shared(rotation: Arc<RotationNumber>, max_power: usize) -> Result<Arc<Self>> {
        Self::new(rotation, max_power).map(Arc::new)
    }

    pub fn rotation(&self) -> &Arc<RotationNumber> {
        &self.rotation
    }

    pub fn max_power(&self) -> usize {
        self.powers.len() - 1
    }

    pub fn lambda(&self) -> Complex<T> {
        self.power(1)
    }

    pub fn power(&self, j: usize) -> Complex<T> {
        self.powers[j]
    }

    /// `lambda^j` for signed `j`; negative powers are conjugates.
    pub fn signed_power(&self, j: i64) -> Complex<T> {
        let p = self.powers[j.unsigned_abs() as usize];
        if j < 0 {
            p.conj()
        } else {
            p
        }
    }

    /// `lambda^p - 1`, `1 <= p <= max_power`.
    pub fn minus_one(&self, p: usize) -> Result<ScaledComplex<T>> {
        self.minus_one[p].ok_or(Error::DegenerateDivisor { multiple: p as u64 })
    }

    /// `lambda^k - lambda = lambda (lambda^{k-1} - 1)`, `2 <= k <= max_power + 1`.
    pub fn minus_lambda(&self, k: usize) -> Result<ScaledComplex<T>> {
        Ok(self.minus_one(k - 1)? * ScaledComplex::from_complex(self.lambda()))
    }
}
