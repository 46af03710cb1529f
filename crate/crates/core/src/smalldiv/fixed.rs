//! Multiword binary fractions in `[0, 1)`.
//!
//! A [`FixedFrac`] stores `x = n / 2^(64 L)` with `n` held as `L` little-endian
//! limbs. Addition wraps modulo one, which is exactly what reduction of
//! `k * theta` modulo one needs.

use std::cmp::Ordering;

use num_bigint::BigUint;

use crate::scalar::{pow2, Real};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FixedFrac {
    limbs: Vec<u64>,
}

impl FixedFrac {
    pub fn zero(frac_bits: u32) -> Self {
        Self {
            limbs: vec![0; limb_count(frac_bits)],
        }
    }

    /// Builds `floor(n) / 2^frac_bits`, reducing `n` modulo `2^frac_bits`.
    pub fn from_scaled_integer(n: &BigUint, frac_bits: u32) -> Self {
        let count = limb_count(frac_bits);
        let mut limbs: Vec<u64> = n.iter_u64_digits().take(count).collect();
        limbs.resize(count, 0);
        Self { limbs }
    }

    pub fn to_scaled_integer(&self) -> BigUint {
        let mut bytes = Vec::with_capacity(self.limbs.len() * 8);
        for limb in &self.limbs {
            bytes.extend_from_slice(&limb.to_le_bytes());
        }
        BigUint::from_bytes_le(&bytes)
    }

    pub fn frac_bits(&self) -> u32 {
        (self.limbs.len() * 64) as u32
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// `self + other` modulo one.
    pub fn wrapping_add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_wrapping(other);
        out
    }

    pub fn add_assign_wrapping(&mut self, other: &Self) {
        debug_assert_eq!(self.limbs.len(), other.limbs.len());
        let mut carry = false;
        for (a, &b) in self.limbs.iter_mut().zip(&other.limbs) {
            let (s1, c1) = a.overflowing_add(b);
            let (s2, c2) = s1.overflowing_add(carry as u64);
            *a = s2;
            carry = c1 || c2;
        }
    }

    /// `1 - self` modulo one (so the complement of zero is zero).
    pub fn complement(&self) -> Self {
        let mut limbs: Vec<u64> = self.limbs.iter().map(|l| !l).collect();
        for l in &mut limbs {
            let (s, c) = l.overflowing_add(1);
            *l = s;
            if !c {
                break;
            }
        }
        Self { limbs }
    }

    /// `k * self` modulo one.
    pub fn wrapping_mul_u64(&self, k: u64) -> Self {
        let mut carry: u128 = 0;
        let limbs = self
            .limbs
            .iter()
            .map(|&l| {
                let p = l as u128 * k as u128 + carry;
                carry = p >> 64;
                p as u64
            })
            .collect();
        Self { limbs }
    }

    /// True when `self > 1/2`.
    pub fn above_half(&self) -> bool {
        let top = *self.limbs.last().unwrap_or(&0);
        top > (1 << 63) || (top == 1 << 63 && self.limbs[..self.limbs.len() - 1].iter().any(|&l| l != 0))
    }

    /// Splits the value as `mantissa * 2^exponent` with `mantissa` in `[1/2, 1)`.
    /// Returns `None` for zero.
    pub fn to_scaled<T: Real>(&self) -> Option<(T, i64)> {
        let top = self.limbs.iter().rposition(|&l| l != 0)?;
        let lz = self.limbs[top].leading_zeros();
        let hi = self.limbs[top] << lz;
        let lo = if lz == 0 || top == 0 {
            0
        } else {
            self.limbs[top - 1] >> (64 - lz)
        };
        let window = hi | lo;
        let mantissa = T::from_u64(window).unwrap() * pow2::<T>(-64);
        let exponent = 64 * (top as i64 + 1) - lz as i64 - 64 * self.limbs.len() as i64;
        Some((mantissa, exponent))
    }

    /// Nearest `T` to the fraction; underflows to zero for tiny values.
    pub fn to_real<T: Real>(&self) -> T {
        match self.to_scaled::<T>() {
            Some((m, e)) => m * pow2::<T>(e),
            None => T::zero(),
        }
    }
}

impl PartialOrd for FixedFrac {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FixedFrac {
    fn cmp(&self, other: &Self) -> Ordering {
        self.limbs.iter().rev().cmp(other.limbs.iter().rev())
    }
}

pub(crate) fn limb_count(frac_bits: u32) -> usize {
    (frac_bits as usize).div_ceil(64).max(1)
}
