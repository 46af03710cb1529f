use std::io::{self, Write};

use num_complex::Complex;
use num_traits::Zero;

use super::fixed::FixedFrac;
use super::rotation::RotationNumber;
use crate::error::{Error, Result};
use crate::scalar::{pow2, Real};
use crate::scaled::ScaledComplex;

/// Below this reduced argument `sin(pi y)` is taken from its two-term series
/// in scaled form so tiny divisors keep full relative accuracy.
const SERIES_CUTOFF_LOG2: i64 = -24;

/// `2 sin(pi x)` for `x` in `[0, 1)`, as a scaled real; zero when `x = 0`.
///
/// The argument is folded into `[0, 1/2]` with `sin(pi (1 - x)) = sin(pi x)`
/// before conversion, so values near one lose nothing to cancellation.
pub fn twice_half_turn_sine<T: Real>(x: &FixedFrac) -> ScaledComplex<T> {
    let folded = if x.above_half() { x.complement() } else { x.clone() };
    let Some((m, e)) = folded.to_scaled::<T>() else {
        return ScaledComplex::zero();
    };
    let two = T::one() + T::one();
    if e < SERIES_CUTOFF_LOG2 {
        // pi y (1 - (pi y)^2 / 6)
        let py = T::PI() * m;
        let py2 = py * py * pow2::<T>(2 * e);
        let mant = two * py * (T::one() - py2 / T::of(6.0));
        ScaledComplex::new(Complex::new(mant, T::zero()), e)
    } else {
        let y = m * pow2::<T>(e);
        ScaledComplex::from_real(two * (T::PI() * y).sin())
    }
}

/// `lambda^p - 1 = 2 i sin(pi x) exp(i pi x)` where `x = p theta mod 1`; `None` when `x = 0`.
pub fn unit_minus_one<T: Real>(x: &FixedFrac) -> Option<ScaledComplex<T>> {
    let modulus = twice_half_turn_sine::<T>(x);
    if modulus.is_zero() {
        return None;
    }
    let half_turn = T::PI() * x.to_real::<T>();
    let direction = Complex::new(-half_turn.sin(), half_turn.cos());
    Some(modulus * ScaledComplex::from_complex(direction))
}

/// `lambda^p = exp(2 pi i x)` with `x = p theta mod 1`.
pub fn unit_power<T: Real>(x: &FixedFrac) -> Complex<T> {
    let angle = T::TAU() * x.to_real::<T>();
    Complex::new(angle.cos(), angle.sin())
}

/// Small divisors `|lambda^p - 1|`, `|lambda^k - lambda|` and the running
/// minimum `omega(m) = min_{2<=k<=m} |lambda^k - lambda|`, stored as natural logarithms.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisorTable<T> {
    m_max: usize,
    frac_bits: u32,
    /// `ln |lambda^p - 1|` at index `p`; index 0 unused.
    ln_d1: Vec<T>,
    /// `ln omega(m)` at index `m`; indices 0 and 1 unused.
    ln_omega: Vec<T>,
    /// `ln min_{1<=k<=m} |lambda^k - 1|` at index `m`.
    ln_omega_one: Vec<T>,
    /// Running maximum of `(1/m) ln(1/omega(m))`.
    cremer_max: Vec<T>,
}

/// Builds the table for `2 <= m <= m_max`.
///
/// Every multiple `p theta` with `p < m_max` enters `omega`, so an exact zero
/// there is a degenerate divisor. `|lambda^{m_max} - 1|` is recorded even when
/// it vanishes (its logarithm is then negative infinity).
pub fn divisor_table<T: Real>(rot: &RotationNumber, m_max: usize) -> Result<DivisorTable<T>> {
    if m_max < 2 {
        return Err(Error::Precondition(format!("m_max = {m_max} must be at least 2")));
    }
    rot.check_multiples(m_max as u64)?;
    let mut ln_d1 = Vec::with_capacity(m_max + 1);
    ln_d1.push(T::neg_infinity());
    for (p, x) in rot.multiples().enumerate().skip(1).take(m_max) {
        if x.is_zero() && p < m_max {
            return Err(Error::DegenerateDivisor { multiple: p as u64 });
        }
        ln_d1.push(twice_half_turn_sine::<T>(&x).ln_abs());
    }
    Ok(DivisorTable::from_ln_divisors(ln_d1, rot.frac_bits()))
}

impl<T: Real> DivisorTable<T> {
    /// Table from precomputed `ln |lambda^p - 1|`, `p = 1..=m_max` (index 0 ignored).
    pub fn from_ln_divisors(ln_d1: Vec<T>, frac_bits: u32) -> Self {
        let m_max = ln_d1.len() - 1;
        let mut ln_omega = vec![T::infinity(); m_max + 1];
        let mut ln_omega_one = vec![T::infinity(); m_max + 1];
        let mut cremer_max = vec![T::neg_infinity(); m_max + 1];
        if m_max >= 1 {
            ln_omega_one[1] = ln_d1[1];
        }
        for m in 2..=m_max {
            // |lambda^m - lambda| = |lambda^{m-1} - 1|
            ln_omega[m] = ln_omega[m - 1].min(ln_d1[m - 1]);
            ln_omega_one[m] = ln_omega_one[m - 1].min(ln_d1[m]);
            let exponent = -ln_omega[m] / T::from_usize(m).unwrap();
            cremer_max[m] = cremer_max[m - 1].max(exponent);
        }
        Self {
            m_max,
            frac_bits,
            ln_d1,
            ln_omega,
            ln_omega_one,
            cremer_max,
        }
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    /// `|lambda^p - 1|`, `1 <= p <= m_max`.
    pub fn d1(&self, p: usize) -> T {
        self.ln_d1[p].exp()
    }

    pub fn ln_d1(&self, p: usize) -> T {
        self.ln_d1[p]
    }

    /// `|lambda^k - lambda|`, `2 <= k <= m_max`.
    pub fn dlam(&self, k: usize) -> T {
        self.ln_dlam(k).exp()
    }

    pub fn ln_dlam(&self, k: usize) -> T {
        assert!(k >= 2, "dlam is defined for k >= 2");
        self.ln_d1[k - 1]
    }

    /// `omega(m) = min_{2<=k<=m} |lambda^k - lambda|`.
    pub fn omega(&self, m: usize) -> T {
        self.ln_omega(m).exp()
    }

    pub fn ln_omega(&self, m: usize) -> T {
        assert!(m >= 2, "omega is defined for m >= 2");
        self.ln_omega[m]
    }

    /// `min_{1<=k<=m} |lambda^k - 1|`, the variant used with the linear example.
    pub fn omega_one(&self, m: usize) -> T {
        self.ln_omega_one[m].exp()
    }

    pub fn ln_omega_one(&self, m: usize) -> T {
        self.ln_omega_one[m]
    }

    /// Absolute error estimate of `|lambda^p - 1|`: the `p 2^-frac_bits`
    /// argument error times the slope bound `2 pi`, plus a few rounding units.
    pub fn error_bound(&self, p: usize) -> T {
        let argument = T::TAU() * T::from_usize(p).unwrap() * pow2::<T>(-(self.frac_bits as i64));
        argument + T::of(4.0) * T::epsilon() * self.d1(p)
    }

    /// `sum_{k=0}^{K} 2^-k ln(1/omega(2^{k+1}))`.
    pub fn brjuno_partial_sum(&self, k_max: u32) -> Result<T> {
        let top = 1usize
            .checked_shl(k_max + 1)
            .filter(|&m| m <= self.m_max)
            .ok_or_else(|| {
                Error::Precondition(format!(
                    "2^{} exceeds m_max = {}",
                    k_max + 1,
                    self.m_max
                ))
            })?;
        debug_assert!(top <= self.m_max);
        let mut sum = T::zero();
        for k in 0..=k_max {
            let m = 1usize << (k + 1);
            sum += -self.ln_omega[m] * pow2::<T>(-(k as i64));
        }
        Ok(sum)
    }

    /// `(1/m) ln(1/omega(m))`.
    pub fn cremer_exponent(&self, m: usize) -> Result<T> {
        self.check_index(m)?;
        Ok(-self.ln_omega[m] / T::from_usize(m).unwrap())
    }

    /// `max_{2<=j<=m} (1/j) ln(1/omega(j))`.
    pub fn cremer_running_max(&self, m: usize) -> Result<T> {
        self.check_index(m)?;
        Ok(self.cremer_max[m])
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m < 2 || m > self.m_max {
            return Err(Error::Precondition(format!(
                "m = {m} outside 2..={}",
                self.m_max
            )));
        }
        Ok(())
    }

    /// CSV with columns `m, dlam, omega, cremer_exponent` for `m = 2..=m_max`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "m,dlam,omega,cremer_exponent")?;
        for m in 2..=self.m_max {
            writeln!(
                out,
                "{},{:?},{:?},{:?}",
                m,
                self.dlam(m).to_f64_lossy(),
                self.omega(m).to_f64_lossy(),
                (-self.ln_omega[m] / T::from_usize(m).unwrap()).to_f64_lossy()
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_rotation_first_divisor() {
        let half = RotationNumber::from_decimal("0.5").unwrap();
        let t = divisor_table::<f64>(&half, 2).unwrap();
        assert_eq!(t.dlam(2), 2.0);
        assert_eq!(t.omega(2), 2.0);
        assert_eq!(t.d1(2), 0.0);
        assert!(matches!(
            divisor_table::<f64>(&half, 3),
            Err(Error::DegenerateDivisor { multiple: 2 })
        ));
    }

    #[test]
    fn golden_first_dlam() {
        let t = divisor_table::<f64>(&RotationNumber::golden(), 16).unwrap();
        let theta = (5f64.sqrt() - 1.0) / 2.0;
        let expected = 2.0 * (std::f64::consts::PI * theta).sin();
        assert!((t.dlam(2) - expected).abs() < 1e-15);
        assert!((t.dlam(2) - 1.864_064_847_626_455).abs() < 1e-14);
    }

    #[test]
    fn synthetic_constant_omega() {
        let t = DivisorTable::<f64>::from_ln_divisors(vec![2f64.ln(); 33], 192);
        let s = t.brjuno_partial_sum(4).unwrap();
        let weights: f64 = (0..=4).map(|k| 0.5f64.powi(k)).sum();
        assert!((s - weights * 0.5f64.ln()).abs() < 1e-15);
        assert!(s < 0.0);
        assert!(t.brjuno_partial_sum(5).is_err());
    }

    #[test]
    fn unit_omega_has_zero_exponent() {
        let t = DivisorTable::<f64>::from_ln_divisors(vec![0.0; 11], 192);
        assert_eq!(t.cremer_exponent(5).unwrap(), 0.0);
        assert!(t.cremer_exponent(1).is_err());
        assert!(t.cremer_exponent(10).is_ok());
        assert!(t.cremer_exponent(11).is_err());
    }

    #[test]
    fn tiny_sines_keep_relative_accuracy() {
        let mut limbs = num_bigint::BigUint::from(3u32);
        limbs <<= 10usize; // 3 * 2^-182 at 192 bits
        let x = FixedFrac::from_scaled_integer(&limbs, 192);
        let s = twice_half_turn_sine::<f64>(&x);
        let expected_log2 = (2.0 * std::f64::consts::PI * 3.0).log2() - 182.0;
        assert!((s.log2_abs() - expected_log2).abs() < 1e-14);
        // Folding: 1 - x gives the same sine.
        let t = twice_half_turn_sine::<f64>(&x.complement());
        assert_eq!(s, t);
    }

    #[test]
    fn unit_minus_one_matches_direct_evaluation() {
        let g = RotationNumber::golden();
        for p in 1..50u64 {
            let x = g.frac_multiple(p);
            let d = unit_minus_one::<f64>(&x).unwrap().to_complex();
            let direct = unit_power::<f64>(&x) - Complex::new(1.0, 0.0);
            assert!((d - direct).norm() < 1e-14, "p = {p}");
        }
        assert!(unit_minus_one::<f64>(&FixedFrac::zero(192)).is_none());
    }

    #[test]
    fn csv_layout() {
        let t = divisor_table::<f64>(&RotationNumber::golden(), 4).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "m,dlam,omega,cremer_exponent");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("2,"));
    }
}
