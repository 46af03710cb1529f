//! Divergence witnesses for Cremer-like rotations: the linear example, the
//! greedy quadratic construction, and growth profiles of their coefficients.

use std::io::{self, Write};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::Result;
use crate::scalar::Real;
use crate::scaled::ScaledComplex;
use crate::smalldiv::{unit_minus_one, RotationNumber};
use crate::Error;

/// `lambda^p - 1` for `p = 1..=m_max` (index `p - 1`).
fn divisors<T: Real>(rot: &RotationNumber, m_max: usize) -> Result<Vec<ScaledComplex<T>>> {
    if m_max < 1 {
        return Err(Error::Precondition("m_max must be at least 1".into()));
    }
    rot.check_multiples(m_max as u64)?;
    rot.multiples()
        .skip(1)
        .take(m_max)
        .enumerate()
        .map(|(i, x)| unit_minus_one(&x).ok_or(Error::DegenerateDivisor { multiple: i as u64 + 1 }))
        .collect()
}

/// `ln(1 / |lambda^m - 1|)` for `m = 1..=m_max` (index `m - 1`).
pub fn ln_inverse_divisors<T: Real>(rot: &RotationNumber, m_max: usize) -> Result<Vec<T>> {
    Ok(divisors::<T>(rot, m_max)?.iter().map(|d| -d.ln_abs()).collect())
}

/// Formal invariant curve of `(lambda z, w + z + z w)`:
/// `phi_1 = (1 + phi_0) / (lambda - 1)`, `phi_n = phi_{n-1} / (lambda^n - 1)`.
/// Entry `n` is `phi_n`, `n = 0..=m_max`.
pub fn linear_example_phi<T: Real>(rot: &RotationNumber, phi0: Complex<T>, m_max: usize) -> Result<Vec<ScaledComplex<T>>> {
    let d = divisors::<T>(rot, m_max)?;
    let mut phi = Vec::with_capacity(m_max + 1);
    phi.push(ScaledComplex::from_complex(phi0));
    let mut prev = ScaledComplex::from_complex(phi0) + ScaledComplex::one();
    for dn in &d {
        prev = prev / *dn;
        phi.push(prev);
    }
    Ok(phi)
}

/// Output of the greedy quadratic construction.
#[derive(Clone, Debug, PartialEq)]
pub struct GreedyQuadratic<T> {
    /// `a_n` for `n = 1..=m_max` (index `n - 1`).
    pub bits: Vec<u8>,
    /// `phi_n` for `n = 0..=m_max`.
    pub phi: Vec<ScaledComplex<T>>,
    /// `|a_n + S_n|` for `n = 1..=m_max` (index `n - 1`).
    pub numerators: Vec<ScaledComplex<T>>,
}

/// Chooses `a_n` in `{0, 1}` so the curve equation of
/// `(lambda z, w + sum_n a_n z^n + w^2)` has `|a_n + S_n| >= 1/2`,
/// `S_n = sum_{j=1}^{n-1} phi_j phi_{n-j}`, and sets
/// `phi_n = (a_n + S_n) / (lambda^n - 1)`.
///
/// When both bits qualify the larger `|a_n + S_n|` wins, ties going to 0.
pub fn greedy_quadratic<T: Real>(rot: &RotationNumber, m_max: usize) -> Result<GreedyQuadratic<T>> {
    let d = divisors::<T>(rot, m_max)?;
    let half = T::of(0.5);
    let mut phi = vec![ScaledComplex::zero(); m_max + 1];
    let mut bits = Vec::with_capacity(m_max);
    let mut numerators = Vec::with_capacity(m_max);
    for n in 1..=m_max {
        let mut s = ScaledComplex::zero();
        for j in 1..n {
            s += phi[j] * phi[n - j];
        }
        let with_one = s + ScaledComplex::one();
        let (m0, m1) = (s.abs(), with_one.abs());
        let ok0 = n > 1 && !below(m0, half);
        let ok1 = !below(m1, half);
        let a = match (ok0, ok1) {
            (true, true) => u8::from(greater(m1, m0)),
            (false, true) => 1,
            (true, false) => 0,
            (false, false) => unreachable!("|S_n| < 1/2 forces |1 + S_n| > 1/2"),
        };
        let num = if a == 1 { with_one } else { s };
        assert!(!below(num.abs(), half), "greedy step {n} lost its bound");
        phi[n] = num / d[n - 1];
        bits.push(a);
        numerators.push(num);
    }
    Ok(GreedyQuadratic { bits, phi, numerators })
}

fn below<T: Real>(x: ScaledComplex<T>, bound: T) -> bool {
    x.log2_abs() < bound.log2()
}

fn greater<T: Real>(x: ScaledComplex<T>, y: ScaledComplex<T>) -> bool {
    x.log2_abs() > y.log2_abs()
}

/// One row of a growth profile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthEntry<T> {
    pub m: usize,
    pub log2_abs: T,
    /// `(1/m) ln |phi_m|`.
    pub exponent: T,
    pub running_max: T,
}

/// `e_m = (1/m) ln |phi_m|` for `m >= 1` and its running maximum; `coeffs[m]` is `phi_m`.
pub fn growth_profile<T: Real>(coeffs: &[ScaledComplex<T>]) -> Result<Vec<GrowthEntry<T>>> {
    if coeffs.is_empty() {
        return Err(Error::Precondition("growth profile needs coefficients".into()));
    }
    let mut running = T::neg_infinity();
    Ok(coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, c)| {
            // ln 2 * exponent + ln |mantissa|, never through the magnitude itself
            let log2_abs = c.log2_abs();
            let exponent = log2_abs * T::LN_2() / T::from_usize(m).unwrap();
            running = running.max(exponent);
            GrowthEntry {
                m,
                log2_abs,
                exponent,
                running_max: running,
            }
        })
        .collect())
}

/// CSV with columns `m, a_m, ln_abs_phi, e_m, running_max, ln_inv_divisor`;
/// `a_m` is empty when `bits` is `None`.
pub fn write_growth_csv<T: Real, W: Write>(
    mut out: W,
    profile: &[GrowthEntry<T>],
    bits: Option<&[u8]>,
    ln_inv_divisors: &[T],
) -> io::Result<()> {
    writeln!(out, "m,a_m,ln_abs_phi,e_m,running_max,ln_inv_divisor")?;
    for e in profile {
        let a = bits.and_then(|b| b.get(e.m - 1)).map(|a| a.to_string()).unwrap_or_default();
        let d = ln_inv_divisors.get(e.m - 1).map(|x| x.to_f64_lossy()).unwrap_or(f64::NAN);
        writeln!(
            out,
            "{},{},{:?},{:?},{:?},{:?}",
            e.m,
            a,
            (e.log2_abs * T::LN_2()).to_f64_lossy(),
            e.exponent.to_f64_lossy(),
            e.running_max.to_f64_lossy(),
            d
        )?;
    }
    Ok(())
}
