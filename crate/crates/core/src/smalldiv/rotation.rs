use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::fixed::{limb_count, FixedFrac};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_FRAC_BITS: u32 = 192;
/// Number of partial quotients kept for inspection.
pub const DEFAULT_QUOTIENT_DEPTH: usize = 64;
/// Upper bound for automatically sized precision.
pub const FRAC_BITS_CEILING: u32 = 1 << 14;

/// Guard bits used while evaluating surds.
const GUARD_BITS: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RotationSource {
    /// `[0; a_1, ..., a_n, 1, 1, 1, ...]`: the listed quotients followed by a tail of ones.
    Quotients(Vec<BigUint>),
    /// Fractional part of `(p + q sqrt(r)) / s`.
    Surd { p: i64, q: i64, r: u64, s: i64 },
    /// A terminating decimal expansion `0.d_1 d_2 ...`.
    Decimal(String),
}

/// Rotation number `theta` of `lambda = exp(2 pi i theta)`, held as a
/// fixed-point fraction so that `k theta mod 1` is exact up to the initial rounding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationNumber {
    source: RotationSource,
    partial_quotients: Vec<BigUint>,
    frac_bits: u32,
    theta: FixedFrac,
    possibly_rational: bool,
}

impl RotationNumber {
    /// The golden mean `(sqrt 5 - 1) / 2`.
    pub fn golden() -> Self {
        Self::from_surd(-1, 1, 5, 2).expect("golden mean is a valid surd")
    }

    pub fn from_quotients(quotients: Vec<BigUint>) -> Result<Self> {
        Self::from_source(RotationSource::Quotients(quotients), DEFAULT_FRAC_BITS)
    }

    pub fn from_surd(p: i64, q: i64, r: u64, s: i64) -> Result<Self> {
        Self::from_source(RotationSource::Surd { p, q, r, s }, DEFAULT_FRAC_BITS)
    }

    pub fn from_decimal(digits: &str) -> Result<Self> {
        Self::from_source(RotationSource::Decimal(digits.to_string()), DEFAULT_FRAC_BITS)
    }

    pub fn from_source(source: RotationSource, frac_bits: u32) -> Result<Self> {
        if frac_bits < 64 {
            return Err(Error::InvalidRotation(format!(
                "frac_bits = {frac_bits} is below 64"
            )));
        }
        let frac_bits = 64 * limb_count(frac_bits) as u32;
        let (theta, partial_quotients, possibly_rational) = match &source {
            RotationSource::Quotients(list) => {
                let (theta, quotients) = quotients_theta(list, frac_bits)?;
                (theta, quotients, false)
            }
            RotationSource::Surd { p, q, r, s } => {
                let (theta, quotients) = surd_theta(*p, *q, *r, *s, frac_bits)?;
                (theta, quotients, false)
            }
            RotationSource::Decimal(digits) => {
                let (theta, quotients) = decimal_theta(digits, frac_bits)?;
                (theta, quotients, true)
            }
        };
        Ok(Self {
            source,
            partial_quotients,
            frac_bits,
            theta,
            possibly_rational,
        })
    }

    /// Same rotation, re-evaluated at a different precision.
    pub fn with_frac_bits(&self, frac_bits: u32) -> Result<Self> {
        Self::from_source(self.source.clone(), frac_bits)
    }

    pub fn source(&self) -> &RotationSource {
        &self.source
    }

    pub fn partial_quotients(&self) -> &[BigUint] {
        &self.partial_quotients
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn possibly_rational(&self) -> bool {
        self.possibly_rational
    }

    pub fn theta_fixed(&self) -> &FixedFrac {
        &self.theta
    }

    pub fn theta<T: Real>(&self) -> T {
        self.theta.to_real()
    }

    /// `k theta mod 1`.
    pub fn frac_multiple(&self, k: u64) -> FixedFrac {
        self.theta.wrapping_mul_u64(k)
    }

    /// Entries `k theta mod 1` for `k = 0..=k_max`, each within `k 2^-frac_bits`.
    pub fn frac_multiples(&self, k_max: u64) -> Result<Vec<FixedFrac>> {
        if k_max == 0 {
            return Err(Error::Precondition("k_max must be at least 1".into()));
        }
        self.check_multiples(k_max)?;
        let mut out = Vec::with_capacity(k_max as usize + 1);
        out.extend(self.multiples().take(k_max as usize + 1));
        Ok(out)
    }

    /// Rejects `k_max 2^-frac_bits > 2^-64`.
    pub fn check_multiples(&self, k_max: u64) -> Result<()> {
        let slack = self.frac_bits - 64;
        if slack < 64 && k_max > (1u64 << slack) {
            return Err(Error::InsufficientPrecision {
                multiples: k_max,
                frac_bits: self.frac_bits,
            });
        }
        Ok(())
    }

    /// Unbounded stream `0, theta, 2 theta, ...` modulo one.
    pub fn multiples(&self) -> Multiples<'_> {
        Multiples {
            step: &self.theta,
            current: FixedFrac::zero(self.frac_bits),
        }
    }

    /// Continued-fraction denominators `q_1, q_2, ...` not exceeding `limit`.
    pub fn convergent_denominators(&self, limit: u64) -> Vec<u64> {
        let limit = BigUint::from(limit);
        let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
        let mut out = Vec::new();
        for a in &self.partial_quotients {
            let next = a * &q + &q_prev;
            if next > limit {
                break;
            }
            out.push(next.to_u64().expect("bounded by limit"));
            q_prev = std::mem::replace(&mut q, next);
        }
        out
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }
}

pub struct Multiples<'a> {
    step: &'a FixedFrac,
    current: FixedFrac,
}

impl Iterator for Multiples<'_> {
    type Item = FixedFrac;

    fn next(&mut self) -> Option<FixedFrac> {
        let out = self.current.clone();
        self.current.add_assign_wrapping(self.step);
        Some(out)
    }
}

/// Rotation with partial quotients `a_n = growth(n)` for `n = 1..=depth`,
/// followed by the all-ones tail. Precision is sized from the convergent
/// denominators so that the smallest divisors up to `q_{depth+1}` resolve.
pub fn liouville_quotients(
    depth: u32,
    growth: impl Fn(u32) -> BigUint,
    ceiling: u32,
) -> Result<RotationNumber> {
    let mut quotients = Vec::with_capacity(depth as usize);
    for n in 1..=depth {
        let a = growth(n);
        if a.is_zero() {
            return Err(Error::InvalidRotation(format!("growth({n}) = 0")));
        }
        quotients.push(a);
    }
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    for a in quotients.iter().chain(std::iter::once(&BigUint::one())) {
        let next = a * &q + &q_prev;
        q_prev = std::mem::replace(&mut q, next);
    }
    // ||q_n theta|| ~ 1 / q_{n+1}; leave 128 bits of headroom below that.
    let wanted = 2 * q.bits() as u32 + 128;
    let frac_bits = (64 * limb_count(wanted) as u32).max(DEFAULT_FRAC_BITS);
    if frac_bits > ceiling {
        return Err(Error::PrecisionCeiling {
            required: frac_bits,
            ceiling,
        });
    }
    RotationNumber::from_source(RotationSource::Quotients(quotients), frac_bits)
}

/// `a_n = 2^(2^n)`.
pub fn double_exponential_growth(n: u32) -> BigUint {
    BigUint::one() << (1usize << n)
}

fn quotients_theta(list: &[BigUint], frac_bits: u32) -> Result<(FixedFrac, Vec<BigUint>)> {
    if list.iter().any(|a| a.is_zero()) {
        return Err(Error::InvalidRotation(
            "partial quotients must be at least 1".into(),
        ));
    }
    let depth = list.len().max(DEFAULT_QUOTIENT_DEPTH);
    let one = BigUint::one();
    // theta = [0; a_1, a_2, ...]: p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1.
    let (mut p_prev, mut p) = (BigUint::one(), BigUint::zero());
    let (mut q_prev, mut q) = (BigUint::zero(), BigUint::one());
    let target_bits = frac_bits as u64 + 8;
    let mut n = 0usize;
    let mut quotients = Vec::with_capacity(depth);
    loop {
        let a = list.get(n).unwrap_or(&one);
        if n < depth {
            quotients.push(a.clone());
        }
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        n += 1;
        // |theta - p/q| < 1/q^2 <= 2^-(frac_bits + 8).
        if n >= list.len() && 2 * (q.bits() - 1) >= target_bits && n >= depth {
            break;
        }
    }
    Ok((round_ratio(&p, &q, frac_bits), quotients))
}

fn round_ratio(num: &BigUint, den: &BigUint, frac_bits: u32) -> FixedFrac {
    let scaled = ((num << (frac_bits as usize + 1)) + den) / (den << 1usize);
    FixedFrac::from_scaled_integer(&scaled, frac_bits)
}

fn surd_theta(p: i64, q: i64, r: u64, s: i64, frac_bits: u32) -> Result<(FixedFrac, Vec<BigUint>)> {
    if s == 0 {
        return Err(Error::InvalidRotation("surd denominator s is zero".into()));
    }
    if q == 0 {
        return Err(Error::InvalidRotation("surd with q = 0 is rational".into()));
    }
    let root = r.sqrt();
    if root * root == r {
        return Err(Error::InvalidRotation(format!(
            "r = {r} is a perfect square; the surd is rational"
        )));
    }
    let work = frac_bits + GUARD_BITS;
    let sqrt_scaled = BigInt::from(BigUint::from(r) << (2 * work as usize)).sqrt();
    let numerator = (BigInt::from(p) << work as usize) + BigInt::from(q) * sqrt_scaled;
    let y = numerator.div_floor(&BigInt::from(s));
    let half = BigInt::one() << (GUARD_BITS as usize - 1);
    let rounded: BigInt = (y + half) >> GUARD_BITS as usize;
    let modulus = BigInt::one() << frac_bits as usize;
    let reduced = rounded.mod_floor(&modulus);
    let theta = FixedFrac::from_scaled_integer(&reduced.to_biguint().unwrap(), frac_bits);
    if theta.is_zero() {
        return Err(Error::InvalidRotation(
            "surd is too close to an integer at this precision".into(),
        ));
    }
    Ok((theta, surd_quotients(p, q, r, s, DEFAULT_QUOTIENT_DEPTH)))
}

/// Partial quotients `a_1, a_2, ...` of the fractional part of `(p + q sqrt r)/s`,
/// by exact integer arithmetic on the form `(P + sqrt D) / Q` with `Q | D - P^2`.
fn surd_quotients(p: i64, q: i64, r: u64, s: i64, depth: usize) -> Vec<BigUint> {
    let sign = if q < 0 { -1 } else { 1 };
    let mut d = BigInt::from(q) * BigInt::from(q) * BigInt::from(r);
    let mut big_p = BigInt::from(p * sign);
    let mut big_q = BigInt::from(s * sign);
    if !(&d - &big_p * &big_p).is_multiple_of(&big_q) {
        let abs_q = big_q.abs();
        big_p *= &abs_q;
        d *= &abs_q * &abs_q;
        big_q *= &abs_q;
    }
    let root = d.sqrt();
    let mut out = Vec::with_capacity(depth);
    for step in 0..=depth {
        // floor((P + sqrt D) / Q), with sqrt D irrational.
        let a = if big_q.sign() == Sign::Plus {
            (&big_p + &root).div_floor(&big_q)
        } else {
            (&big_p + &root + BigInt::one()).div_floor(&big_q)
        };
        if step > 0 {
            out.push(a.to_biguint().expect("partial quotients past a_0 are positive"));
        }
        let p_next = &a * &big_q - &big_p;
        let q_next = (&d - &p_next * &p_next) / &big_q;
        big_p = p_next;
        big_q = q_next;
    }
    out
}

fn decimal_theta(digits: &str, frac_bits: u32) -> Result<(FixedFrac, Vec<BigUint>)> {
    let trimmed = digits.trim();
    let frac = trimmed
        .strip_prefix("0.")
        .or_else(|| trimmed.strip_prefix('.'))
        .ok_or_else(|| Error::InvalidRotation(format!("decimal {trimmed:?} must start with 0.")))?;
    if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::InvalidRotation(format!("malformed decimal {trimmed:?}")));
    }
    let num: BigUint = frac.parse().expect("validated digits");
    if num.is_zero() {
        return Err(Error::InvalidRotation("theta must lie in (0, 1)".into()));
    }
    let den = BigUint::from(10u32).pow(frac.len() as u32);
    let theta = round_ratio(&num, &den, frac_bits);
    // Finite expansion of the rational num/den.
    let mut quotients = Vec::new();
    let (mut a, mut b) = (den, num);
    while !b.is_zero() && quotients.len() < DEFAULT_QUOTIENT_DEPTH {
        let (quot, rem) = a.div_rem(&b);
        quotients.push(quot);
        a = std::mem::replace(&mut b, rem);
    }
    Ok((theta, quotients))
}

/// JSON form of a rotation number.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotients: Option<Vec<Quotient>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decimal: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frac_bits: Option<u32>,
    /// `kind = "liouville"`: number of leading quotients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    /// `kind = "liouville"`: `"double_exponential"` (default), `"linear"` or `"constant"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<String>,
}

/// A partial quotient as a JSON number or, for large values, a decimal string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quotient {
    Small(u64),
    Big(String),
}

impl RotationSpec {
    pub fn golden() -> Self {
        Self {
            kind: "surd".into(),
            p: Some(-1),
            q: Some(1),
            r: Some(5),
            s: Some(2),
            ..Self::default()
        }
    }

    pub fn to_rotation(&self) -> Result<RotationNumber> {
        let missing = |field: &str| Error::InvalidRotation(format!("{} rotation needs {field:?}", self.kind));
        let rot = match self.kind.as_str() {
            "surd" => RotationNumber::from_source(
                RotationSource::Surd {
                    p: self.p.ok_or_else(|| missing("p"))?,
                    q: self.q.ok_or_else(|| missing("q"))?,
                    r: self.r.ok_or_else(|| missing("r"))?,
                    s: self.s.ok_or_else(|| missing("s"))?,
                },
                self.frac_bits.unwrap_or(DEFAULT_FRAC_BITS),
            )?,
            "quotients" => {
                let list = self
                    .quotients
                    .as_ref()
                    .ok_or_else(|| missing("quotients"))?
                    .iter()
                    .map(|q| match q {
                        Quotient::Small(v) => Ok(BigUint::from(*v)),
                        Quotient::Big(text) => text
                            .parse::<BigUint>()
                            .map_err(|_| Error::InvalidRotation(format!("bad quotient {text:?}"))),
                    })
                    .collect::<Result<Vec<_>>>()?;
                RotationNumber::from_source(
                    RotationSource::Quotients(list),
                    self.frac_bits.unwrap_or(DEFAULT_FRAC_BITS),
                )?
            }
            "decimal" => RotationNumber::from_source(
                RotationSource::Decimal(self.decimal.clone().ok_or_else(|| missing("decimal"))?),
                self.frac_bits.unwrap_or(DEFAULT_FRAC_BITS),
            )?,
            "liouville" => {
                let depth = self.depth.ok_or_else(|| missing("depth"))?;
                let growth: fn(u32) -> BigUint = match self.growth.as_deref() {
                    None | Some("double_exponential") => double_exponential_growth,
                    Some("linear") => |n| BigUint::from(n),
                    Some("constant") => |_| BigUint::one(),
                    Some(other) => {
                        return Err(Error::InvalidRotation(format!("unknown growth {other:?}")))
                    }
                };
                let rot = liouville_quotients(depth, growth, FRAC_BITS_CEILING)?;
                match self.frac_bits {
                    Some(bits) => rot.with_frac_bits(bits)?,
                    None => rot,
                }
            }
            other => return Err(Error::InvalidRotation(format!("unknown kind {other:?}"))),
        };
        Ok(rot)
    }
}
