use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conjugator::NormalForm;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::{horner, horner_with_derivative, LambdaPowers, TruncatedSeries};

/// Validated petal radius.
pub const DEFAULT_RHO: f64 = 0.1;
/// Validated petal widening.
pub const DEFAULT_ETA: f64 = 0.25;

/// Rejection sampling gives up after this many draws per requested sample.
const MAX_DRAWS_PER_SAMPLE: usize = 1000;

/// Local model `w - w^(k+1) + b w^(2k+1) + sum_{m >= 2k+2} beta_m(z) w^m`
/// together with the petal parameters `rho` and `eta`.
#[derive(Clone, Debug)]
pub struct ParabolicLocal<T> {
    k: usize,
    b: Complex<T>,
    /// `beta_m` for `m = 2k+2, 2k+3, ...`.
    tail: Vec<TruncatedSeries<T>>,
    rho: T,
    eta: T,
    lambda: Option<Arc<LambdaPowers<T>>>,
}

impl<T: Real> ParabolicLocal<T> {
    /// Tail-free model `w - w^(k+1) + b w^(2k+1)`.
    pub fn model(k: usize, b: Complex<T>, rho: T, eta: T) -> Result<Self> {
        check_petal_params(k, rho, eta)?;
        Ok(Self {
            k,
            b,
            tail: Vec::new(),
            rho,
            eta,
            lambda: None,
        })
    }

    /// From a reduced normal form (the output of the parabolic reduction).
    pub fn from_normal_form(nf: &NormalForm<T>, rho: T, eta: T) -> Result<Self> {
        check_petal_params(nf.k, rho, eta)?;
        let b = nf
            .b
            .ok_or_else(|| Error::Precondition("normal form has not been reduced (no b)".into()))?;
        if nf.tail_start != 2 * nf.k + 2 {
            return Err(Error::Precondition("tail must start at w^(2k+2)".into()));
        }
        Ok(Self {
            k: nf.k,
            b,
            tail: nf.tail.clone(),
            rho,
            eta,
            lambda: Some(nf.germ.lambda_powers().clone()),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> Complex<T> {
        self.b
    }

    pub fn tail(&self) -> &[TruncatedSeries<T>] {
        &self.tail
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    pub fn eta(&self) -> T {
        self.eta
    }

    pub fn with_petal(mut self, rho: T, eta: T) -> Result<Self> {
        check_petal_params(self.k, rho, eta)?;
        self.rho = rho;
        self.eta = eta;
        Ok(self)
    }

    pub(crate) fn lambda(&self) -> Option<&Arc<LambdaPowers<T>>> {
        self.lambda.as_ref()
    }

    pub fn depends_on_z(&self) -> bool {
        self.tail.iter().any(|s| !s.is_constant())
    }

    /// Coefficients of `w -> g_z(w)`.
    pub fn fiber(&self, z: Complex<T>) -> Vec<Complex<T>> {
        let k = self.k;
        let len = (2 * k + 2 + self.tail.len()).max(2 * k + 2);
        let mut c = vec![Complex::new(T::zero(), T::zero()); len];
        c[1] = Complex::new(T::one(), T::zero());
        c[k + 1] = c[k + 1] - T::one();
        c[2 * k + 1] = c[2 * k + 1] + self.b;
        for (i, s) in self.tail.iter().enumerate() {
            c[2 * k + 2 + i] = s.eval(z);
        }
        c
    }

    /// Petal index of `w` for this model's `(k, rho, eta)`.
    pub fn petal(&self, w: Complex<T>) -> Result<Option<usize>> {
        in_attracting_petal(w, self.k, self.rho, self.eta)
    }
}

fn check_petal_params<T: Real>(k: usize, rho: T, eta: T) -> Result<()> {
    if k < 1 {
        return Err(Error::Precondition("parabolic order k must be at least 1".into()));
    }
    if !(rho > T::zero()) {
        return Err(Error::Precondition("petal radius must be positive".into()));
    }
    if !(eta >= T::zero() && eta < T::one()) {
        return Err(Error::Precondition("petal widening must lie in [0, 1)".into()));
    }
    Ok(())
}

/// `e^(2 pi i j / k)`, `j = 0..k`: attracting directions of `w - w^(k+1)`.
pub fn attracting_directions<T: Real>(k: usize) -> Vec<Complex<T>> {
    (0..k)
        .map(|j| Complex::from_polar(T::one(), T::TAU() * T::from_usize(j).unwrap() / T::from_usize(k).unwrap()))
        .collect()
}

/// `u = 1 / (k w^k)` and `R = 1 / (k rho^k)`.
fn fatou_coordinate<T: Real>(w: Complex<T>, k: usize, rho: T) -> (Complex<T>, T) {
    let kt = T::from_usize(k).unwrap();
    let u = (w.powu(k as u32) * kt).inv();
    let r = (rho.powi(k as i32) * kt).recip();
    (u, r)
}

/// Index of the sector `|arg w - 2 pi j / k| < pi / k` containing `w`.
fn attracting_sector<T: Real>(w: Complex<T>, k: usize) -> usize {
    let kt = T::from_usize(k).unwrap();
    let t = (w.arg() * kt / T::TAU()).round().to_i64().unwrap_or(0);
    t.rem_euclid(k as i64) as usize
}

/// Index of the sector around `e^(i pi (2j + 1) / k)` containing `w`.
fn repelling_sector<T: Real>(w: Complex<T>, k: usize) -> usize {
    let kt = T::from_usize(k).unwrap();
    let t = ((w.arg() * kt / T::PI() - T::one()) / (T::one() + T::one())).round().to_i64().unwrap_or(0);
    t.rem_euclid(k as i64) as usize
}

/// `(Re u + eta |Im u| - R) / R`: positive exactly inside the attracting petal region.
pub fn attracting_margin<T: Real>(w: Complex<T>, k: usize, rho: T, eta: T) -> T {
    let (u, r) = fatou_coordinate(w, k, rho);
    (u.re + eta * u.im.abs() - r) / r
}

/// Attracting petal `j` is the part of the sector `|arg w - 2 pi j / k| < pi / k`
/// where `u = 1 / (k w^k)` satisfies `Re u > R - eta |Im u|`, `R = 1 / (k rho^k)`.
pub fn in_attracting_petal<T: Real>(w: Complex<T>, k: usize, rho: T, eta: T) -> Result<Option<usize>> {
    check_petal_params(k, rho, eta)?;
    if w.norm() == T::zero() {
        return Err(Error::Precondition("w = 0 is the parabolic point itself".into()));
    }
    if attracting_margin(w, k, rho, eta) > T::zero() {
        Ok(Some(attracting_sector(w, k)))
    } else {
        Ok(None)
    }
}

/// Repelling petals: `Re u < -R - eta |Im u|`, indexed by the nearest
/// direction `e^(i pi (2j + 1) / k)`.
pub fn in_repelling_petal<T: Real>(w: Complex<T>, k: usize, rho: T, eta: T) -> Result<Option<usize>> {
    check_petal_params(k, rho, eta)?;
    if w.norm() == T::zero() {
        return Err(Error::Precondition("w = 0 is the parabolic point itself".into()));
    }
    let (u, r) = fatou_coordinate(w, k, rho);
    if u.re < -r - eta * u.im.abs() {
        Ok(Some(repelling_sector(w, k)))
    } else {
        Ok(None)
    }
}

/// Outcome of sampling the attracting petals and mapping once.
#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport<T> {
    pub samples: usize,
    pub violations: usize,
    /// Smallest image margin (see [`attracting_margin`]); negative on violation.
    pub worst_margin: T,
}

fn sample_disk<T: Real>(rng: &mut ChaCha8Rng, radius: T) -> Complex<T> {
    let r: f64 = rng.gen::<f64>().sqrt();
    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex::from_polar(radius * T::of(r), T::of(t))
}

/// Samples `(z, w)` with `|z| < z_band` and `w` in an attracting petal, applies
/// the map once and counts images that leave the petal they started in.
pub fn forward_invariance_check<T: Real>(
    local: &ParabolicLocal<T>,
    z_band: T,
    samples: usize,
    seed: u64,
) -> Result<InvarianceReport<T>> {
    let (k, rho, eta) = (local.k, local.rho, local.eta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Every petal point has |u| > R / sqrt(1 + eta^2).
    let w_radius = rho * (T::one() + eta * eta).powf(T::one() / T::from_usize(2 * k).unwrap());
    let constant_fiber = (!local.depends_on_z()).then(|| local.fiber(Complex::new(T::zero(), T::zero())));
    let mut report = InvarianceReport {
        samples: 0,
        violations: 0,
        worst_margin: T::infinity(),
    };
    let mut draws = 0;
    while report.samples < samples {
        draws += 1;
        if draws > samples.max(1) * MAX_DRAWS_PER_SAMPLE {
            return Err(Error::Precondition("petal sampler found no admissible points".into()));
        }
        let w = sample_disk(&mut rng, w_radius);
        let z = sample_disk(&mut rng, z_band);
        let Ok(Some(j)) = in_attracting_petal(w, k, rho, eta) else {
            continue;
        };
        report.samples += 1;
        let image = match &constant_fiber {
            Some(c) => horner(c, w),
            None => horner(&local.fiber(z), w),
        };
        let margin = if image.norm() > T::zero() && attracting_sector(image, k) == j {
            attracting_margin(image, k, rho, eta)
        } else {
            -T::infinity()
        };
        if !(margin > T::zero()) {
            report.violations += 1;
        }
        report.worst_margin = report.worst_margin.min(margin);
    }
    Ok(report)
}

/// Outcome of the repelling-petal expansion check.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionReport<T> {
    pub samples: usize,
    pub violations: usize,
    /// Smallest `|g'(zeta)|` seen.
    pub min_derivative: T,
}

/// Samples repelling-petal points and checks `|g_0'(zeta)| > 1`.
pub fn repelling_expansion_check<T: Real>(local: &ParabolicLocal<T>, samples: usize, seed: u64) -> Result<ExpansionReport<T>> {
    let (k, rho, eta) = (local.k, local.rho, local.eta);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fiber = local.fiber(Complex::new(T::zero(), T::zero()));
    let mut report = ExpansionReport {
        samples: 0,
        violations: 0,
        min_derivative: T::infinity(),
    };
    let mut draws = 0;
    while report.samples < samples {
        draws += 1;
        if draws > samples.max(1) * MAX_DRAWS_PER_SAMPLE {
            return Err(Error::Precondition("petal sampler found no admissible points".into()));
        }
        let zeta = sample_disk(&mut rng, rho);
        let Ok(Some(_)) = in_repelling_petal(zeta, k, rho, eta) else {
            continue;
        };
        report.samples += 1;
        let d = horner_with_derivative(&fiber, zeta).1.norm();
        if !(d > T::one()) {
            report.violations += 1;
        }
        report.min_derivative = report.min_derivative.min(d);
    }
    Ok(report)
}
