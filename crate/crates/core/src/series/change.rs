use num_complex::Complex;
use num_traits::{One, Zero};

use super::bivariate;
use super::germ::SkewGerm;
use super::truncated::TruncatedSeries;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaled::ScaledComplex;

/// Fiber-preserving coordinate change `Phi(z, w) = (z, phi_z(w))`.
#[derive(Clone, Debug, PartialEq)]
pub enum FiberChange<T> {
    /// `w -> w + phi(z)`.
    Shift(TruncatedSeries<T>),
    /// `w -> w (1 + psi(z))`.
    Gauge(TruncatedSeries<T>),
    /// `w -> w + h(z) w^(k+1)`.
    Bump { h: TruncatedSeries<T>, k: usize },
    /// `w -> c w`.
    WScale(Complex<T>),
}

impl<T: Real> FiberChange<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            FiberChange::Shift(_) => "shift",
            FiberChange::Gauge(_) => "gauge",
            FiberChange::Bump { .. } => "bump",
            FiberChange::WScale(_) => "wscale",
        }
    }

    /// The change's own series, if it has one.
    pub fn series(&self) -> Option<&TruncatedSeries<T>> {
        match self {
            FiberChange::Shift(s) | FiberChange::Gauge(s) | FiberChange::Bump { h: s, .. } => Some(s),
            FiberChange::WScale(_) => None,
        }
    }

    /// `phi_z(w)` at a point.
    pub fn apply(&self, z: Complex<T>, w: Complex<T>) -> Complex<T> {
        match self {
            FiberChange::Shift(phi) => w + phi.eval(z),
            FiberChange::Gauge(psi) => w * (psi.eval(z) + T::one()),
            FiberChange::Bump { h, k } => w + h.eval(z) * w.powu(*k as u32 + 1),
            FiberChange::WScale(c) => *c * w,
        }
    }

    /// Checks the kind-specific invariants.
    ///
    /// A bump with `h(0) != 0` is accepted only when `h` is constant in `z`
    /// (the polynomial changes `w -> w + q w^r` of the parabolic reduction).
    pub fn validate(&self) -> Result<()> {
        match self {
            FiberChange::Shift(_) => Ok(()),
            FiberChange::Gauge(psi) => {
                if (ScaledComplex::one() + psi.coeff(0)).is_zero() {
                    Err(Error::InvalidChange("gauge needs 1 + psi(0) != 0".into()))
                } else {
                    Ok(())
                }
            }
            FiberChange::Bump { h, k } => {
                if *k < 1 {
                    Err(Error::InvalidChange("bump order k must be at least 1".into()))
                } else if !h.coeff(0).is_zero() && !h.is_constant() {
                    Err(Error::InvalidChange(
                        "bump needs h(0) = 0 unless h is constant".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            FiberChange::WScale(c) => {
                if c.is_zero() || !c.re.is_finite() || !c.im.is_finite() {
                    Err(Error::InvalidChange("scale factor must be finite and nonzero".into()))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Exact inverse for shift, gauge and scale. Bumps have no finite inverse
    /// of the same kind.
    pub fn inverse(&self) -> Result<Self> {
        self.validate()?;
        match self {
            FiberChange::Shift(phi) => Ok(FiberChange::Shift(phi.neg())),
            FiberChange::Gauge(psi) => {
                let one = TruncatedSeries::one(psi.order());
                let inv = one.add(psi)?.inverse()?;
                Ok(FiberChange::Gauge(inv.sub(&one)?))
            }
            FiberChange::WScale(c) => Ok(FiberChange::WScale(c.inv())),
            FiberChange::Bump { .. } => Err(Error::InvalidChange(
                "bump changes are not exactly invertible".into(),
            )),
        }
    }
}

/// `Phi^-1 o F o Phi`, truncated to the germ's `(N, D_w)`.
pub fn conjugate<T: Real>(germ: &SkewGerm<T>, change: &FiberChange<T>) -> Result<SkewGerm<T>> {
    change.validate()?;
    let n = germ.order_z();
    let dw = germ.degree_w();
    if let Some(s) = change.series() {
        if s.order() != n {
            return Err(Error::TruncationMismatch {
                left: n,
                right: s.order(),
            });
        }
    }
    let lambda = germ.lambda_powers();
    let coeffs = germ.coeffs();
    let out = match change {
        FiberChange::Shift(phi) => {
            let mut inner = bivariate::zero(n, dw);
            inner[0] = phi.clone();
            if dw >= 1 {
                inner[1] = TruncatedSeries::one(n);
            }
            let mut g = bivariate::compose(coeffs, &inner)?;
            g[0] = g[0].sub(&phi.rotate(lambda, 1)?)?;
            g
        }
        FiberChange::Gauge(psi) => {
            let one = TruncatedSeries::one(n);
            let factor = one.add(psi)?;
            let denom = factor.rotate(lambda, 1)?;
            if denom.coeff(0).is_zero() {
                return Err(Error::GaugeSingular);
            }
            let inv = denom.inverse()?;
            let mut power = one;
            let mut g = Vec::with_capacity(dw + 1);
            for a in coeffs {
                g.push(a.mul(&power)?.mul(&inv)?);
                power = power.mul(&factor)?;
            }
            g
        }
        FiberChange::Bump { h, k } => {
            let mut inner = bivariate::zero(n, dw);
            if dw >= 1 {
                inner[1] = TruncatedSeries::one(n);
            }
            if k + 1 <= dw {
                inner[k + 1] = h.clone();
            }
            let g = bivariate::compose(coeffs, &inner)?;
            let reverse = reversion_in_w(&h.rotate(lambda, 1)?, *k, dw);
            bivariate::compose(&reverse, &g)?
        }
        FiberChange::WScale(c) => {
            let c = ScaledComplex::from_complex(*c);
            let mut factor = c.recip();
            let mut g = Vec::with_capacity(dw + 1);
            for a in coeffs {
                g.push(a.scale(factor));
                factor *= c;
            }
            g
        }
    };
    germ.with_coeffs(out)
}

/// Applies changes in order: `Phi_r^-1 o ... o Phi_1^-1 o F o Phi_1 o ... o Phi_r`.
pub fn conjugate_all<'a, T: Real + 'a>(
    germ: &SkewGerm<T>,
    changes: impl IntoIterator<Item = &'a FiberChange<T>>,
) -> Result<SkewGerm<T>> {
    changes
        .into_iter()
        .try_fold(germ.clone(), |g, ch| conjugate(&g, ch))
}

/// `w`-coefficients (index = degree) of the inverse of `w -> w + h(z) w^(k+1)`
/// through `w^(D_w)`.
///
/// Lagrange inversion gives the coefficient of `w^(1 + k n)` as
/// `(-h)^n binom((k+1) n, n) / (k n + 1)`; all other degrees vanish.
pub fn reversion_in_w<T: Real>(h: &TruncatedSeries<T>, k: usize, degree_w: usize) -> Vec<TruncatedSeries<T>> {
    assert!(k >= 1, "bump order k must be at least 1");
    let n_z = h.order();
    let mut out = bivariate::zero(n_z, degree_w);
    if degree_w == 0 {
        return out;
    }
    out[1] = TruncatedSeries::one(n_z);
    let minus_h = h.neg();
    let mut power = TruncatedSeries::one(n_z);
    let mut n = 1;
    while 1 + k * n <= degree_w {
        power = power.mul(&minus_h).expect("same order");
        let c = fuss_catalan::<T>(k, n);
        out[1 + k * n] = power.scale(ScaledComplex::from_real(c));
        n += 1;
    }
    out
}

/// `binom((k+1) n, n) / (k n + 1)`.
fn fuss_catalan<T: Real>(k: usize, n: usize) -> T {
    let mut c = T::one();
    for i in 1..=n {
        c = c * T::from_usize(k * n + i).unwrap() / T::from_usize(i).unwrap();
    }
    c / T::from_usize(k * n + 1).unwrap()
}

/// `sum_j a_j(z) phi(z)^j - phi(lambda z)` through `z^N`.
pub fn residual_invariant_curve<T: Real>(germ: &SkewGerm<T>, phi: &TruncatedSeries<T>) -> Result<TruncatedSeries<T>> {
    let n = germ.order_z();
    let mut acc = TruncatedSeries::zero(n);
    for a in germ.coeffs().iter().rev() {
        acc = acc.mul(phi)?.add(a)?;
    }
    acc.sub(&phi.rotate(germ.lambda_powers(), 1)?)
}
