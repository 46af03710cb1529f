use std::sync::Arc;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaled::ScaledComplex;
use crate::series::{LambdaPowers, SkewGerm, TruncatedSeries};

/// Tolerance on `f(0) = 0`, `f'(0) = lambda`.
const BASE_TOL: f64 = 1e-12;

/// Solves `sigma(lambda z) = f(sigma(z))` with `sigma(z) = z + O(z^2)` through `z^N`.
///
/// `sigma_n = [z^n] sum_{j >= 2} f_j sigma^j / (lambda^n - lambda)`.
pub fn linearize_base<T: Real>(f: &TruncatedSeries<T>, lambda: &LambdaPowers<T>) -> Result<TruncatedSeries<T>> {
    let n = f.order();
    if n < 1 {
        return Err(Error::Precondition("base map needs z-order at least 1".into()));
    }
    if lambda.max_power() < n {
        return Err(Error::Precondition(format!(
            "lambda table holds powers up to {}, need {n}",
            lambda.max_power()
        )));
    }
    let tol = T::of(BASE_TOL);
    if f.coeff(0).to_complex().norm() > tol || (f.coeff(1).to_complex() - lambda.lambda()).norm() > tol {
        return Err(Error::Precondition("base map must satisfy f(0) = 0, f'(0) = lambda".into()));
    }
    // pow[j][i] = [z^i] sigma^j
    let mut pow = vec![vec![ScaledComplex::<T>::zero(); n + 1]; n + 1];
    let mut sigma = TruncatedSeries::zero(n);
    sigma.set_coeff(1, ScaledComplex::from_real(T::one()));
    pow[1][1] = ScaledComplex::from_real(T::one());
    for i in 2..=n {
        for j in 2..=i {
            pow[j][i] = power_coeff(&sigma, &pow[j - 1], i);
        }
        let mut num = ScaledComplex::zero();
        for j in 2..=i {
            num += f.coeff(j) * pow[j][i];
        }
        let s = num / lambda.minus_lambda(i)?;
        sigma.set_coeff(i, s);
        pow[1][i] = s;
    }
    Ok(sigma)
}

/// `[z^i] s * prev` where `s(0) = 0` and `prev(0) = 0`, using only known terms.
pub(crate) fn power_coeff<T: Real>(s: &TruncatedSeries<T>, prev: &[ScaledComplex<T>], i: usize) -> ScaledComplex<T> {
    let mut acc = ScaledComplex::zero();
    for m in 1..i {
        let a = s.coeff(m);
        let b = prev[i - m];
        if !a.is_zero() && !b.is_zero() {
            acc += a * b;
        }
    }
    acc
}

/// `sigma(lambda z) - f(sigma(z))` through `z^N`.
pub fn base_residual<T: Real>(
    f: &TruncatedSeries<T>,
    sigma: &TruncatedSeries<T>,
    lambda: &LambdaPowers<T>,
) -> Result<TruncatedSeries<T>> {
    sigma.rotate(lambda, 1)?.sub(&f.compose(sigma)?)
}

/// Pulls the fiber coefficients back through `sigma`: the germ
/// `(lambda z, sum_j a_j(sigma(z)) w^j)` conjugate to `(f(z), sum_j a_j(z) w^j)`.
pub fn pull_back_base<T: Real>(
    lambda: Arc<LambdaPowers<T>>,
    degree: usize,
    coeffs: &[TruncatedSeries<T>],
    sigma: &TruncatedSeries<T>,
) -> Result<SkewGerm<T>> {
    let pulled = coeffs.iter().map(|a| a.compose(sigma)).collect::<Result<Vec<_>>>()?;
    SkewGerm::new(lambda, degree, pulled)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex;

    use super::*;
    use crate::smalldiv::RotationNumber;

    fn lambda(n: usize) -> Arc<LambdaPowers<f64>> {
        LambdaPowers::shared(RotationNumber::golden().into_shared(), n).unwrap()
    }

    #[test]
    fn linear_base_is_already_linear() {
        let lp = lambda(6);
        let f = TruncatedSeries::from_complex(6, &[Complex::new(0.0, 0.0), lp.lambda()]);
        let sigma = linearize_base(&f, &lp).unwrap();
        assert_eq!(sigma, TruncatedSeries::from_complex(6, &[Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)]));
    }

    #[test]
    fn quadratic_base_second_coefficient() {
        let lp = lambda(8);
        let l = lp.lambda();
        let f = TruncatedSeries::from_complex(8, &[Complex::new(0.0, 0.0), l, Complex::new(1.0, 0.0)]);
        let sigma = linearize_base(&f, &lp).unwrap();
        let expected = (l * l - l).inv();
        assert!((sigma.coeff(2).to_complex() - expected).norm() < 1e-14);
        assert!(base_residual(&f, &sigma, &lp).unwrap().max_log2() < sigma.max_log2() - 45.0);
    }

    #[test]
    fn rejects_wrong_multiplier() {
        let lp = lambda(3);
        let f = TruncatedSeries::from_complex(3, &[Complex::new(0.0, 0.0), Complex::new(0.5, 0.0)]);
        assert!(matches!(linearize_base(&f, &lp), Err(Error::Precondition(_))));
    }
}
