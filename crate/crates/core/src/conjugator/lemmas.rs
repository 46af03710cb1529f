use num_traits::Zero;

use super::base::power_coeff;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaled::ScaledComplex;
use crate::series::{SkewGerm, TruncatedSeries};

/// Relative slack on the structural preconditions of each step.
pub const PRECONDITION_TOL: f64 = 1e-6;

/// `max(1, max |a_{j,n}|)` as `log2`.
pub(crate) fn germ_scale_log2<T: Real>(germ: &SkewGerm<T>) -> T {
    germ.max_log2().max(T::zero())
}

/// `|c| <= tol * 2^scale_log2`.
fn small<T: Real>(c: ScaledComplex<T>, scale_log2: T) -> bool {
    c.log2_abs() <= scale_log2 + T::of(PRECONDITION_TOL).log2()
}

fn check_parabolic_fiber<T: Real>(germ: &SkewGerm<T>, scale: T) -> Result<()> {
    if !small(germ.coeff(0).coeff(0), scale) {
        return Err(Error::Precondition("a_0(0) must vanish".into()));
    }
    if germ.degree_w() < 1 || !small(germ.coeff(1).coeff(0) - ScaledComplex::from_real(T::one()), scale) {
        return Err(Error::Precondition("a_1(0) must equal 1".into()));
    }
    Ok(())
}

/// Formal invariant curve `w = phi(z)` with `phi(0) = 0`:
/// `(lambda^p - 1) phi_p = [z^p] sum_j a_j phi^j` with `phi_p` left out of the right side.
pub fn solve_invariant_curve<T: Real>(germ: &SkewGerm<T>) -> Result<TruncatedSeries<T>> {
    let scale = germ_scale_log2(germ);
    check_parabolic_fiber(germ, scale)?;
    let n = germ.order_z();
    let dw = germ.degree_w();
    let lambda = germ.lambda_powers();
    let mut phi = TruncatedSeries::zero(n);
    // pow[j][i] = [z^i] phi^j; every power of phi vanishes at z = 0.
    let mut pow = vec![vec![ScaledComplex::<T>::zero(); n + 1]; dw + 1];
    for p in 1..=n {
        for j in 2..=dw.min(p) {
            pow[j][p] = power_coeff(&phi, &pow[j - 1], p);
        }
        let mut num = germ.coeff(0).coeff(p);
        for j in 1..=dw {
            let a = germ.coeff(j);
            for i in j..=p {
                let q = pow[j][i];
                if !q.is_zero() {
                    num += a.coeff(p - i) * q;
                }
            }
        }
        let value = num / lambda.minus_one(p)?;
        phi.set_coeff(p, value);
        pow[1][p] = value;
    }
    Ok(phi)
}

/// Gauge `psi` making the linear coefficient identically 1 when `a_0 = 0`:
/// `psi_p = (abar_{1,p} + sum_{m=1}^{p-1} abar_{1,m} psi_{p-m}) / (lambda^p - 1)`.
pub fn solve_linear_gauge<T: Real>(germ: &SkewGerm<T>) -> Result<TruncatedSeries<T>> {
    let scale = germ_scale_log2(germ);
    check_parabolic_fiber(germ, scale)?;
    if let Some(c) = germ.coeff(0).coeffs().iter().find(|c| !small(**c, scale)) {
        return Err(Error::Precondition(format!(
            "gauge step needs a_0 = 0, found a coefficient of modulus 2^{}",
            c.log2_abs()
        )));
    }
    let n = germ.order_z();
    let lambda = germ.lambda_powers();
    let a1 = germ.coeff(1);
    let mut psi = TruncatedSeries::zero(n);
    for p in 1..=n {
        let mut num = a1.coeff(p);
        for m in 1..p {
            num += a1.coeff(m) * psi.coeff(p - m);
        }
        psi.set_coeff(p, num / lambda.minus_one(p)?);
    }
    Ok(psi)
}

/// Bump `xi` making the `w^(k+1)` coefficient constant:
/// `xi_n = alpha_{k+1,n} / (lambda^n - 1)`, `xi_0 = 0`.
///
/// Requires `a_0 = 0`, `a_1 = 1` and `a_2, ..., a_k` constant in `z`.
pub fn solve_order_bump<T: Real>(germ: &SkewGerm<T>, k: usize) -> Result<TruncatedSeries<T>> {
    if k < 1 || k + 1 > germ.degree_w() {
        return Err(Error::Precondition(format!(
            "bump order {k} needs 1 <= k < D_w = {}",
            germ.degree_w()
        )));
    }
    let scale = germ_scale_log2(germ);
    check_parabolic_fiber(germ, scale)?;
    let one = ScaledComplex::from_real(T::one());
    for j in 0..=k {
        let a = germ.coeff(j);
        for (i, &c) in a.coeffs().iter().enumerate() {
            let c = if i == 0 && j == 1 { c - one } else { c };
            if (i > 0 || j <= 1) && !small(c, scale) {
                return Err(Error::Precondition(format!(
                    "bump order {k} needs constant coefficients below w^{}; a_{j} has z^{i} term",
                    k + 1
                )));
            }
        }
    }
    let n = germ.order_z();
    let lambda = germ.lambda_powers();
    let alpha = germ.coeff(k + 1);
    let mut xi = TruncatedSeries::zero(n);
    for p in 1..=n {
        xi.set_coeff(p, alpha.coeff(p) / lambda.minus_one(p)?);
    }
    Ok(xi)
}
