//! Polynomials in `w` with truncated-series coefficients, cut at a fixed `w`-degree.
//!
//! Entry `j` of a slice is the coefficient of `w^j`.

use super::truncated::TruncatedSeries;
use crate::error::Result;
use crate::scalar::Real;

pub(crate) fn zero<T: Real>(order_z: usize, degree_w: usize) -> Vec<TruncatedSeries<T>> {
    vec![TruncatedSeries::zero(order_z); degree_w + 1]
}

pub(crate) fn mul<T: Real>(a: &[TruncatedSeries<T>], b: &[TruncatedSeries<T>]) -> Result<Vec<TruncatedSeries<T>>> {
    let dw = a.len() - 1;
    let mut out = zero(a[0].order(), dw);
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b[..=dw - i].iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = out[i + j].add(&x.mul(y)?)?;
            }
        }
    }
    Ok(out)
}

/// `sum_j outer[j] * inner^j`, Horner in `w`.
///
/// Exact modulo `w^(D+1)` when `inner` has no `w^0` term; otherwise terms of
/// `outer` above degree `D` that would feed lower degrees are missing.
pub(crate) fn compose<T: Real>(
    outer: &[TruncatedSeries<T>],
    inner: &[TruncatedSeries<T>],
) -> Result<Vec<TruncatedSeries<T>>> {
    let n = inner[0].order();
    let dw = inner.len() - 1;
    let mut acc = zero(n, dw);
    for c in outer.iter().rev() {
        acc = mul(&acc, inner)?;
        acc[0] = acc[0].add(c)?;
    }
    Ok(acc)
}
