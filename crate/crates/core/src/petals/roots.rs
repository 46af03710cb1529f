//! Polynomial roots by simultaneous Aberth-Ehrlich iteration.
//!
//! Exact zero roots are split off first; nearly coincident roots (multiple
//! roots converge only to `eps^(1/m)`) are replaced by their centroid.

use num_complex::Complex;

use crate::scalar::Real;

const MAX_ITERATIONS: usize = 500;

/// A root estimate and whether the iteration met its stopping test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root<T> {
    pub value: Complex<T>,
    pub converged: bool,
}

/// Roots of `sum_j c_j w^j` with multiplicity; trailing zero coefficients are ignored.
pub fn polynomial_roots<T: Real>(coeffs: &[Complex<T>]) -> Vec<Root<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let Some(top) = coeffs.iter().rposition(|c| *c != zero) else {
        return Vec::new();
    };
    let low = coeffs.iter().position(|c| *c != zero).unwrap_or(0);
    let mut roots: Vec<Root<T>> = (0..low)
        .map(|_| Root {
            value: zero,
            converged: true,
        })
        .collect();
    let reduced = &coeffs[low..=top];
    let degree = reduced.len() - 1;
    if degree == 0 {
        return roots;
    }
    let lead = reduced[degree];
    let monic: Vec<Complex<T>> = reduced.iter().map(|c| *c / lead).collect();
    if degree == 1 {
        roots.push(Root {
            value: -monic[0],
            converged: true,
        });
        return roots;
    }
    let found = aberth(&monic);
    roots.extend(merge_clusters(&monic, found));
    roots
}

fn aberth<T: Real>(monic: &[Complex<T>]) -> Vec<Root<T>> {
    let degree = monic.len() - 1;
    // Cauchy bound on the root moduli.
    let bound = T::one() + monic[..degree].iter().map(|c| c.norm()).fold(T::zero(), T::max);
    let radius = bound * T::of(0.5);
    let mut z: Vec<Complex<T>> = (0..degree)
        .map(|i| {
            let angle = T::TAU() * T::from_usize(i).unwrap() / T::from_usize(degree).unwrap() + T::of(0.4);
            Complex::from_polar(radius, angle)
        })
        .collect();
    let mut done = vec![false; degree];
    let eps = T::epsilon() * T::of(16.0);
    for _ in 0..MAX_ITERATIONS {
        let mut all_done = true;
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let (p, dp) = eval_with_derivative(monic, z[i]);
            if p.norm() == T::zero() {
                done[i] = true;
                continue;
            }
            let ratio = p / dp;
            let mut repulsion = Complex::new(T::zero(), T::zero());
            for (j, zj) in z.iter().enumerate() {
                if j != i {
                    repulsion = repulsion + (z[i] - *zj).inv();
                }
            }
            let step = ratio / (Complex::new(T::one(), T::zero()) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] = z[i] - step;
            if step.norm() <= eps * z[i].norm().max(T::one()) {
                done[i] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    z.into_iter()
        .zip(done)
        .map(|(value, converged)| Root { value, converged })
        .collect()
}

/// Replaces groups of roots closer than the multiple-root accuracy by their
/// centroid, polished by Newton on the derivative where the root is simple.
fn merge_clusters<T: Real>(monic: &[Complex<T>], mut roots: Vec<Root<T>>) -> Vec<Root<T>> {
    let radius = T::of(1e-5);
    let n = roots.len();
    let mut group = vec![usize::MAX; n];
    for i in 0..n {
        if group[i] != usize::MAX {
            continue;
        }
        group[i] = i;
        for j in i + 1..n {
            if group[j] == usize::MAX && (roots[i].value - roots[j].value).norm() < radius * roots[i].value.norm().max(T::one()) {
                group[j] = i;
            }
        }
    }
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&i| group[i] == g).collect();
        if members.len() > 1 {
            let sum = members.iter().fold(Complex::new(T::zero(), T::zero()), |acc, &i| acc + roots[i].value);
            let mut centroid = sum / T::from_usize(members.len()).unwrap();
            let mut d = monic.to_vec();
            for _ in 1..members.len() {
                d = derivative(&d);
            }
            for _ in 0..8 {
                let (p, dp) = eval_with_derivative(&d, centroid);
                let step = p / dp;
                if !step.re.is_finite() || !step.im.is_finite() || step.norm() > radius {
                    break;
                }
                centroid = centroid - step;
            }
            for &i in &members {
                roots[i].value = centroid;
            }
        }
    }
    roots
}

fn eval_with_derivative<T: Real>(c: &[Complex<T>], w: Complex<T>) -> (Complex<T>, Complex<T>) {
    crate::series::horner_with_derivative(c, w)
}

/// Coefficients of `p(center + v)` in powers of `v` (Taylor shift).
pub fn taylor_shift<T: Real>(coeffs: &[Complex<T>], center: Complex<T>) -> Vec<Complex<T>> {
    let mut c = coeffs.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n - 1).rev() {
            let next = c[j + 1];
            c[j] = c[j] + center * next;
        }
    }
    c
}

/// Derivative coefficients.
pub fn derivative<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, c)| *c * T::from_usize(j).unwrap())
        .collect()
}
