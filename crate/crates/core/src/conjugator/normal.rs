use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use super::base::{base_residual, linearize_base, pull_back_base};
use super::lemmas::{germ_scale_log2, solve_invariant_curve, solve_linear_gauge, solve_order_bump};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaled::ScaledComplex;
use crate::series::{conjugate, conjugate_all, residual_invariant_curve, FiberChange, LambdaPowers, SkewGerm, TruncatedSeries};

/// A jet coefficient counts as zero below this fraction of the largest one.
pub const ORDER_DETECTION_TOL: f64 = 1e-10;

/// Residual of one pipeline step, relative to `max(1, max |coefficient|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub stage: String,
    pub residual: f64,
}

/// Changes applied by the pipeline, in order, plus the base linearization.
#[derive(Clone, Debug, Default)]
pub struct ChangeLog<T> {
    pub sigma: Option<TruncatedSeries<T>>,
    pub changes: Vec<FiberChange<T>>,
}

impl<T: Real> ChangeLog<T> {
    /// Conjugates `germ` by every logged fiber change.
    pub fn replay(&self, germ: &SkewGerm<T>) -> Result<SkewGerm<T>> {
        conjugate_all(germ, &self.changes)
    }
}

/// Fiber normal form `w + g_{k+1} w^{k+1} + ... + g_{k+h+1} w^{k+h+1} + sum_m alpha_m(z) w^m`.
#[derive(Clone, Debug)]
pub struct NormalForm<T> {
    pub k: usize,
    pub h: usize,
    /// Constants at `w^(k+1) ..= w^(k+h+1)`.
    pub jet: Vec<Complex<T>>,
    /// Coefficient of `w^(2k+1)` once the parabolic reduction has run.
    pub b: Option<Complex<T>>,
    /// `w`-degree of `tail[0]`.
    pub tail_start: usize,
    pub tail: Vec<TruncatedSeries<T>>,
    /// The conjugated germ itself.
    pub germ: SkewGerm<T>,
    pub stages: Vec<StageReport>,
}

impl<T: Real> NormalForm<T> {
    /// Largest `|a_{j,n}|`, `n >= 1`, over `w`-degrees `j < tail_start`, relative
    /// to the germ scale: zero for an exact normal form.
    pub fn jet_z_dependence(&self) -> T {
        let scale = germ_scale_log2(&self.germ);
        let mut worst = T::zero();
        for j in 0..self.tail_start.min(self.germ.degree_w() + 1) {
            for c in &self.germ.coeff(j).coeffs()[1..] {
                worst = worst.max((c.log2_abs() - scale).exp2());
            }
        }
        worst
    }

    /// `max_m |alpha_m(0) - g_{0,m}|` over the tail.
    pub fn tail_alignment(&self, g0: &[Complex<T>]) -> T {
        self.tail
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let m = self.tail_start + i;
                let target = g0.get(m).copied().unwrap_or_else(Complex::zero);
                (s.coeff(0).to_complex() - target).norm()
            })
            .fold(T::zero(), T::max)
    }
}

/// Least `k` with `|g_{0,k+1}|` above the detection cliff.
pub fn parabolic_order<T: Real>(g0: &[Complex<T>]) -> Result<usize> {
    let scale = g0.iter().skip(1).map(|c| c.norm()).fold(T::one(), T::max);
    let cliff = T::of(ORDER_DETECTION_TOL) * scale;
    g0.iter()
        .enumerate()
        .skip(2)
        .find(|(_, c)| c.norm() >= cliff)
        .map(|(j, _)| j - 1)
        .ok_or(Error::IdenticallyLinearFiber)
}

fn relative<T: Real>(s: &TruncatedSeries<T>, scale_log2: T) -> f64 {
    let d = s.max_log2();
    if d == T::neg_infinity() {
        0.0
    } else {
        (d - scale_log2).exp2().to_f64_lossy()
    }
}

/// Normalizes the fiber to depth `h_target`: invariant curve, linear gauge,
/// then bumps making `w^2 ..= w^(k+h_target+1)` constant in `z`.
pub fn normalize<T: Real>(germ: &SkewGerm<T>, h_target: usize) -> Result<(NormalForm<T>, ChangeLog<T>)> {
    let g0 = germ.fiber_jet();
    let tol = T::of(ORDER_DETECTION_TOL);
    if g0[0].norm() > tol || g0.get(1).map_or(true, |a| (*a - T::one()).norm() > tol) {
        return Err(Error::Precondition("need g_0(0) = 0 and g_0'(0) = 1".into()));
    }
    let k = parabolic_order(&g0)?;
    let top = k + h_target + 1;
    if top > germ.degree_w() {
        return Err(Error::Precondition(format!(
            "depth {h_target} at order {k} needs D_w >= {top}, have {}",
            germ.degree_w()
        )));
    }
    let mut log = ChangeLog {
        sigma: None,
        changes: Vec::new(),
    };
    let mut stages = Vec::new();
    let mut current = germ.clone();

    let phi = solve_invariant_curve(&current)?;
    let residual = residual_invariant_curve(&current, &phi)?;
    let scale = germ_scale_log2(&current).max(phi.max_log2());
    stages.push(StageReport {
        stage: "invariant_curve".into(),
        residual: relative(&residual, scale),
    });
    let change = FiberChange::Shift(phi);
    current = conjugate(&current, &change)?;
    log.changes.push(change);

    let psi = solve_linear_gauge(&current)?;
    let change = FiberChange::Gauge(psi);
    current = conjugate(&current, &change)?;
    log.changes.push(change);
    let mut linear = current.coeff(1).clone();
    linear.set_coeff(0, linear.coeff(0) - ScaledComplex::from_real(T::one()));
    stages.push(StageReport {
        stage: "linear_gauge".into(),
        residual: relative(&linear, germ_scale_log2(&current)),
    });

    for m in 2..=top {
        let xi = solve_order_bump(&current, m - 1)?;
        let change = FiberChange::Bump { h: xi, k: m - 1 };
        current = conjugate(&current, &change)?;
        log.changes.push(change);
        let mut varying = current.coeff(m).clone();
        varying.set_coeff(0, ScaledComplex::zero());
        stages.push(StageReport {
            stage: format!("bump_w{m}"),
            residual: relative(&varying, germ_scale_log2(&current)),
        });
    }

    let nf = NormalForm {
        k,
        h: h_target,
        jet: (k + 1..=top).map(|m| current.coeff(m).coeff(0).to_complex()).collect(),
        b: None,
        tail_start: top + 1,
        tail: current.coeffs()[top + 1..].to_vec(),
        germ: current,
        stages,
    };
    Ok((nf, log))
}

/// Linearizes a base map `f` first, then normalizes the pulled-back germ.
pub fn normalize_with_base<T: Real>(
    f: &TruncatedSeries<T>,
    lambda: Arc<LambdaPowers<T>>,
    degree: usize,
    coeffs: &[TruncatedSeries<T>],
    h_target: usize,
) -> Result<(NormalForm<T>, ChangeLog<T>)> {
    let sigma = linearize_base(f, &lambda)?;
    let residual = base_residual(f, &sigma, &lambda)?;
    let germ = pull_back_base(lambda, degree, coeffs, &sigma)?;
    let (mut nf, mut log) = normalize(&germ, h_target)?;
    nf.stages.insert(
        0,
        StageReport {
            stage: "base_linearization".into(),
            residual: relative(&residual, sigma.max_log2().max(T::zero())),
        },
    );
    log.sigma = Some(sigma);
    Ok((nf, log))
}

/// Brings a normal form of depth `h >= k` to `w - w^(k+1) + b w^(2k+1) + sum_{m >= 2k+2} beta_m(z) w^m`.
///
/// A scaling `w -> c w` with `c^k g_{k+1} = -1` (principal root) comes first,
/// then `w -> w + q w^(j-k)` with `q = c_j / (2k+1-j)` clears `w^j` for
/// `j = k+2 ..= 2k`. Returns the reduced form and the changes applied.
pub fn reduce_parabolic_tail<T: Real>(nf: &NormalForm<T>) -> Result<(NormalForm<T>, Vec<FiberChange<T>>)> {
    let k = nf.k;
    if nf.h < k {
        return Err(Error::Precondition(format!(
            "parabolic reduction needs depth h >= k = {k}, have {}",
            nf.h
        )));
    }
    let lead = nf.jet[0];
    if lead.is_zero() {
        return Err(Error::Precondition("leading jet coefficient vanishes".into()));
    }
    let c = (-lead.inv()).powf(T::one() / T::from_usize(k).unwrap());
    let n = nf.germ.order_z();
    let mut changes = vec![FiberChange::WScale(c)];
    let mut current = conjugate(&nf.germ, &changes[0])?;
    for j in k + 2..=2 * k {
        let cj = current.coeff(j).coeff(0);
        let q = cj.scale(T::one() / T::from_usize(2 * k + 1 - j).unwrap());
        let change = FiberChange::Bump {
            h: TruncatedSeries::constant(n, q),
            k: j - k - 1,
        };
        current = conjugate(&current, &change)?;
        changes.push(change);
    }
    let top = k + nf.h + 1;
    let reduced = NormalForm {
        k,
        h: nf.h,
        jet: (k + 1..=top).map(|m| current.coeff(m).coeff(0).to_complex()).collect(),
        b: Some(current.coeff(2 * k + 1).coeff(0).to_complex()),
        tail_start: 2 * k + 2,
        tail: current.coeffs()[(2 * k + 2).min(current.degree_w() + 1)..].to_vec(),
        germ: current,
        stages: nf.stages.clone(),
    };
    Ok((reduced, changes))
}
