use num_complex::Complex;

use super::orbit::{Classifier, FiberPolynomial, OrbitConfig, Verdict};
use super::roots::{derivative, polynomial_roots};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Verdict for one critical point of `g_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalOrbit<T> {
    pub point: Complex<T>,
    /// False when the root finder stopped before meeting its tolerance.
    pub converged: bool,
    pub verdict: Verdict<T>,
    pub n_stop: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisReport<T> {
    pub critical: Vec<CriticalOrbit<T>>,
    /// Every critical orbit lands in an attracting basin or a parabolic petal.
    pub plausible: bool,
}

/// Iterates each critical point of `g_0` (roots of `g_0'` by Aberth iteration).
pub fn critical_orbit_check<T: Real>(g0: &[Complex<T>], config: OrbitConfig<T>) -> Result<HypothesisReport<T>> {
    let degree = g0.iter().rposition(|c| c.norm() > T::zero()).unwrap_or(0);
    if degree < 2 {
        return Err(Error::Precondition(format!("fiber polynomial has degree {degree}, need at least 2")));
    }
    let map = FiberPolynomial(g0[..=degree].to_vec());
    let classifier = Classifier::new(&map, Complex::new(T::zero(), T::zero()), OrbitConfig { run_to_end: false, ..config })?;
    let critical: Vec<CriticalOrbit<T>> = polynomial_roots(&derivative(&map.0))
        .into_iter()
        .map(|r| {
            let c = classifier.classify(r.value);
            CriticalOrbit {
                point: r.value,
                converged: r.converged,
                verdict: c.verdict,
                n_stop: c.n_stop,
            }
        })
        .collect();
    let plausible = !critical.is_empty()
        && critical
            .iter()
            .all(|c| matches!(c.verdict, Verdict::AttractingBasin { .. } | Verdict::ParabolicPetal { .. }));
    Ok(HypothesisReport { critical, plausible })
}
