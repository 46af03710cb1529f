use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lambda::LambdaPowers;
use super::truncated::TruncatedSeries;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::scaled::ScaledComplex;
use crate::smalldiv::RotationSpec;

/// Default radius of validity for the `z` expansions.
pub const DEFAULT_RADIUS: f64 = 0.1;

/// Germ `F(z, w) = (lambda z, sum_j a_j(z) w^j)` truncated at `z^N` and `w^(D_w)`.
#[derive(Clone, Debug)]
pub struct SkewGerm<T> {
    lambda: Arc<LambdaPowers<T>>,
    degree: usize,
    coeffs: Vec<TruncatedSeries<T>>,
    radius: T,
}

impl<T: Real> SkewGerm<T> {
    /// `coeffs[j]` is `a_j`; `coeffs.len() - 1` fixes `D_w`.
    pub fn new(lambda: Arc<LambdaPowers<T>>, degree: usize, coeffs: Vec<TruncatedSeries<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Malformed("germ needs at least one w-coefficient".into()));
        }
        let n = coeffs[0].order();
        if let Some(bad) = coeffs.iter().find(|c| c.order() != n) {
            return Err(Error::TruncationMismatch {
                left: n,
                right: bad.order(),
            });
        }
        let dw = coeffs.len() - 1;
        if degree < 1 || degree > dw {
            return Err(Error::Malformed(format!(
                "need 1 <= degree <= D_w, got degree {degree}, D_w {dw}"
            )));
        }
        if lambda.max_power() < n {
            return Err(Error::Precondition(format!(
                "lambda table holds powers up to {}, z-order is {n}",
                lambda.max_power()
            )));
        }
        Ok(Self {
            lambda,
            degree,
            coeffs,
            radius: T::of(DEFAULT_RADIUS),
        })
    }

    /// Germ from plain complex coefficient lists `a_j = sum_n c[j][n] z^n`.
    pub fn from_complex(
        lambda: Arc<LambdaPowers<T>>,
        degree: usize,
        order_z: usize,
        degree_w: usize,
        coeffs: &[Vec<Complex<T>>],
    ) -> Result<Self> {
        if coeffs.len() > degree_w + 1 {
            return Err(Error::Malformed(format!(
                "{} w-coefficients exceed D_w = {degree_w}",
                coeffs.len()
            )));
        }
        let mut series: Vec<_> = coeffs.iter().map(|c| TruncatedSeries::from_complex(order_z, c)).collect();
        series.resize(degree_w + 1, TruncatedSeries::zero(order_z));
        Self::new(lambda, degree, series)
    }

    pub fn with_radius(mut self, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::Malformed("radius must be positive".into()));
        }
        self.radius = radius;
        Ok(self)
    }

    /// Same base rotation, degree and radius; new coefficients.
    pub fn with_coeffs(&self, coeffs: Vec<TruncatedSeries<T>>) -> Result<Self> {
        let germ = Self::new(self.lambda.clone(), self.degree, coeffs)?;
        germ.with_radius(self.radius)
    }

    pub fn lambda_powers(&self) -> &Arc<LambdaPowers<T>> {
        &self.lambda
    }

    pub fn lambda(&self) -> Complex<T> {
        self.lambda.lambda()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order_z(&self) -> usize {
        self.coeffs[0].order()
    }

    pub fn degree_w(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn coeffs(&self) -> &[TruncatedSeries<T>] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &TruncatedSeries<T> {
        &self.coeffs[j]
    }

    /// `a_j(0)` for every `j`: the vertical map over the invariant fiber.
    pub fn fiber_jet(&self) -> Vec<Complex<T>> {
        self.coeffs.iter().map(|c| c.coeff(0).to_complex()).collect()
    }

    /// True when `a_0(0) = 0` and `a_1(0) = 1` within `tol`.
    pub fn is_parabolic_fiber(&self, tol: T) -> bool {
        let jet = self.fiber_jet();
        jet[0].norm() <= tol && jet.get(1).is_some_and(|a1| (*a1 - T::one()).norm() <= tol)
    }

    /// Coefficients of `w -> g_z(w)` at a point with `|z| < radius`.
    pub fn fiber_at(&self, z: Complex<T>) -> Result<Vec<Complex<T>>> {
        if z.norm() >= self.radius {
            return Err(Error::OutsideRadius {
                modulus: z.norm().to_f64_lossy(),
                radius: self.radius.to_f64_lossy(),
            });
        }
        Ok(self.fiber_unchecked(z))
    }

    pub(crate) fn fiber_unchecked(&self, z: Complex<T>) -> Vec<Complex<T>> {
        self.coeffs.iter().map(|c| c.eval(z)).collect()
    }

    /// `F(z, w)`.
    pub fn eval(&self, z: Complex<T>, w: Complex<T>) -> Result<(Complex<T>, Complex<T>)> {
        let fiber = self.fiber_at(z)?;
        Ok((self.lambda() * z, horner(&fiber, w)))
    }

    /// Largest coefficient modulus over all `a_{j,n}`, as `log2`.
    pub fn max_log2(&self) -> T {
        self.coeffs.iter().map(|c| c.max_log2()).fold(T::neg_infinity(), T::max)
    }

    /// Largest relative coefficient gap to another germ with the same truncations.
    pub fn rel_distance(&self, other: &Self) -> Result<T> {
        if self.degree_w() != other.degree_w() {
            return Err(Error::TruncationMismatch {
                left: self.degree_w(),
                right: other.degree_w(),
            });
        }
        let scale = self.max_log2().max(other.max_log2());
        let mut worst = T::zero();
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            let d = a.sub(b)?.max_log2();
            if d > T::neg_infinity() {
                worst = worst.max((d - scale).exp2());
            }
        }
        Ok(worst)
    }
}

/// Pseudorandom germ with `a_0(0) = 0`, `a_1(0) = 1`, every other coefficient
/// uniform in the unit disk and `a_j = 0` above `degree`.
pub fn random_parabolic_germ<T: Real>(
    lambda: Arc<LambdaPowers<T>>,
    degree: usize,
    order_z: usize,
    degree_w: usize,
    seed: u64,
) -> Result<SkewGerm<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut unit_disk = || loop {
        let re: f64 = rng.gen_range(-1.0..1.0);
        let im: f64 = rng.gen_range(-1.0..1.0);
        if re * re + im * im < 1.0 {
            return Complex::new(T::of(re), T::of(im));
        }
    };
    let mut coeffs = Vec::with_capacity(degree + 1);
    for j in 0..=degree.min(degree_w) {
        let mut c: Vec<Complex<T>> = (0..=order_z).map(|_| unit_disk()).collect();
        match j {
            0 => c[0] = Complex::new(T::zero(), T::zero()),
            1 => c[0] = Complex::new(T::one(), T::zero()),
            _ => {}
        }
        coeffs.push(c);
    }
    SkewGerm::from_complex(lambda, degree, order_z, degree_w, &coeffs)
}

/// `sum_j c_j w^j`.
pub fn horner<T: Real>(coeffs: &[Complex<T>], w: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::new(T::zero(), T::zero()), |acc, &c| acc * w + c)
}

/// `(sum_j c_j w^j, sum_j j c_j w^(j-1))`.
pub fn horner_with_derivative<T: Real>(coeffs: &[Complex<T>], w: Complex<T>) -> (Complex<T>, Complex<T>) {
    let zero = Complex::new(T::zero(), T::zero());
    coeffs.iter().rev().fold((zero, zero), |(p, dp), &c| (p * w + c, dp * w + p))
}

/// One coefficient on the wire: `[re, im, exp2]` for `(re + i im) 2^exp2`, or `[re, im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffJson {
    Scaled(f64, f64, i64),
    Plain(f64, f64),
}

impl CoeffJson {
    pub fn from_scaled<T: Real>(c: &ScaledComplex<T>) -> Self {
        let m = c.mantissa();
        CoeffJson::Scaled(m.re.to_f64_lossy(), m.im.to_f64_lossy(), c.exponent())
    }

    pub fn to_scaled<T: Real>(self) -> Result<ScaledComplex<T>> {
        let (re, im, e) = match self {
            CoeffJson::Scaled(re, im, e) => (re, im, e),
            CoeffJson::Plain(re, im) => (re, im, 0),
        };
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::Malformed("non-finite coefficient".into()));
        }
        Ok(ScaledComplex::new(Complex::new(T::of(re), T::of(im)), e))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub z: usize,
    pub w: usize,
}

/// Germ file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GermSpec {
    pub rotation: RotationSpec,
    pub degree: usize,
    pub trunc: Truncation,
    /// `coeffs[j][n]` is the `z^n w^j` coefficient; short lists are zero-padded.
    pub coeffs: Vec<Vec<CoeffJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl GermSpec {
    pub fn to_germ<T: Real>(&self) -> Result<SkewGerm<T>> {
        let rot = self.rotation.to_rotation()?.into_shared();
        let lambda = LambdaPowers::shared(rot, self.trunc.z.max(1))?;
        self.to_germ_with(lambda)
    }

    /// Builds the germ on an existing table of powers of lambda.
    pub fn to_germ_with<T: Real>(&self, lambda: Arc<LambdaPowers<T>>) -> Result<SkewGerm<T>> {
        let (n, dw) = (self.trunc.z, self.trunc.w);
        if self.coeffs.len() > dw + 1 {
            return Err(Error::Malformed(format!(
                "{} w-coefficients exceed trunc.w = {dw}",
                self.coeffs.len()
            )));
        }
        let mut series = Vec::with_capacity(dw + 1);
        for (j, list) in self.coeffs.iter().enumerate() {
            if list.len() > n + 1 {
                return Err(Error::Malformed(format!(
                    "a_{j} has {} z-coefficients, trunc.z = {n}",
                    list.len()
                )));
            }
            let mut s = TruncatedSeries::zero(n);
            for (i, c) in list.iter().enumerate() {
                s.set_coeff(i, c.to_scaled()?);
            }
            series.push(s);
        }
        series.resize(dw + 1, TruncatedSeries::zero(n));
        let germ = SkewGerm::new(lambda, self.degree, series)?;
        match self.radius {
            Some(r) => germ.with_radius(T::of(r)),
            None => Ok(germ),
        }
    }

    pub fn from_germ<T: Real>(germ: &SkewGerm<T>, rotation: RotationSpec) -> Self {
        Self {
            rotation,
            degree: germ.degree(),
            trunc: Truncation {
                z: germ.order_z(),
                w: germ.degree_w(),
            },
            coeffs: germ
                .coeffs()
                .iter()
                .map(|s| s.coeffs().iter().map(CoeffJson::from_scaled).collect())
                .collect(),
            radius: Some(germ.radius().to_f64_lossy()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smalldiv::RotationNumber;

    fn lambda(n: usize) -> Arc<LambdaPowers<f64>> {
        LambdaPowers::shared(RotationNumber::golden().into_shared(), n).unwrap()
    }

    #[test]
    fn validation() {
        let lp = lambda(4);
        let ok = SkewGerm::from_complex(lp.clone(), 2, 4, 3, &[vec![], vec![Complex::new(1.0, 0.0)]]);
        assert!(ok.is_ok());
        assert!(SkewGerm::from_complex(lp.clone(), 4, 4, 3, &[]).is_err());
        assert!(SkewGerm::from_complex(lp.clone(), 2, 5, 3, &[]).is_err());
        let mixed = vec![TruncatedSeries::zero(4), TruncatedSeries::zero(3)];
        assert!(matches!(
            SkewGerm::new(lp, 1, mixed),
            Err(Error::TruncationMismatch { .. })
        ));
    }

    #[test]
    fn evaluation_and_radius() {
        let one = Complex::new(1.0, 0.0);
        let g = SkewGerm::from_complex(lambda(3), 2, 3, 2, &[vec![], vec![one], vec![one, one]]).unwrap();
        let z = Complex::new(0.05, 0.0);
        let w = Complex::new(0.5, 0.0);
        let (z1, w1) = g.eval(z, w).unwrap();
        assert!((z1 - g.lambda() * z).norm() < 1e-16);
        assert!((w1 - (w + 1.05 * w * w)).norm() < 1e-15);
        assert!(matches!(g.eval(Complex::new(0.2, 0.0), w), Err(Error::OutsideRadius { .. })));
        assert!(g.is_parabolic_fiber(1e-12));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"rotation":{"kind":"surd","p":-1,"q":1,"r":5,"s":2},
            "degree":2,"trunc":{"z":3,"w":4},
            "coeffs":[[],[[1,0,0]],[[1.5,0,-1],[0,1]]]}"#;
        let spec: GermSpec = serde_json::from_str(text).unwrap();
        let g: SkewGerm<f64> = spec.to_germ().unwrap();
        assert_eq!(g.degree_w(), 4);
        assert_eq!(g.coeff(2).coeff(0).to_complex(), Complex::new(0.75, 0.0));
        assert_eq!(g.coeff(2).coeff(1).to_complex(), Complex::new(0.0, 1.0));
        let back = GermSpec::from_germ(&g, spec.rotation.clone());
        let again: SkewGerm<f64> = back.to_germ().unwrap();
        assert_eq!(again.rel_distance(&g).unwrap(), 0.0);
        let bad = r#"{"rotation":{"kind":"surd","p":-1,"q":1,"r":5,"s":2},
            "degree":2,"trunc":{"z":1,"w":2},"coeffs":[[[0,0],[0,0],[1,0]]]}"#;
        let spec: GermSpec = serde_json::from_str(bad).unwrap();
        assert!(spec.to_germ::<f64>().is_err());
    }

    #[test]
    fn derivative_by_horner() {
        let c = [Complex::new(1.0, 0.0), Complex::new(2.0, 0.0), Complex::new(3.0, 0.0)];
        let (p, dp) = horner_with_derivative(&c, Complex::new(2.0, 0.0));
        assert_eq!(p, Complex::new(17.0, 0.0));
        assert_eq!(dp, Complex::new(14.0, 0.0));
    }
}
