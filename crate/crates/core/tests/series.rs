use std::sync::Arc;

use num_complex::Complex;
use proptest::prelude::*;
use skewfiber::series::{
    conjugate, horner, random_parabolic_germ, residual_invariant_curve, reversion_in_w, FiberChange, LambdaPowers,
    TruncatedSeries,
};
use skewfiber::{RotationNumber, ScaledComplex};

type C = Complex<f64>;

fn golden(n: usize) -> Arc<LambdaPowers<f64>> {
    LambdaPowers::shared(RotationNumber::golden().into_shared(), n).unwrap()
}

fn unit_disk() -> impl Strategy<Value = C> {
    (0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| C::from_polar(r, t))
}

fn series(order: usize) -> impl Strategy<Value = TruncatedSeries<f64>> {
    prop::collection::vec(unit_disk(), order + 1).prop_map(move |v| TruncatedSeries::from_complex(order, &v))
}

/// Series with `s(0) = 0`.
fn vanishing(order: usize) -> impl Strategy<Value = TruncatedSeries<f64>> {
    series(order).prop_map(|mut s| {
        s.set_coeff(0, ScaledComplex::from_real(0.0));
        s
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn multiplication_is_associative(a in series(12), b in series(12), c in series(12)) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn multiplication_distributes(a in series(12), b in series(12), c in series(12)) {
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(left.approx_eq(&right, 1e-12));
    }

    #[test]
    fn multiplication_commutes(a in series(9), b in series(9)) {
        prop_assert!(a.mul(&b).unwrap().approx_eq(&b.mul(&a).unwrap(), 1e-14));
    }

    #[test]
    fn inverse_is_multiplicative(mut a in series(10)) {
        a.set_coeff(0, ScaledComplex::from_real(1.5));
        let prod = a.mul(&a.inverse().unwrap()).unwrap();
        prop_assert!(prod.approx_eq(&TruncatedSeries::one(10), 1e-12));
    }

    #[test]
    fn power_matches_repeated_product(a in series(8), e in 0u32..6) {
        let mut acc = TruncatedSeries::one(8);
        for _ in 0..e {
            acc = acc.mul(&a).unwrap();
        }
        prop_assert!(a.pow(e).approx_eq(&acc, 1e-12));
    }

    #[test]
    fn composition_agrees_pointwise(a in series(10), b in vanishing(10), z in unit_disk()) {
        let z = z * 0.05;
        let direct = a.eval(b.eval(z));
        let composed = a.compose(&b).unwrap().eval(z);
        prop_assert!((direct - composed).norm() <= 1e-9 * (1.0 + direct.norm()));
    }

    #[test]
    fn scaled_arithmetic_matches_plain(
        (ma, ea) in (unit_disk(), -400i32..400),
        (mb, eb) in (unit_disk(), -90i32..90),
    ) {
        prop_assume!(ma.norm() > 1e-3 && mb.norm() > 1e-3);
        let a = ma * 2f64.powi(ea);
        let b = mb * 2f64.powi(eb);
        let sa = ScaledComplex::from_complex(a);
        let sb = ScaledComplex::from_complex(b);
        let close = |s: ScaledComplex<f64>, x: C| (s.to_complex() - x).norm() <= 1e-14 * x.norm();
        prop_assert!(close(sa * sb, a * b));
        prop_assert!(close(sa / sb, a / b));
        prop_assert!(close(sa + sa, a + a));
        prop_assert!(close(sb + sb.scale(0.5), b + b * 0.5));
    }

    #[test]
    fn reversion_round_trip(h in vanishing(8), k in 1usize..4) {
        let dw = 10;
        let inv = reversion_in_w(&h, k, dw);
        // forward(inverse(w)) = inverse + h inverse^{k+1}, checked pointwise in w
        let z = C::new(0.03, -0.02);
        let w = C::new(0.01, 0.005);
        let coeffs: Vec<C> = inv.iter().map(|s| s.eval(z)).collect();
        let v = horner(&coeffs, w);
        let back = v + h.eval(z) * v.powu(k as u32 + 1);
        prop_assert!((back - w).norm() <= 1e-9 * w.norm());
        prop_assert_eq!(&inv[k + 1], &h.neg());
    }
}

fn round_trip_distance(change: FiberChange<f64>, seed: u64) -> f64 {
    let lp = golden(32);
    let g = random_parabolic_germ(lp, 4, 32, 10, seed).unwrap();
    let there = conjugate(&g, &change).unwrap();
    let back = conjugate(&there, &change.inverse().unwrap()).unwrap();
    back.rel_distance(&g).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn shift_round_trip(phi in vanishing(32), seed in 0u64..1000) {
        let phi = phi.scale(ScaledComplex::from_real(0.3));
        prop_assert!(round_trip_distance(FiberChange::Shift(phi), seed) <= 1e-9);
    }

    #[test]
    fn gauge_round_trip(psi in series(32), seed in 0u64..1000) {
        let mut psi = psi.scale(ScaledComplex::from_real(0.3));
        psi.set_coeff(0, ScaledComplex::from_real(0.1));
        prop_assert!(round_trip_distance(FiberChange::Gauge(psi), seed) <= 1e-9);
    }

    #[test]
    fn scale_round_trip(c in unit_disk(), seed in 0u64..1000) {
        prop_assume!(c.norm() > 0.2);
        prop_assert!(round_trip_distance(FiberChange::WScale(c), seed) <= 1e-9);
    }
}

#[test]
fn cube_of_one_plus_z() {
    let s = TruncatedSeries::from_complex(3, &[C::new(1.0, 0.0), C::new(1.0, 0.0)]);
    let cube = s.pow(3);
    for (n, want) in [1.0, 3.0, 3.0, 1.0].iter().enumerate() {
        assert_eq!(cube.coeff(n).to_complex(), C::new(*want, 0.0));
    }
}

#[test]
fn residual_matches_pointwise_evaluation() {
    let lp = golden(20);
    let g = random_parabolic_germ(lp.clone(), 3, 20, 3, 5).unwrap();
    let phi = TruncatedSeries::from_complex(20, &[C::new(0.0, 0.0), C::new(0.4, 0.1), C::new(-0.3, 0.2), C::new(0.1, 0.0)]);
    let r = residual_invariant_curve(&g, &phi).unwrap();
    // With |z| small the truncation error sits far below 1e-9 relative.
    for i in 0..20 {
        let z = C::from_polar(0.02, i as f64 * 0.31);
        let fiber: Vec<C> = g.coeffs().iter().map(|a| a.eval(z)).collect();
        let direct = horner(&fiber, phi.eval(z)) - phi.eval(lp.lambda() * z);
        let from_series = r.eval(z);
        assert!((direct - from_series).norm() <= 1e-9 * direct.norm().max(1e-300), "{direct} {from_series}");
    }
}

#[test]
fn truncation_mismatch_in_conjugate() {
    let lp = golden(8);
    let g = random_parabolic_germ(lp, 2, 8, 3, 1).unwrap();
    assert!(conjugate(&g, &FiberChange::Shift(TruncatedSeries::zero(4))).is_err());
}
