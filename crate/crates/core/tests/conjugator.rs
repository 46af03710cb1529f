use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use skewfiber::conjugator::{
    base_residual, linearize_base, normalize, normalize_with_base, reduce_parabolic_tail, solve_invariant_curve,
    solve_linear_gauge, solve_order_bump,
};
use skewfiber::series::{conjugate, random_parabolic_germ, residual_invariant_curve, FiberChange, LambdaPowers, SkewGerm, TruncatedSeries};
use skewfiber::{Error, RotationNumber};

type C = Complex<f64>;

fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

fn golden(n: usize) -> Arc<LambdaPowers<f64>> {
    LambdaPowers::shared(RotationNumber::golden().into_shared(), n).unwrap()
}

fn germ(lp: &Arc<LambdaPowers<f64>>, degree: usize, n: usize, dw: usize, coeffs: &[Vec<C>]) -> SkewGerm<f64> {
    SkewGerm::from_complex(lp.clone(), degree, n, dw, coeffs).unwrap()
}

/// `max |s_n|` relative to `max(1, scale)`.
fn rel(s: &TruncatedSeries<f64>, scale_log2: f64) -> f64 {
    (s.max_log2() - scale_log2.max(0.0)).exp2()
}

#[test]
fn base_linearization_examples() {
    let lp = golden(16);
    let l = lp.lambda();
    let identity = linearize_base(&TruncatedSeries::from_complex(16, &[c(0.0, 0.0), l]), &lp).unwrap();
    assert_eq!(identity, TruncatedSeries::from_complex(16, &[c(0.0, 0.0), c(1.0, 0.0)]));

    let quad = TruncatedSeries::from_complex(16, &[c(0.0, 0.0), l, c(1.0, 0.0)]);
    let sigma = linearize_base(&quad, &lp).unwrap();
    assert!((sigma.coeff(2).to_complex() - (l * l - l).inv()).norm() < 1e-14);

    let cubic = TruncatedSeries::from_complex(16, &[c(0.0, 0.0), l, c(0.3, -0.7), c(-0.5, 0.2)]);
    let sigma = linearize_base(&cubic, &lp).unwrap();
    let r = base_residual(&cubic, &sigma, &lp).unwrap();
    assert!(rel(&r, sigma.max_log2()) <= 1e-9);
}

#[test]
fn curve_vanishes_when_zero_section_is_invariant() {
    let lp = golden(8);
    let g = germ(&lp, 2, 8, 3, &[vec![], vec![c(1.0, 0.0), c(0.2, 0.1)], vec![c(1.0, 0.0), c(0.0, 1.0)]]);
    assert!(solve_invariant_curve(&g).unwrap().is_zero());
}

#[test]
fn curve_of_linear_example() {
    let lp = golden(6);
    let g = germ(&lp, 1, 6, 1, &[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)]]);
    let phi = solve_invariant_curve(&g).unwrap();
    assert_eq!(phi.coeff(0).to_complex(), c(0.0, 0.0));
    assert!((phi.coeff(1).to_complex() - (lp.lambda() - 1.0).inv()).norm() < 1e-14);
    // phi_n = phi_{n-1} / (lambda^n - 1)
    for n in 2..=6 {
        let expected = phi.coeff(n - 1).to_complex() / (lp.power(n) - 1.0);
        assert!((phi.coeff(n).to_complex() - expected).norm() <= 1e-12 * expected.norm());
    }
}

#[test]
fn curve_residual_on_random_germ() {
    let lp = golden(32);
    let g = random_parabolic_germ(lp, 3, 32, 3, 7).unwrap();
    let phi = solve_invariant_curve(&g).unwrap();
    let r = residual_invariant_curve(&g, &phi).unwrap();
    assert!(rel(&r, phi.max_log2().max(g.max_log2())) <= 1e-8);
}

#[test]
fn curve_rejects_non_parabolic_fiber() {
    let lp = golden(4);
    let g = germ(&lp, 1, 4, 1, &[vec![c(0.5, 0.0)], vec![c(1.0, 0.0)]]);
    assert!(matches!(solve_invariant_curve(&g), Err(Error::Precondition(_))));
    let g = germ(&lp, 1, 4, 1, &[vec![], vec![c(0.5, 0.0)]]);
    assert!(matches!(solve_invariant_curve(&g), Err(Error::Precondition(_))));
}

#[test]
fn rational_rotation_hits_degenerate_divisor() {
    let lp = LambdaPowers::<f64>::shared(RotationNumber::from_decimal("0.25").unwrap().into_shared(), 8).unwrap();
    let g = germ(&lp, 1, 8, 1, &[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]]);
    assert_eq!(solve_invariant_curve(&g), Err(Error::DegenerateDivisor { multiple: 4 }));
}

#[test]
fn gauge_examples() {
    let lp = golden(8);
    let l = lp.lambda();
    let flat = germ(&lp, 2, 8, 2, &[vec![], vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.5, 0.0)]]);
    assert!(solve_linear_gauge(&flat).unwrap().is_zero());

    // abar_1 = z
    let g = germ(&lp, 2, 8, 2, &[vec![], vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0)]]);
    let psi = solve_linear_gauge(&g).unwrap();
    let psi1 = psi.coeff(1).to_complex();
    assert!((psi1 - (l - 1.0).inv()).norm() < 1e-14);
    assert!((psi.coeff(2).to_complex() - psi1 / (l * l - 1.0)).norm() < 1e-14);
    let after = conjugate(&g, &FiberChange::Gauge(psi)).unwrap();
    let mut linear = after.coeff(1).clone();
    linear.set_coeff(0, linear.coeff(0) - skewfiber::ScaledComplex::from_real(1.0));
    assert!(rel(&linear, after.max_log2()) < 1e-13);

    let with_constant_term = germ(&lp, 1, 8, 1, &[vec![c(0.0, 0.0), c(0.1, 0.0)], vec![c(1.0, 0.0)]]);
    assert!(matches!(solve_linear_gauge(&with_constant_term), Err(Error::Precondition(_))));
}

#[test]
fn bump_examples() {
    let lp = golden(16);
    let l = lp.lambda();
    let constant = germ(&lp, 2, 16, 3, &[vec![], vec![c(1.0, 0.0)], vec![c(0.7, 0.0)]]);
    assert!(solve_order_bump(&constant, 1).unwrap().is_zero());

    let linear_tail = germ(&lp, 2, 16, 3, &[vec![], vec![c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.3, 0.4)]]);
    let xi = solve_order_bump(&linear_tail, 1).unwrap();
    assert!((xi.coeff(1).to_complex() - c(0.3, 0.4) / (l - 1.0)).norm() < 1e-14);
    let after = conjugate(&linear_tail, &FiberChange::Bump { h: xi, k: 1 }).unwrap();
    let mut varying = after.coeff(2).clone();
    varying.set_coeff(0, skewfiber::ScaledComplex::from_real(0.0));
    assert!(varying.max_log2() < -45.0);

    // random tail, k = 1, N = 16
    let base = random_parabolic_germ(lp.clone(), 4, 16, 6, 11).unwrap();
    let mut coeffs = base.coeffs().to_vec();
    coeffs[0] = TruncatedSeries::zero(16);
    coeffs[1] = TruncatedSeries::one(16);
    let g = base.with_coeffs(coeffs).unwrap();
    let xi = solve_order_bump(&g, 1).unwrap();
    let after = conjugate(&g, &FiberChange::Bump { h: xi, k: 1 }).unwrap();
    let mut varying = after.coeff(2).clone();
    assert!((varying.coeff(0).to_complex() - g.coeff(2).coeff(0).to_complex()).norm() < 1e-14);
    varying.set_coeff(0, skewfiber::ScaledComplex::from_real(0.0));
    assert!(rel(&varying, after.max_log2()) <= 1e-8);

    // w^2 still z-dependent: order 2 is out of reach
    assert!(matches!(solve_order_bump(&g, 2), Err(Error::Precondition(_))));
}

fn proposition_germ(lp: &Arc<LambdaPowers<f64>>) -> SkewGerm<f64> {
    // w + w^2 + z w^2 + z w^3
    germ(
        lp,
        3,
        16,
        8,
        &[vec![], vec![c(1.0, 0.0)], vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
    )
}

#[test]
fn proposition_example() {
    let lp = golden(16);
    let g = proposition_germ(&lp);
    let (nf, log) = normalize(&g, 2).unwrap();
    assert_eq!(nf.k, 1);
    assert_eq!(nf.jet.len(), 3);
    for (got, want) in nf.jet.iter().zip([1.0, 0.0, 0.0]) {
        assert!((got - c(want, 0.0)).norm() <= 1e-8, "{got} vs {want}");
    }
    assert!(nf.jet_z_dependence() <= 1e-8);
    assert_eq!(nf.tail_start, 5);
    assert!(nf.tail_alignment(&g.fiber_jet()) <= 1e-10);
    assert!(nf.stages.iter().all(|s| s.residual <= 1e-8), "{:?}", nf.stages);
    let replay = log.replay(&g).unwrap();
    assert!(replay.rel_distance(&nf.germ).unwrap() <= 1e-8);
    // something z-dependent survives in the tail
    assert!(nf.tail.iter().any(|s| !s.is_constant()));
}

#[test]
fn normal_input_needs_no_changes() {
    let lp = golden(12);
    let g = germ(&lp, 4, 12, 6, &[vec![], vec![c(1.0, 0.0)], vec![c(1.0, 0.0)], vec![c(0.5, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
    let (nf, log) = normalize(&g, 1).unwrap();
    for ch in &log.changes {
        assert!(ch.series().unwrap().is_zero(), "{}", ch.kind());
    }
    assert_eq!(nf.germ.rel_distance(&g).unwrap(), 0.0);
}

#[test]
fn constant_germ_has_zero_changes() {
    // no z-dependence at all: every solved series vanishes
    let lp = golden(10);
    let g = germ(&lp, 3, 10, 6, &[vec![], vec![c(1.0, 0.0)], vec![c(0.0, 0.0)], vec![c(0.4, -0.1)]]);
    let (nf, log) = normalize(&g, 2).unwrap();
    assert_eq!(nf.k, 2);
    assert!(log.changes.iter().all(|ch| ch.series().unwrap().is_zero()));
}

#[test]
fn linear_fiber_is_rejected() {
    let lp = golden(4);
    let g = germ(&lp, 2, 4, 3, &[vec![], vec![c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
    assert_eq!(normalize(&g, 1).unwrap_err(), Error::IdenticallyLinearFiber);
}

#[test]
fn normalization_after_base_linearization() {
    let lp = golden(12);
    let l = lp.lambda();
    let f = TruncatedSeries::from_complex(12, &[c(0.0, 0.0), l, c(0.5, 0.0)]);
    let g = proposition_germ(&golden(16));
    let coeffs: Vec<_> = g.coeffs().iter().map(|s| TruncatedSeries::from_complex(12, &s.coeffs().iter().map(|x| x.to_complex()).collect::<Vec<_>>())).collect();
    let (nf, log) = normalize_with_base(&f, lp, 3, &coeffs, 2).unwrap();
    assert!(log.sigma.is_some());
    assert_eq!(nf.stages[0].stage, "base_linearization");
    assert!(nf.stages.iter().all(|s| s.residual <= 1e-8), "{:?}", nf.stages);
    assert!(nf.jet_z_dependence() <= 1e-8);
}

#[test]
fn curve_growth_is_geometric_for_golden_mean() {
    let lp = golden(32);
    let g = random_parabolic_germ(lp, 3, 32, 3, 3).unwrap();
    let phi = solve_invariant_curve(&g).unwrap();
    let exps: Vec<f64> = (1..=32)
        .filter(|&p| !phi.coeff(p).is_zero())
        .map(|p| phi.coeff(p).ln_abs() / p as f64)
        .collect();
    let late = exps[16..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let all = exps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert!(all.is_finite() && all < 10.0);
    assert!(late <= all + 1e-12);
}

fn reduce_jet(jet: &[C], dw: usize) -> skewfiber::NormalForm<f64> {
    let lp = golden(4);
    let mut coeffs = vec![vec![], vec![c(1.0, 0.0)]];
    coeffs.extend(jet.iter().map(|&x| vec![x]));
    let g = germ(&lp, coeffs.len() - 1, 4, dw, &coeffs);
    let k = skewfiber::conjugator::parabolic_order(&g.fiber_jet()).unwrap();
    let (nf, _) = normalize(&g, k).unwrap();
    reduce_parabolic_tail(&nf).unwrap().0
}

#[test]
fn parabolic_reduction_examples() {
    let already = reduce_jet(&[c(-1.0, 0.0)], 4);
    assert!((already.jet[0] - c(-1.0, 0.0)).norm() < 1e-15);
    assert!(already.b.unwrap().norm() < 1e-15);

    let flipped = reduce_jet(&[c(1.0, 0.0)], 4);
    assert!((flipped.jet[0] - c(-1.0, 0.0)).norm() < 1e-15);

    let with_index = reduce_jet(&[c(-1.0, 0.0), c(0.37, -0.2)], 4);
    assert!((with_index.b.unwrap() - c(0.37, -0.2)).norm() < 1e-15);

    // k = 2: w + 2 w^3 + 0.5 w^4 + w^5; w^4 cleared, b reported
    let k2 = reduce_jet(&[c(0.0, 0.0), c(2.0, 0.0), c(0.5, 0.0), c(1.0, 0.0)], 8);
    assert_eq!(k2.k, 2);
    assert!((k2.jet[0] - c(-1.0, 0.0)).norm() < 1e-14);
    assert!(k2.jet[1].norm() < 1e-14);
    assert_eq!(k2.tail_start, 6);
    assert!(k2.b.unwrap().norm() > 0.0);
}

#[test]
fn reduction_needs_depth() {
    let lp = golden(4);
    let g = germ(&lp, 3, 4, 6, &[vec![], vec![c(1.0, 0.0)], vec![], vec![c(1.0, 0.0)]]);
    let (nf, _) = normalize(&g, 1).unwrap();
    assert!(matches!(reduce_parabolic_tail(&nf), Err(Error::Precondition(_))));
}

#[test]
fn normal_form_is_pointwise_conjugate() {
    // F(z, Phi(z, w)) = Phi(lambda z, G(z, w)) with Phi = Phi_1 o ... o Phi_r
    let lp = golden(16);
    let g = proposition_germ(&lp);
    let (nf, log) = normalize(&g, 2).unwrap();
    let phi = |z: C, w: C| log.changes.iter().rev().fold(w, |acc, ch| ch.apply(z, acc));
    for &(z, w) in &[(c(0.01, 0.0), c(0.01, 0.0)), (c(0.0, 0.02), c(-0.005, 0.01)), (c(-0.015, 0.01), c(0.0, -0.02))] {
        let (_, lhs) = g.eval(z, phi(z, w)).unwrap();
        let (z1, image) = nf.germ.eval(z, w).unwrap();
        let rhs = phi(z1, image);
        assert!((lhs - rhs).norm() <= 1e-12 * w.norm(), "{lhs} vs {rhs}");
    }
}
