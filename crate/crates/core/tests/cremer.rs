use num_complex::Complex;
use num_traits::{One, Zero};
use skewfiber::cremer::{greedy_quadratic, growth_profile, linear_example_phi, ln_inverse_divisors, write_growth_csv};
use skewfiber::smalldiv::{double_exponential_growth, liouville_quotients, unit_power, FRAC_BITS_CEILING};
use skewfiber::{RotationNumber, ScaledComplex};

type C = Complex<f64>;

#[test]
fn minus_one_start_vanishes() {
    let phi = linear_example_phi(&RotationNumber::golden(), C::new(-1.0, 0.0), 50).unwrap();
    assert!(phi[1..].iter().all(|p| p.is_zero()));
}

#[test]
fn first_coefficient() {
    let g = RotationNumber::golden();
    let phi = linear_example_phi(&g, C::new(0.0, 0.0), 5).unwrap();
    let lambda = unit_power::<f64>(&g.frac_multiple(1));
    let want = (lambda - 1.0).inv();
    assert!((phi[1].to_complex() - want).norm() < 1e-15 * want.norm());
}

#[test]
fn recursion_matches_telescoped_product() {
    let g = RotationNumber::golden();
    let phi0 = C::new(0.3, -0.2);
    let phi = linear_example_phi(&g, phi0, 200).unwrap();
    let mut product = ScaledComplex::<f64>::one();
    for n in 1..=200u64 {
        let x = g.frac_multiple(n);
        product *= ScaledComplex::from_complex(unit_power::<f64>(&x) - 1.0);
        let lhs = (phi[n as usize] * product).to_complex();
        let rhs = C::new(1.0, 0.0) + phi0;
        assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm(), "n = {n}");
    }
}

#[test]
fn lower_bound_identity() {
    let g = RotationNumber::golden();
    let phi0 = C::new(0.5, 0.5);
    let phi = linear_example_phi(&g, phi0, 300).unwrap();
    let profile = growth_profile(&phi).unwrap();
    let inv = ln_inverse_divisors::<f64>(&g, 300).unwrap();
    let mut acc = 0.0;
    for e in &profile {
        acc += inv[e.m - 1];
        let bound = (acc + (1.0 + phi0).norm().ln()) / e.m as f64;
        assert!((e.exponent - bound).abs() <= 1e-10, "m = {}", e.m);
    }
}

#[test]
fn golden_linear_growth_is_bounded() {
    let phi = linear_example_phi(&RotationNumber::golden(), C::new(0.0, 0.0), 1_000).unwrap();
    let profile = growth_profile(&phi).unwrap();
    assert!(profile.last().unwrap().running_max < 2.0);
    assert!(profile.iter().all(|e| e.exponent.is_finite()));
}

#[test]
fn growth_of_simple_sequences() {
    let ones = vec![ScaledComplex::<f64>::one(); 20];
    assert!(growth_profile(&ones).unwrap().iter().all(|e| e.exponent == 0.0));
    let powers: Vec<ScaledComplex<f64>> = (0..400).map(|m| ScaledComplex::new(C::new(1.0, 0.0), m)).collect();
    for e in growth_profile(&powers).unwrap() {
        assert!((e.exponent - 2f64.ln()).abs() < 1e-15);
    }
    assert!(growth_profile::<f64>(&[]).is_err());
}

#[test]
fn greedy_starts_with_one_and_keeps_bound() {
    let g = RotationNumber::golden();
    let run = greedy_quadratic::<f64>(&g, 500).unwrap();
    assert_eq!(run.bits[0], 1);
    assert!(run.numerators.iter().skip(1).all(|n| n.log2_abs() >= -1.0));
    let again = greedy_quadratic::<f64>(&g, 500).unwrap();
    assert_eq!(run.bits, again.bits);
    assert_eq!(run.phi, again.phi);
}

#[test]
fn greedy_on_liouville_rotation() {
    let rot = liouville_quotients(6, double_exponential_growth, FRAC_BITS_CEILING).unwrap();
    let run = greedy_quadratic::<f64>(&rot, 500).unwrap();
    assert!(run.numerators.iter().skip(1).all(|n| n.log2_abs() >= -1.0));
    let profile = growth_profile(&run.phi).unwrap();
    assert!(profile.iter().all(|e| e.exponent.is_finite()));
}

#[test]
fn growth_csv_columns() {
    let g = RotationNumber::golden();
    let run = greedy_quadratic::<f64>(&g, 10).unwrap();
    let profile = growth_profile(&run.phi).unwrap();
    let inv = ln_inverse_divisors::<f64>(&g, 10).unwrap();
    let mut out = Vec::new();
    write_growth_csv(&mut out, &profile, Some(&run.bits), &inv).unwrap();
    let text = String::from_utf8(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "m,a_m,ln_abs_phi,e_m,running_max,ln_inv_divisor");
    assert_eq!(lines.count(), 10);
    assert_eq!(inv.len(), 10);
}
