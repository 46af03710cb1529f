use num_bigint::BigUint;
use num_complex::Complex;
use proptest::prelude::*;
use skewfiber::smalldiv::{
    divisor_table, double_exponential_growth, liouville_quotients, unit_power, DivisorTable, RotationNumber, RotationSpec,
    FRAC_BITS_CEILING,
};
use skewfiber::Error;

fn golden_theta() -> f64 {
    (5f64.sqrt() - 1.0) / 2.0
}

#[test]
fn golden_multiples() {
    let g = RotationNumber::golden();
    assert!(g.frac_multiple(0).is_zero());
    assert!((g.frac_multiple(1).to_real::<f64>() - 0.618_033_988_749_894_8).abs() < 1e-15);
    let two = g.frac_multiple(2).to_real::<f64>();
    assert!((two - 0.236_067_977_499_789_7).abs() < 1e-15);
    assert!((two - (2.0 * golden_theta() - 1.0)).abs() < 1e-15);
}

#[test]
fn multiples_stay_in_unit_interval() {
    let g = RotationNumber::golden();
    for x in g.frac_multiples(2_000).unwrap() {
        let v = x.to_real::<f64>();
        assert!((0.0..1.0).contains(&v));
    }
}

#[test]
fn half_turn_table() {
    let half = RotationNumber::from_decimal("0.5").unwrap();
    assert!(half.possibly_rational());
    let t = divisor_table::<f64>(&half, 2).unwrap();
    assert_eq!(t.omega(2), 2.0);
    assert!(matches!(divisor_table::<f64>(&half, 5), Err(Error::DegenerateDivisor { .. })));
}

#[test]
fn golden_table_values() {
    let t = divisor_table::<f64>(&RotationNumber::golden(), 10_000).unwrap();
    assert!((t.dlam(2) - 2.0 * (std::f64::consts::PI * golden_theta()).sin()).abs() < 1e-15);
    assert!((t.dlam(2) - 1.864_064_847_626_455).abs() < 1e-14);
    for m in 3..=t.m_max() {
        assert!(t.omega(m) <= t.omega(m - 1));
        assert!(t.omega(m) > 0.0 && t.omega(m) <= 2.0);
    }
    assert!(t.cremer_running_max(10_000).unwrap() < 2.0);
}

#[test]
fn sines_agree_with_repeated_multiplication() {
    let g = RotationNumber::golden();
    let t = divisor_table::<f64>(&g, 1_000).unwrap();
    let lambda = unit_power::<f64>(&g.frac_multiple(1));
    let mut power = Complex::new(1.0, 0.0);
    for k in 1..=1_000usize {
        power *= lambda;
        let direct = (power - 1.0).norm();
        assert!((t.d1(k) - direct).abs() <= 1e-10 + k as f64 * 1e-15, "k = {k}");
        assert!(t.error_bound(k) < 1e-14);
    }
}

#[test]
fn golden_brjuno_sum_converges() {
    let t = divisor_table::<f64>(&RotationNumber::golden(), 1 << 21).unwrap();
    let s6 = t.brjuno_partial_sum(6).unwrap();
    assert!(s6.is_finite());
    let (s10, s20) = (t.brjuno_partial_sum(10).unwrap(), t.brjuno_partial_sum(20).unwrap());
    assert!((s20 - s10).abs() < 1e-2);
}

#[test]
fn brjuno_sum_nondecreasing_when_omega_small() {
    let t = divisor_table::<f64>(&RotationNumber::golden(), 1 << 12).unwrap();
    for k in 1..11u32 {
        if (0..=k).all(|j| t.omega(1 << (j + 1)) < 1.0) {
            assert!(t.brjuno_partial_sum(k).unwrap() >= t.brjuno_partial_sum(k - 1).unwrap());
        }
    }
}

#[test]
fn synthetic_tables() {
    let two = DivisorTable::<f64>::from_ln_divisors(vec![2f64.ln(); 65], 192);
    let weights: f64 = (0..=5).map(|k| 0.5f64.powi(k)).sum();
    assert!((two.brjuno_partial_sum(5).unwrap() - weights * 0.5f64.ln()).abs() < 1e-15);
    let one = DivisorTable::<f64>::from_ln_divisors(vec![0.0; 9], 192);
    assert_eq!(one.cremer_exponent(8).unwrap(), 0.0);
}

#[test]
fn all_ones_quotients_approach_golden() {
    let ones = RotationNumber::from_quotients(vec![BigUint::from(1u32); 80]).unwrap();
    assert!((ones.theta::<f64>() - golden_theta()).abs() < 1e-15);
    let constant = liouville_quotients(20, |_| BigUint::from(1u32), FRAC_BITS_CEILING).unwrap();
    assert!((constant.theta::<f64>() - golden_theta()).abs() < 1e-15);
}

#[test]
fn liouville_rotations_build() {
    let rot = liouville_quotients(6, double_exponential_growth, FRAC_BITS_CEILING).unwrap();
    assert!(rot.frac_bits() >= 384);
    assert_eq!(rot.partial_quotients()[5], BigUint::from(1u32) << 64usize);
    let t = divisor_table::<f64>(&rot, 1 << 7).unwrap();
    assert!(t.brjuno_partial_sum(5).unwrap().is_finite());

    let linear = liouville_quotients(10, BigUint::from, FRAC_BITS_CEILING).unwrap();
    let t = divisor_table::<f64>(&linear, 1 << 7).unwrap();
    for k in 0..=6 {
        assert!(t.brjuno_partial_sum(k).unwrap().is_finite());
    }
    assert!(matches!(
        liouville_quotients(12, double_exponential_growth, 1_024),
        Err(Error::PrecisionCeiling { .. })
    ));
}

#[test]
fn tables_are_deterministic() {
    let spec: RotationSpec = serde_json::from_str(r#"{"kind":"surd","p":-1,"q":1,"r":5,"s":2}"#).unwrap();
    let a = divisor_table::<f64>(&spec.to_rotation().unwrap(), 500).unwrap();
    let b = divisor_table::<f64>(&spec.to_rotation().unwrap(), 500).unwrap();
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
    let header = String::from_utf8(ca).unwrap();
    assert!(header.starts_with("m,dlam,omega,cremer_exponent"));
}

proptest! {
    #[test]
    fn surd_multiples_match_floating_point(k in 1u64..5_000) {
        let g = RotationNumber::golden();
        let exact = g.frac_multiple(k).to_real::<f64>();
        let approx = (k as f64 * golden_theta()).fract();
        prop_assert!((exact - approx).abs() < 1e-11 || (exact - approx).abs() > 1.0 - 1e-11);
    }
}
