use num_complex::Complex64;
use proptest::prelude::*;
use spd_core::levy_model::stable_unit_scale;
use spd_core::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn components() -> Vec<JumpFamily> {
    vec![
        JumpFamily::stable(1.5, 0.7).unwrap(),
        JumpFamily::tempered_stable(1.3, 0.8, 1.1).unwrap(),
        JumpFamily::truncated_stable(1.6, 2.0, 0.5).unwrap(),
    ]
}

fn suite(j: JumpFamily) -> ExponentSuite {
    ExponentSuite::new(LevyModel::new(0.0, 0.0, Some(j)).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mixture_is_additive(lam in 1e-3f64..1e3, order in 0u8..4) {
        let mix = suite(JumpFamily::mixture(components()).unwrap());
        let sum: f64 = components().into_iter().map(|c| suite(c).phi(lam, order).unwrap()).sum();
        let v = mix.phi(lam, order).unwrap();
        prop_assert!((v - sum).abs() <= 1e-12 * v.abs().max(sum.abs()), "{v} vs {sum}");
    }

    #[test]
    fn mixture_is_additive_off_axis(re in 0.0f64..10.0, im in -50.0f64..50.0) {
        let z = Complex64::new(re, im);
        let mix = suite(JumpFamily::mixture(components()).unwrap());
        let sum: Complex64 = components().into_iter().map(|c| suite(c).phi_complex(z).unwrap()).sum();
        let v = mix.phi_complex(z).unwrap();
        prop_assert!((v - sum).norm() <= 1e-12 * v.norm().max(1.0));
    }

    #[test]
    fn psi_is_conjugate_symmetric(xi in 1e-3f64..1e3, which in 0usize..4) {
        let s = match which {
            0 => ExponentSuite::new(LevyModel::unit_stable(1.5).unwrap()).unwrap(),
            1 => ExponentSuite::new(LevyModel::brownian(1.0, 0.3).unwrap()).unwrap(),
            _ => suite(components()[which - 1].clone()),
        };
        let a = s.char_exponent(xi).unwrap();
        let b = s.char_exponent(-xi).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1e-300));
        prop_assert!(a.re >= 0.0);
    }

    #[test]
    fn phi_below_its_tangent_line(lam in 1e-3f64..1e3) {
        let s = ExponentSuite::new(LevyModel::centered(0.0, components()[1].clone()).unwrap()).unwrap();
        let p = s.phi(lam, 0).unwrap();
        let d = s.phi(lam, 1).unwrap();
        prop_assert!(p <= lam * d * (1.0 + 1e-12));
    }

    #[test]
    fn inverses_round_trip(level in 1e-2f64..1e3) {
        let s = ExponentSuite::new(LevyModel::unit_stable(1.5).unwrap()).unwrap();
        let x = s.phi_inv(level).unwrap();
        prop_assert!(rel(s.phi(x, 0).unwrap(), level) < 1e-12);
        let y = s.big_phi_inv(level).unwrap();
        prop_assert!(rel(s.big_phi_star(y).unwrap(), level) < 1e-9);
        prop_assert!(rel(y, (level / 0.75).powf(1.0 / 1.5)) < 1e-9);
    }

    #[test]
    fn envelope_inverse_is_generalized(level in 1e-2f64..1e2) {
        let t = ExponentSuite::new(LevyModel::centered(0.0, components()[1].clone()).unwrap()).unwrap();
        let y = t.big_phi_inv(level).unwrap();
        prop_assert!(rel(t.big_phi_star(y).unwrap(), level) < 1e-9);
        prop_assert!(t.big_phi_star(y * 1.001).unwrap() >= level);
        prop_assert!(t.big_phi_star(y * 0.999).unwrap() <= level * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contours_agree_on_tempered_right_tail(t in 0.05f64..2.0, x in 0.1f64..6.0) {
        let s = ExponentSuite::new(LevyModel::centered(0.0, JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap()).unwrap()).unwrap();
        let cfg = OracleConfig::default();
        let a = density_oracle(&s, t, x, &cfg).unwrap();
        let b = density_oracle_psi(&s, t, x, &cfg).unwrap();
        prop_assert!(a.contour_w.unwrap() < 0.0);
        prop_assert!(rel(a.value, b.value) < 1e-7 || (a.value - b.value).abs() < 1e-14, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn oracle_is_a_density(t in 0.05f64..5.0, u in -6.0f64..10.0) {
        let s = ExponentSuite::new(LevyModel::unit_stable(1.5).unwrap()).unwrap();
        let x = u * t.powf(1.0 / 1.5);
        let p = density_oracle(&s, t, x, &OracleConfig::default()).unwrap();
        prop_assert!(p.value >= 0.0 && p.value.is_finite());
        prop_assert!(p.value <= 2.0 * 0.4 * t.powf(-1.0 / 1.5));
    }
}

#[test]
fn brownian_right_tail_uses_the_exact_saddle() {
    let s = ExponentSuite::new(LevyModel::brownian(1.0, 0.0).unwrap()).unwrap();
    for x in [0.5, 3.0, 12.0, 30.0] {
        let p = density_oracle(&s, 1.0, x, &OracleConfig::default()).unwrap();
        assert!(rel(p.contour_w.unwrap(), -x / 2.0) < 1e-12);
        let exact_ln = -x * x / 4.0 - 0.5 * (4.0 * std::f64::consts::PI).ln();
        assert!((p.ln_value - exact_ln).abs() < 1e-12, "x = {x}");
    }
}

#[test]
fn tempered_far_tail_matches_jump_density() {
    let s = ExponentSuite::new(LevyModel::centered(0.0, JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap()).unwrap())
        .unwrap();
    let t = 0.2;
    let mut prev = f64::INFINITY;
    for x in [20.0, 40.0, 80.0] {
        let p = density_oracle(&s, t, x, &OracleConfig::default()).unwrap();
        let ratio = (p.ln_value - (t * s.model().jump_density(x).unwrap()).ln()).exp();
        assert!((0.5..2.0).contains(&ratio), "x = {x}: ratio {ratio}");
        assert!((ratio - 1.0).abs() <= (prev - 1.0).abs() + 1e-9);
        prev = ratio;
    }
}

#[test]
fn stable_unit_scale_gives_unit_exponent() {
    for a in [1.1, 1.5, 1.9] {
        let s = suite(JumpFamily::stable(a, stable_unit_scale(a)).unwrap());
        let c =
            ExponentSuite::new(LevyModel::centered(0.0, JumpFamily::stable(a, stable_unit_scale(a)).unwrap()).unwrap())
                .unwrap();
        assert!(rel(c.phi(2.0, 0).unwrap(), 2f64.powf(a)) < 1e-12);
        assert!(s.phi(2.0, 2).unwrap() > 0.0);
    }
}
