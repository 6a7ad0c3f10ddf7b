use dpgs::nonlinearity::{critical_exponent, existence_threshold};
use dpgs::roots::{closed_forms_q2p1, critical_points, zeros_of_f, zeros_of_primitive};
use dpgs::shooting::find_ground_state;
use dpgs::verify::{full_verification, random_samples, threshold_inequality_check, DEFAULT_SEED};
use dpgs::{Dimension, DoublePowerParams, RootControls, SolverControls};
use proptest::prelude::*;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn f_of(w: f64, p: f64, q: f64, u: f64) -> f64 {
    -w * u + u.powf(p) - u.powf(q)
}

fn big_f_of(w: f64, p: f64, q: f64, u: f64) -> f64 {
    -0.5 * w * u * u + u.powf(p + 1.0) / (p + 1.0) - u.powf(q + 1.0) / (q + 1.0)
}

/// `(n, p, q, ω)` with `1 < p < q < p*(n)` and `ω` a fraction of the threshold.
fn valid_point() -> impl Strategy<Value = (u32, f64, f64, f64)> {
    (1u32..=5, 1.1f64..3.0, 0.05f64..0.95, 0.05f64..0.97).prop_filter_map("q below p*", |(n, p, sq, sw)| {
        let top = critical_exponent(dim(n)).min(2.0 * p + 3.0) - 0.02;
        if p + 0.05 >= top {
            return None;
        }
        let q = p + 0.05 + sq * (top - p - 0.05);
        let w = sw * existence_threshold(p, q).ok()?;
        Some((n, p, q, w))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn roots_are_ordered_zeros((n, p, q, w) in valid_point()) {
        let prm = DoublePowerParams::new(w, p, q).unwrap();
        let cp = critical_points(&prm, dim(n), RootControls::default()).unwrap();
        prop_assert!(0.0 < cp.b && cp.b < cp.beta && cp.beta < cp.c && cp.c < cp.theta);
        let scale_f = |u: f64| w * u + u.powf(p) + u.powf(q);
        for z in [cp.b, cp.c] {
            prop_assert!(f_of(w, p, q, z).abs() <= 1e-9 * scale_f(z));
        }
        let scale_big = |u: f64| w * u * u + u.powf(p + 1.0) + u.powf(q + 1.0);
        for z in [cp.beta, cp.theta] {
            prop_assert!(big_f_of(w, p, q, z).abs() <= 1e-9 * scale_big(z));
        }
        prop_assert!(cp.big_b > 0.0 && cp.big_b < cp.c);
    }

    #[test]
    fn closed_forms_agree_with_root_finding(p in 1.1f64..2.9, sw in 0.05f64..0.97, n in 1u32..=5) {
        let q = 2.0 * p - 1.0;
        prop_assume!(q < critical_exponent(dim(n)) - 0.01);
        let w = sw * existence_threshold(p, q).unwrap();
        let prm = DoublePowerParams::new(w, p, q).unwrap();
        let closed = closed_forms_q2p1(&prm, dim(n)).unwrap();
        let found = critical_points(&prm, dim(n), RootControls::default()).unwrap();
        for (a, b) in [(closed.b, found.b), (closed.c, found.c), (closed.beta, found.beta), (closed.theta, found.theta), (closed.big_b, found.big_b)] {
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-3), "{a} vs {b}");
        }
        if closed.big_c.is_finite() {
            prop_assert!((closed.big_c - found.big_c).abs() <= 1e-9 * closed.big_c);
        } else {
            prop_assert!(found.big_c.is_infinite());
        }
    }

    #[test]
    fn zeros_bracket_each_other((_n, p, q, w) in valid_point()) {
        let prm = DoublePowerParams::new(w, p, q).unwrap();
        let (b, c) = zeros_of_f(&prm, RootControls::default()).unwrap();
        let (beta, theta) = zeros_of_primitive(&prm, RootControls::default()).unwrap();
        prop_assert!(b < beta && beta < c && c < theta);
        // F is increasing on (b, c), so F(c) > 0 = F(β).
        prop_assert!(big_f_of(w, p, q, c) > 0.0);
    }

    #[test]
    fn threshold_inequality_is_strict_off_two_dimensions(n in 1u32..=5, p in 1.1f64..3.0, s in 0.02f64..0.98) {
        let p_star = critical_exponent(dim(n));
        let top = if p_star.is_finite() { p_star - 0.02 } else { 3.0 * p };
        prop_assume!(p + 0.02 < top);
        let q = p + 0.01 + s * (top - p - 0.01);
        match threshold_inequality_check(dim(n), p, q) {
            Ok(cmp) => {
                prop_assert!(cmp.passed);
                if n == 2 {
                    prop_assert!((cmp.lhs - cmp.rhs).abs() <= 1e-12 * cmp.lhs);
                } else {
                    prop_assert!(cmp.lhs < cmp.rhs);
                }
            }
            // τ ≤ 0: the right-hand side is infinite.
            Err(e) => prop_assert!(e.to_string().contains("infinite"), "{e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn ground_state_decreases_from_its_maximum(n in 1u32..=3, p in 1.3f64..2.5, sq in 0.2f64..0.8, sw in 0.2f64..0.9) {
        let top = critical_exponent(dim(n)).min(2.0 * p + 1.0) - 0.05;
        let q = p + 0.1 + sq * (top - p - 0.1);
        let w = sw * existence_threshold(p, q).unwrap();
        let prm = DoublePowerParams::new(w, p, q).unwrap();
        let gs = find_ground_state(&prm, dim(n), &SolverControls::default()).unwrap();
        let a = gs.alpha;
        prop_assert!(f_of(w, p, q, a) > 0.0 && big_f_of(w, p, q, a) >= -1e-12);
        let s = gs.trajectory.samples();
        prop_assert!((s[0].u - a).abs() <= 1e-6 * a);
        let floor = 1e-6 * a;
        for pair in s.windows(2).filter(|w| w[1].u > floor) {
            prop_assert!(pair[1].r > pair[0].r);
            prop_assert!(pair[1].u <= pair[0].u, "u rises at r = {}", pair[1].r);
            prop_assert!(pair[1].du <= 0.0);
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let ctl = SolverControls::default();
    for (prm, n) in random_samples(DEFAULT_SEED, 4) {
        let a = full_verification(&prm, n, &ctl).unwrap().to_json();
        let b = full_verification(&prm, n, &ctl).unwrap().to_json();
        assert_eq!(a, b);
    }
}

#[test]
fn seeded_random_points_verify() {
    let ctl = SolverControls::default();
    let failed: Vec<String> = random_samples(DEFAULT_SEED, 50)
        .into_iter()
        .filter_map(|(prm, n)| {
            let r = full_verification(&prm, n, &ctl).unwrap();
            (!r.overall).then(|| format!("n={n} {prm:?}: {:?}", r.failures().map(|c| c.name.clone()).collect::<Vec<_>>()))
        })
        .collect();
    assert!(failed.is_empty(), "{failed:#?}");
}
