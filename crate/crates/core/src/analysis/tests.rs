use super::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(a: f64, b: f64) -> TwoAnglePoint {
    TwoAnglePoint::new(a, b).unwrap()
}

fn d1<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

fn d2<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

#[test]
fn base_gap_series_matches_direct() {
    for &z in &[0.9, 0.99, 0.5, 0.3] {
        let direct = z * (2.0 + f64::cos(z)) - 3.0 * f64::sin(z);
        assert!((base_gap(z) - direct).abs() < 1e-15, "z = {z}");
    }
    assert_eq!(base_gap(0.0), 0.0);
    assert!((base_gap(PI) - PI).abs() < 1e-14);
    assert!((base_gap(1e-3) / 1e-15 - 1.0 / 60.0).abs() < 1e-8);
}

#[test]
fn g_second_derivative_matches_fd() {
    for &x in &[0.2, 0.5, 1.0, 3.0, 20.0] {
        let fd = d2(g_base, x, 1e-3 * x);
        let an = g_second_derivative(x).unwrap();
        assert!(
            (fd - an).abs() < 1e-5 * an.abs().max(1e-3),
            "x = {x}: {fd} vs {an}"
        );
    }
    assert!(g_second_derivative(1.0 / (PI * PI)).is_err());
    // literal formula at x = 4/π²
    let z = PI / 2.0;
    let x: f64 = 4.0 / (PI * PI);
    let direct =
        -(2.0 + z.cos() - 3.0 * x.sqrt() * z.sin()) / (16.0 * x.powi(3) * (z / 2.0).sin().powi(4));
    assert!((g_second_derivative(x).unwrap() - direct).abs() < 1e-13);
}

#[test]
fn t1_t2_limits_and_continuity() {
    assert!((t1(0.0).unwrap() - 2.0 / PI).abs() < 1e-15);
    assert!((t1(PI).unwrap() - PI / 2.0).abs() < 1e-15);
    assert!((t2(PI).unwrap() - PI / 3.0).abs() < 1e-15);
    assert!((t2(0.0).unwrap() - 2.0 / PI).abs() < 1e-15);
    for &x in &[0.3, 1.0, 2.0, PI - 0.49, PI - 0.51] {
        let direct1 = x / ((x / 2.0).tan() * (PI - x));
        let direct2 = -2.0 * PI * (x - PI + x.sin()) / (PI - x).powi(3);
        assert!((t1(x).unwrap() - direct1).abs() < 1e-12, "T1 at {x}");
        assert!((t2(x).unwrap() - direct2).abs() < 1e-8, "T2 at {x}");
    }
    let u = 1e-3;
    let series = 2.0 * PI * (1.0 / 6.0 - u * u / 120.0);
    assert!((t2(PI - u).unwrap() - series).abs() < 1e-13);
    assert!(t1(-0.1).is_err());
    assert!(t2(PI + 0.1).is_err());
}

#[test]
fn t1_second_series_matches_fd() {
    for &x in &[0.0, 0.5, 1.5, 2.5, 3.0] {
        let (v, tail) = t1_second(x, 20_000).unwrap();
        assert!(tail < 1e-13);
        let h = 1e-3;
        let fd = if x < h {
            // one-sided second difference
            (t1_raw(x) - 2.0 * t1_raw(x + h) + t1_raw(x + 2.0 * h)) / (h * h)
        } else {
            d2(t1_raw, x, h)
        };
        let tol = if x < h { 1e-3 } else { 1e-6 };
        assert!((v - fd).abs() < tol, "x = {x}: {v} vs {fd}");
    }
    // T1''(0) closed-form series
    let at0: f64 = (1..100_000)
        .map(|k| {
            let k = k as f64;
            2.0 / ((4.0 * k * k - 1.0) * k * k * PI.powi(3))
        })
        .sum();
    assert!((t1_second(0.0, 20_000).unwrap().0 - at0).abs() < 1e-12);
}

#[test]
fn t2_second_matches_fd_and_limits() {
    for &x in &[0.5, 1.5, 2.5, PI - 0.55, PI - 0.65] {
        let fd = d2(t2_raw, x, 1e-3);
        let an = t2_second(x).unwrap();
        assert!((fd - an).abs() < 1e-6, "x = {x}: {fd} vs {an}");
    }
    assert!((t2_second(PI).unwrap() + PI / 30.0).abs() < 1e-14);
    assert!(t2_second(0.0).unwrap().abs() < 1e-13);
}

#[test]
fn objective_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let s = rng.random_range(2.05..15.0);
        let a = rng.random_range(0.1..PI - 1e-3);
        let b = rng.random_range(0.05..a - 2e-2);
        let p = pt(a, b);
        let stable = objective(s, p).unwrap();
        let direct = objective_from_nk(s, p).unwrap();
        assert!(
            (stable - direct).abs() < 1e-9 * (1.0 + direct.abs()),
            "s={s} p={p:?}: {stable} vs {direct}"
        );
        let (n, k) = nk_from_angles(s, p).unwrap();
        let (r1, r2) = two_angle_residuals(s, n, k, p);
        assert!(r1.abs() < 1e-9 * (1.0 + n.abs()) && r2.abs() < 1e-9 * (1.0 + n.abs()));
    }
}

#[test]
fn objective_at_minimizer_is_regular() {
    for &s in &[2.5, 3.0, 4.0, 7.3] {
        let g = objective(s, pt(PI, theta2_hi(s))).unwrap();
        let expected = s / (theta2_hi(s) / 2.0).tan();
        assert!((g - expected).abs() < 1e-12, "s = {s}");
    }
}

#[test]
fn g_tilde_forms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let a = rng.random_range(0.2..PI - 0.05);
        let b = rng.random_range(0.01..a);
        let p = pt(a, b);
        let x = g_tilde(p);
        let y = g_tilde_displayed(p);
        assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "{p:?}: {x} vs {y}");
    }
    // limit at θ̄₁ = π
    for &b in &[0.0f64, 0.5, 1.5, 2.5] {
        let expected = if b == 0.0 {
            4.0
        } else {
            b * (2.0 / (b / 2.0).tan() - (PI - b))
        };
        let v = g_tilde(pt(PI, b));
        assert!((v - expected).abs() < 1e-12, "b = {b}");
    }
    // vanishes quadratically on the diagonal
    for &a in &[0.5, 1.5, 2.5] {
        let v = g_tilde(pt(a, a));
        assert!(v.abs() < 1e-12, "diagonal {a}: {v}");
        let near = g_tilde(pt(a, a - 1e-3));
        assert!(near.abs() < 1e-4);
    }
}

#[test]
fn derivatives_match_fd() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let s = rng.random_range(2.1..12.0);
        let a = rng.random_range(0.5..PI - 0.01);
        let b = rng.random_range(0.05..a - 0.05);
        let fd = d1(|x| objective_raw(s, x, b), a, 1e-5);
        let an = dg_dtheta1(s, pt(a, b)).unwrap();
        assert!(
            (fd - an).abs() < 1e-5 * (1.0 + an.abs()),
            "s={s} a={a} b={b}: {fd} vs {an}"
        );

        let fd_t = d1(|x| g_tilde_raw(x, b), a, 1e-5);
        let an_t = g_tilde_dtheta1(pt(a, b));
        assert!((fd_t - an_t).abs() < 1e-5 * (1.0 + an_t.abs()));
    }
}

#[test]
fn dg_vanishes_on_gamma4_and_is_positive_inside() {
    for &s in &[2.5, 3.0, 5.5] {
        for &a in &[theta1_lo(s), 2.9, PI - 1e-3] {
            assert!(dg_dtheta1(s, pt(a, theta2_hi(s))).unwrap().abs() < 1e-12);
            assert!(dg_dtheta1(s, pt(a, 0.5 * theta2_hi(s))).unwrap() > 0.0);
        }
    }
}

#[test]
fn g_hat_cap_properties() {
    for &s in &[2.5, 4.0, 9.0] {
        let hi = theta2_hi(s);
        let f = |b: f64| g_hat_cap(s, b).unwrap();
        assert!(f(hi).abs() < 1e-11, "s = {s}");
        assert!(d1(f, hi - 1e-5, 1e-6).abs() < 1e-3);
        for &b in &[0.1, 0.5 * hi, hi - 0.1] {
            assert!(f(b) > 0.0);
        }
        // second derivative is 4sπ·T1''
        let b = 0.5 * hi;
        let fd = d2(f, b, 1e-3);
        let an = 4.0 * s * PI * t1_second(b, 20_000).unwrap().0;
        assert!((fd - an).abs() < 1e-4 * an, "s = {s}: {fd} vs {an}");
    }
}

#[test]
fn boundary_restriction_agrees_with_objective() {
    for &s in &[2.5, 3.3, 6.0] {
        let lo = theta1_lo(s);
        for i in 0..=20 {
            let b = theta2_hi(s) * i as f64 / 20.0;
            let g = g_s_boundary(s, b).unwrap();
            let direct = objective(s, pt(lo, b)).unwrap();
            assert!((g - direct).abs() < 1e-10 * direct, "s={s} b={b}");
            if b > 0.01 {
                let fd = d1(
                    |x| g_s_boundary(s, x).unwrap(),
                    b.min(theta2_hi(s) - 1e-5),
                    1e-6,
                );
                let an = g_s_derivative(s, b.min(theta2_hi(s) - 1e-5)).unwrap();
                assert!((fd - an).abs() < 1e-5 * (1.0 + an.abs()));
            }
        }
        let star = theta1_lo(s);
        let id = g_s_hat(s, star).unwrap() + (s * s - 1.0) * (PI / (s + 1.0)).tan();
        assert!(id.abs() < 1e-10);
    }
}

#[test]
fn h_and_gamma1_coincide() {
    for &s in &[2.5, 3.0, 4.7, 10.0] {
        assert!((h_bound(s, theta2_hi(s)).unwrap() - PI).abs() < 1e-13);
        assert!((h_bound(s, 0.0).unwrap() - theta1_lo(s)).abs() < 1e-14);
        for i in 0..=10 {
            let b = theta2_hi(s) * i as f64 / 10.0;
            assert!((h_bound(s, b).unwrap() - gamma1_s(s, b)).abs() < 1e-12);
        }
    }
}

#[test]
fn h_matches_n_equals_s_plus_one() {
    // On θ̄₁ = h(s, θ̄₂) the count n equals s + 1.
    for &s in &[2.5, 3.7, 8.0] {
        for &frac in &[0.1, 0.4, 0.8] {
            let b = frac * theta2_hi(s);
            let a = h_bound(s, b).unwrap();
            let (n, _) = nk_from_angles(s, pt(a, b)).unwrap();
            assert!((n - (s + 1.0)).abs() < 1e-9, "s={s} b={b}: n={n}");
        }
    }
}

#[test]
fn region_membership() {
    let s = 3.5;
    let r = RegionSpec::new(s, RegionKind::R).unwrap();
    let sr = RegionSpec::new(s, RegionKind::S).unwrap();
    let corner = pt(theta1_lo(s), theta2_hi(s));
    assert!(r.contains(corner));
    assert!(!sr.contains(corner));
    let top = pt(PI, theta2_hi(s));
    assert!(r.contains(top) && sr.contains(top));
    assert!(!r.contains(pt(theta1_lo(s) - 0.01, 0.1)));
    assert!(RegionSpec::new(2.0, RegionKind::R).is_err());
    // S ⊂ R
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let a = rng.random_range(2.0..PI);
        let b = rng.random_range(0.0..a.min(1.5));
        let p = pt(a, b);
        if sr.contains(p) {
            assert!(r.contains(p));
        }
    }
}

#[test]
fn minimizer_over_s_region_is_top_corner() {
    for &s in &[2.5, 3.5, 5.0] {
        let reg = RegionSpec::new(s, RegionKind::S).unwrap();
        let best = objective(s, pt(PI, theta2_hi(s))).unwrap();
        let n = 200;
        for i in 0..=n {
            for j in 0..=n {
                let a = theta1_lo(s) + (PI - theta1_lo(s)) * i as f64 / n as f64;
                let b = theta2_hi(s) * j as f64 / n as f64;
                if a <= b || !reg.contains(pt(a, b)) {
                    continue;
                }
                assert!(objective(s, pt(a, b)).unwrap() >= best - 1e-12);
            }
        }
    }
}

#[test]
fn phi_has_at_most_two_zeros() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let l1 = rng.random_range(-100.0..100.0);
        let l2 = rng.random_range(-100.0..100.0);
        assert!(phi_sign_changes(l1, l2, 1e-4) <= 2, "λ = ({l1}, {l2})");
    }
    assert!(phi(0.0, 1.0, 1.0).is_err());
    let f = lagrange_f(&[1.0, 1.0, 1.0], 0.0, 0.0, 3.0).unwrap();
    assert!((f - 3.0 / 0.5f64.tan()).abs() < 1e-14);
    // ∂F/∂θ_i = Φ(θ_i)
    let angles = [2.0, 1.9, 2.3, 1.5];
    let (l1, l2, s) = (0.7, -0.3, 3.3);
    for i in 0..4 {
        let fd = d1(
            |x| {
                let mut v = angles;
                v[i] = x;
                lagrange_f(&v, l1, l2, s).unwrap()
            },
            angles[i],
            1e-5,
        );
        assert!((fd - phi(angles[i], l1, l2).unwrap()).abs() < 1e-7);
    }
}

#[test]
fn lemma_ids_round_trip() {
    for l in Lemma::ALL {
        assert_eq!(l.id().parse::<Lemma>().unwrap(), l);
        assert_eq!(
            serde_json::to_string(&l).unwrap(),
            format!("\"{}\"", l.id())
        );
    }
    assert!("nope".parse::<Lemma>().is_err());
    assert!(verify_inequality(Lemma::DgPositive, None, 1e-2).is_err());
}

#[test]
fn all_lemmas_certify() {
    for l in Lemma::ALL {
        let ss: &[f64] = if l.needs_s() {
            &[2.5, 3.0, 4.5, 12.0]
        } else {
            &[f64::NAN]
        };
        for &s in ss {
            let step = if l == Lemma::DgPositive { 5e-3 } else { 1e-4 };
            let c = verify_inequality(l, Some(s), step).unwrap();
            assert!(c.passed(), "{l} s={s}: {c:#?}");
            let neg = verify_inequality_negated(l, Some(s), step).unwrap();
            assert!(!neg.passed(), "negated {l} s={s} passed");
        }
    }
}
