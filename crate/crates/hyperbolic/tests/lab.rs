use cgt_core::{Alphabet, Letter, Word};
use cgt_hyperbolic::aperiodic::Aperiodicity;
use cgt_hyperbolic::quasi::periodic_distances;
use cgt_hyperbolic::slimness::triangle_thinness;
use cgt_hyperbolic::triangle::{relation_residuals, rotation_generators};
use cgt_hyperbolic::*;
use proptest::prelude::*;

fn spec() -> TriangleGroupSpec {
    TriangleGroupSpec::new(2, 4, 8).unwrap()
}

// Growth series of a Coxeter group from its finite parabolics:
// 1/W(1/t) = Σ_{T finite} (-1)^|T| / W_T(t). For a triangle group every
// proper subset is finite, and the dihedral W_T(t) = (1+t)[m]_t, so with
// s = 1/t the terms become s^m (1-s) / ((1+s)(1-s^m)).
fn coxeter_triangle_growth(ms: [u32; 3], n: usize) -> Vec<i128> {
    let geometric = |k: usize, sign: i128| -> Vec<i128> {
        // 1 / (1 - sign s^k)
        (0..n).map(|i| if i % k == 0 { sign.pow((i / k) as u32) } else { 0 }).collect()
    };
    let mul = |a: &[i128], b: &[i128]| -> Vec<i128> {
        let mut c = vec![0; n];
        for i in 0..n {
            for j in 0..n - i {
                c[i + j] += a[i] * b[j];
            }
        }
        c
    };
    let inv_one_plus_s = geometric(1, -1);
    let mut f = vec![0i128; n];
    f[0] = 1;
    for i in 1..n {
        f[i] -= 3 * inv_one_plus_s[i - 1];
    }
    for m in ms {
        let m = m as usize;
        let mut term = mul(&inv_one_plus_s, &geometric(m, 1));
        term = mul(&term, &{
            let mut one_minus_s = vec![0; n];
            one_minus_s[0] = 1;
            one_minus_s[1] = -1;
            one_minus_s
        });
        for i in m..n {
            f[i] += term[i - m];
        }
    }
    // W = 1/f.
    let mut w = vec![0i128; n];
    w[0] = 1;
    for i in 1..n {
        w[i] = -(1..=i).map(|k| f[k] * w[i - k]).sum::<i128>();
    }
    w
}

#[test]
fn reflection_ball_matches_coxeter_growth() {
    let sphere = coxeter_triangle_growth([2, 4, 8], 11);
    assert_eq!(&sphere[..3], &[1, 3, 5]);
    let ball = reflection_ball(spec(), 10, 1e-6).unwrap();
    let mut counts = vec![0i128; 11];
    for v in &ball.vertices {
        counts[v.dist] += 1;
    }
    assert_eq!(counts, sphere);
}

#[test]
fn coxeter_oracle_on_a_known_group() {
    // A second angle triple, so the oracle is not tuned to one group.
    let ball = reflection_ball(TriangleGroupSpec::new(2, 3, 7).unwrap(), 9, 1e-6).unwrap();
    let mut counts = vec![0i128; 10];
    for v in &ball.vertices {
        counts[v.dist] += 1;
    }
    assert_eq!(counts, coxeter_triangle_growth([2, 3, 7], 10));
}

#[test]
fn generator_orders_and_residuals() {
    let refl = build_reflections(spec()).unwrap();
    assert!(relation_residuals(spec(), &refl).iter().all(|&r| r <= 1e-9));
    let [a, b, c] = refl;
    assert_eq!((a * b).order(16, 1e-6), Some(2));
    assert_eq!((b * c).order(16, 1e-6), Some(4));
    assert_eq!((a * c).order(16, 1e-6), Some(8));
    let [x, y] = rotation_generators(&refl);
    assert_eq!((x * y).order(16, 1e-6), Some(8));
}

#[test]
fn torsion_in_radius_eight_divides_eight() {
    let ball = rotation_ball(spec(), 8, 1e-6).unwrap();
    let prof = torsion_profile(&ball, 16, 1e-6);
    assert!(prof.all_divide(8), "{prof:?}");
    assert_eq!(prof.orders.keys().copied().collect::<Vec<_>>(), vec![1, 2, 4, 8]);
    assert_eq!(prof.orders[&1], 1);
    assert_eq!(prof.examined, ball.len());
    assert!(prof.exceeding > 0);
}

#[test]
fn form_residual_error_model() {
    for (ball, label) in [
        (rotation_ball(spec(), 12, 1e-6).unwrap(), "rotation"),
        (reflection_ball(spec(), 12, 1e-6).unwrap(), "reflection"),
    ] {
        for v in &ball.vertices {
            let scale = 1.0 + v.matrix.norm().powi(2);
            let bound = 10.0 * (v.dist as f64 + 1.0) * f64::EPSILON * scale;
            assert!(v.matrix.form_residual() <= bound, "{label} {} {}", ball.word_string(0), v.matrix.form_residual());
        }
    }
}

#[test]
fn slimness_is_deterministic_and_monotone() {
    let mut last = 0;
    for r in [2, 4, 6, 8, 10] {
        let ball = rotation_ball(spec(), r, 1e-6).unwrap();
        let rep = empirical_slimness(&ball, 500, 7);
        assert_eq!(rep, empirical_slimness(&ball, 500, 7));
        assert_eq!(rep.evaluated + rep.skipped, rep.samples);
        assert!(rep.delta_hat >= last, "radius {r}: {} < {last}", rep.delta_hat);
        last = rep.delta_hat;
    }
}

#[test]
fn slimness_baseline_radius_eight() {
    let ball = rotation_ball(spec(), 8, 1e-6).unwrap();
    for seed in [1, 7, 42] {
        let rep = empirical_slimness(&ball, 500, seed);
        assert_eq!(rep.delta_hat, 4);
        assert_eq!(rep.skip_rate(), 0.0);
    }
}

/// Two hyperbolic translations along perpendicular axes with translation
/// length 2 play ping-pong, so they generate a free group acting freely.
fn schottky_ball(radius: usize) -> CayleyBall {
    let (ch, sh) = (2f64.cosh(), 2f64.sinh());
    let p = Isometry::new([[ch, 0.0, sh], [0.0, 1.0, 0.0], [sh, 0.0, ch]]);
    let q = Isometry::new([[1.0, 0.0, 0.0], [0.0, ch, sh], [0.0, sh, ch]]);
    cayley_ball(&[p, q], &Alphabet::new(["p", "q"]).unwrap(), radius, 1e-6).unwrap()
}

#[test]
fn schottky_ball_is_a_free_ball() {
    let ball = schottky_ball(6);
    // 1 + 4 (3^R - 1) / 2
    assert_eq!(ball.len(), 1 + 2 * (3usize.pow(6) - 1));
}

#[test]
fn tripods_are_zero_slim() {
    let ball = schottky_ball(6);
    for t in [[0, 0, 0], [5, 9, 17], [1, 40, 300], [100, 100, 7]] {
        assert_eq!(triangle_thinness(&ball, t), Some(0));
    }
    let rot = rotation_ball(spec(), 6, 1e-6).unwrap();
    for v in 0..rot.len() {
        assert_eq!(triangle_thinness(&rot, [v, v, v]), Some(0));
    }
}

#[test]
fn free_generator_is_geodesic() {
    let ball = schottky_ball(8);
    for w in ["p", "q^-1", "p*q"] {
        let b = ball.alphabet.parse_word(w).unwrap();
        let fit = quasigeodesic_fit(&ball, &b, 10, None).unwrap();
        assert_eq!((fit.lambda, fit.c), (1.0, 0.0), "{w}");
        assert_eq!(fit.effective_power, 4 / b.len());
    }
}

#[test]
fn fit_preconditions() {
    let ball = rotation_ball(spec(), 8, 1e-6).unwrap();
    let w = |s: &str| ball.alphabet.parse_word(s).unwrap();
    assert!(matches!(quasigeodesic_fit(&ball, &w("x*x"), 4, None), Err(LabError::Precondition(_))));
    assert!(matches!(quasigeodesic_fit(&ball, &w("x*y*x"), 4, None), Err(LabError::Precondition(_))));
    assert!(matches!(quasigeodesic_fit(&ball, &w("(x*y^2)^5"), 4, None), Err(LabError::OutsideBall(_))));
}

#[test]
fn fits_are_nondegenerate_and_nested() {
    let ball = rotation_ball(spec(), 16, 1e-6).unwrap();
    // xy has order 8, so its path winds around a polygon and the fit decays
    // with the power; the infinite-order periods stay geodesic at this scale.
    for (w, baseline) in [("x*y", (0.05, 4.0)), ("x*y^2", (1.0, 0.0)), ("x*y*x*y^-1", (1.0, 0.0))] {
        let b = ball.alphabet.parse_word(w).unwrap();
        let fit = quasigeodesic_fit(&ball, &b, 40, None).unwrap();
        assert!(fit.lambda > 0.0, "{w}: {fit:?}");
        assert_eq!((fit.lambda, fit.c), baseline, "{w}: {fit:?}");
        let (dist, done) = periodic_distances(&ball, &b, fit.effective_power);
        assert_eq!(done, fit.effective_power);
        for m in 1..=done {
            assert!(fit.holds_for(&dist, b.len(), m), "{w} at power {m}");
        }
    }
}

#[test]
fn self_witness_and_short_elements() {
    let ball = rotation_ball(spec(), 8, 1e-6).unwrap();
    let w = |s: &str| ball.alphabet.parse_word(s).unwrap();
    // Z = x*y*x*y^-1 has infinite order; g = Z^2 with t = 1.
    let got = aperiodicity_scan(&ball, &w("(x*y*x*y^-1)^2"), 0, 1.0, 4).unwrap();
    assert!(matches!(got, Aperiodicity::PeriodicWitness { .. }), "{got:?}");
    for g in ["x", "y"] {
        let got = aperiodicity_scan(&ball, &w(g), 0, 2.0, 4).unwrap();
        assert!(matches!(got, Aperiodicity::AperiodicAtScale { .. }), "{g}: {got:?}");
    }
    // Only torsion periods fit under the cap: nothing to decide.
    let got = aperiodicity_scan(&ball, &w("x"), 0, 2.0, 1).unwrap();
    assert!(matches!(got, Aperiodicity::Undecided { .. }), "{got:?}");
}

#[test]
fn aperiodicity_baselines() {
    let ball = rotation_ball(spec(), 8, 1e-6).unwrap();
    let verdict = |g: &str| {
        let got = aperiodicity_scan(&ball, &ball.alphabet.parse_word(g).unwrap(), 1, 2.0, 4).unwrap();
        match got {
            Aperiodicity::AperiodicAtScale { .. } => "aperiodic".to_string(),
            Aperiodicity::PeriodicWitness { period, .. } => period,
            Aperiodicity::Undecided { .. } => "undecided".to_string(),
        }
    };
    assert_eq!(verdict("(y*x*y)^1*x^1"), "aperiodic");
    assert_eq!(verdict("(y*x*y)^2*x^2"), "x*y^2");
    assert_eq!(verdict("(x*y^2)^1*x^1"), "y*x*y");
    assert_eq!(verdict("(x*y^2)^2*x^2"), "x*y^2");
}

fn word_strategy(ngens: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..2 * ngens, 0..=max_len).prop_map(|cs| Word::from_letters(cs.into_iter().map(Letter::from_column)))
}

proptest! {
    #[test]
    fn orientation_parity(w in word_strategy(3, 12)) {
        let refl = build_reflections(spec()).unwrap();
        let m = w.letters().iter().fold(Isometry::identity(), |acc, l| acc * refl[l.generator()]);
        let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((m.det() - sign).abs() < 1e-9);
        prop_assert!(m.form_residual() <= 10.0 * (w.len() as f64 + 1.0) * f64::EPSILON * (1.0 + m.norm().powi(2)));
    }

    #[test]
    fn ball_lookup_agrees_with_products(w in word_strategy(2, 6)) {
        let ball = rotation_ball(spec(), 6, 1e-6).unwrap();
        let v = ball.locate(&w).unwrap();
        let m = w.letters().iter().fold(Isometry::identity(), |acc, &l| acc * ball.generator_matrix(l));
        prop_assert_eq!(ball.find(&m), Some(v));
        prop_assert!(ball.vertices[v].dist <= w.len());
    }
}
