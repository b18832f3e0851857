//! Property tests over seeded random harmonic maps and points.

use num_rational::BigRational;
use proptest::prelude::*;

use qharm::oracles::{numeric_gradient, sphere_mean, SphereQuadrature};
use qharm::polyharm::{random_harmonic_map, HarmonicMap};
use qharm::spectral::{gram, spectral_at, sym_eigenvalues};
use qharm::subharm::{laplacian_modulus_power, pointwise_threshold, thresholds};

fn modulus(u: &HarmonicMap, x: &[f64]) -> f64 {
    u.eval(x).iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

/// Rotation by the angle with cosine 3/5 in the (0, 1) plane.
fn pythagorean_rotation(n: usize) -> Vec<Vec<BigRational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i, j) {
                    (0, 0) | (1, 1) => rat(3, 5),
                    (0, 1) => rat(-4, 5),
                    (1, 0) => rat(4, 5),
                    _ if i == j => rat(1, 1),
                    _ => rat(0, 1),
                })
                .collect()
        })
        .collect()
}

fn setup() -> impl Strategy<Value = (HarmonicMap, Vec<f64>, u64)> {
    (2usize..=3, 1u32..=3, any::<u64>(), prop::collection::vec(-1.0f64..1.0, 3)).prop_filter_map(
        "point too close to a zero",
        |(n, deg, seed, coords)| {
            let u = random_harmonic_map(n, deg, seed).ok()?;
            let x = coords[..n].to_vec();
            (modulus(&u, &x) > 0.1 && spectral_at(&u, &x).min_stretch > 1e-3).then_some((u, x, seed))
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaling_covariance((u, x, _) in setup(), q in -3.0f64..3.0, c in prop::sample::select(vec![(2, 1), (1, 3), (5, 2)])) {
        let cu = u.scaled(&rat(c.0, c.1));
        let factor = (c.0 as f64 / c.1 as f64).powf(q);
        let a = laplacian_modulus_power(&cu, &x, q).unwrap();
        let b = laplacian_modulus_power(&u, &x, q).unwrap();
        prop_assert!((a - factor * b).abs() <= 1e-11 * (a.abs() + factor * b.abs()) + 1e-300, "{a} vs {}", factor * b);
        let ta = pointwise_threshold(&cu, &x).unwrap();
        let tb = pointwise_threshold(&u, &x).unwrap();
        prop_assert!((ta - tb).abs() <= 1e-12 * (1.0 + tb.abs()));
    }

    #[test]
    fn orthogonal_invariance((u, x, _) in setup(), q in -3.0f64..3.0) {
        let n = u.dimension();
        let qu = u.compose_left(&pythagorean_rotation(n)).unwrap();
        let a = laplacian_modulus_power(&qu, &x, q).unwrap();
        let b = laplacian_modulus_power(&u, &x, q).unwrap();
        prop_assert!((a - b).abs() <= 1e-11 * (a.abs() + b.abs()) + 1e-300, "{a} vs {b}");
        let sa = spectral_at(&qu, &x);
        let sb = spectral_at(&u, &x);
        for (la, lb) in sa.lambdas.iter().zip(&sb.lambdas) {
            prop_assert!(close(*la, *lb, 1e-9));
        }
    }

    #[test]
    fn symbolic_partials_match_central_differences((u, x, _) in setup()) {
        let n = u.dimension();
        let j = u.jacobian(&x);
        for c in 0..n {
            let g = numeric_gradient(|y| u.eval(y)[c], &x, 1e-5);
            for (i, gi) in g.iter().enumerate() {
                let exact = j[(i, c)];
                prop_assert!((gi - exact).abs() <= 1e-6 * (1.0 + exact.abs()), "d u{c} / d x{i}: {gi} vs {exact}");
            }
        }
    }

    #[test]
    fn planar_components_have_the_mean_value_property(deg in 1u32..=4, seed in any::<u64>(), cx in -1.0f64..1.0, cy in -1.0f64..1.0, r in 0.05f64..0.5) {
        let u = random_harmonic_map(2, deg, seed).unwrap();
        let x = [cx, cy];
        // the trapezoid rule is exact for these trigonometric polynomials
        let quad = SphereQuadrature::trapezoid(64);
        for c in 0..2 {
            let m = sphere_mean(|y| u.eval(y)[c], &x, r, &quad).unwrap();
            let center = u.eval(&x)[c];
            prop_assert!((m.value - center).abs() <= m.err_est + 1e-12 * (1.0 + center.abs()), "{} vs {center}", m.value);
        }
    }

    #[test]
    fn threshold_lies_within_dilatation_bounds((u, x, _) in setup()) {
        let sd = spectral_at(&u, &x);
        let th = thresholds(u.dimension(), sd.linear_dilatation()).unwrap();
        let t = pointwise_threshold(&u, &x).unwrap();
        prop_assert!(t >= th.q_minus - 1e-9 && t <= th.q_plus + 1e-9, "t = {t}, bounds [{}, {}]", th.q_minus, th.q_plus);
    }

    #[test]
    fn sign_of_laplacian_follows_threshold((u, x, _) in setup(), q in -3.0f64..2.0) {
        let t = pointwise_threshold(&u, &x).unwrap();
        prop_assume!((q - t).abs() > 1e-6 && q != 0.0);
        let d = laplacian_modulus_power(&u, &x, q).unwrap();
        let expect_nonneg = if q > 0.0 { q >= t } else { q <= t };
        prop_assert_eq!(d >= 0.0, expect_nonneg, "q = {}, t = {}, Delta = {}", q, t, d);
    }

    #[test]
    fn gram_spectrum_sums_to_trace((u, x, _) in setup()) {
        let g = gram(&u.jacobian(&x));
        let ev = sym_eigenvalues(&g).unwrap();
        let sum: f64 = ev.iter().sum();
        prop_assert!(close(sum, g.trace(), 1e-12));
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn map_json_round_trip(n in 2usize..=4, deg in 1u32..=3, seed in any::<u64>()) {
        let u = random_harmonic_map(n, deg, seed).unwrap();
        let back = HarmonicMap::from_json_str(&u.to_json_string().unwrap()).unwrap();
        prop_assert_eq!(back, u);
    }

    #[test]
    fn regularization_shifts_first_component((u, x, _) in setup(), m in 1u64..50) {
        let um = u.regularized(m).unwrap();
        let a = um.eval(&x);
        let b = u.eval(&x);
        prop_assert!((a[0] - b[0] - 1.0 / m as f64).abs() < 1e-12 * (1.0 + b[0].abs()));
        prop_assert_eq!(&a[1..], &b[1..]);
    }
}

/// Monte Carlo means of harmonic components in three dimensions: the
/// error estimate is three standard errors, so nearly all draws land
/// inside it and none land far outside.
#[test]
fn spatial_components_have_the_mean_value_property() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let (mut inside, mut total) = (0, 0);
    for trial in 0..100u64 {
        let u = random_harmonic_map(3, 3, trial).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = rng.gen_range(0.05..0.5);
        let quad = SphereQuadrature::for_dimension(3, trial);
        for c in 0..3 {
            let m = sphere_mean(|y| u.eval(y)[c], &x, r, &quad).unwrap();
            let dev = (m.value - u.eval(&x)[c]).abs();
            total += 1;
            if dev <= m.err_est + 1e-12 {
                inside += 1;
            }
            assert!(dev <= 2.0 * m.err_est + 1e-12, "trial {trial}: deviation {dev:e}, err_est {:e}", m.err_est);
        }
    }
    assert!(inside as f64 >= 0.97 * total as f64, "{inside} of {total} within err_est");
}
