use kokonet::kinematics::{state_closure, vertex_equation_residuals};
use kokonet::qsnet::{cot_half, qs_flexion, QsSeed, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn first_example_cots(t: f64, sign: f64) -> [f64; 4] {
    let (s2, s3, s6) = (2f64.sqrt(), 3f64.sqrt(), 6f64.sqrt());
    let root = sign * (2.0 + 6.0 * t * t + 3.0 * t.powi(4)).sqrt();
    let den = 1.0 + s3 + 3.0 * t * t;
    [((s2 - s6) * t + root) / den, t, ((s6 - s2) * t + root) / den, root / (1.0 + s3 + s3 * t * t)]
}

#[test]
fn first_example_matches_closed_form() {
    let seed = QsSeed::from_degrees(105.0, 15.0, 120.0);
    for (branch, sign) in [(Sign::Plus, 1.0), (Sign::Minus, -1.0)] {
        let fl = qs_flexion(&seed, branch).unwrap();
        assert_eq!(fl.intervals.len(), 1);
        assert!(fl.intervals[0].lo.is_infinite());
        for t in [0.0, 0.5, 1.0, 2.0] {
            let got = fl.cot_halves(t).unwrap().values();
            let want = first_example_cots(t, sign);
            for k in 0..4 {
                assert!((got[k] - want[k]).abs() < 1e-12, "t={t} k={k} {got:?} {want:?}");
            }
            let state = fl.eval(t).unwrap();
            for k in 0..4 {
                assert!((cot_half(state.theta[k]) - want[k]).abs() < 1e-9 * (1.0 + want[k].abs()));
            }
        }
    }
}

#[test]
fn first_example_at_one() {
    let fl = qs_flexion(&QsSeed::from_degrees(105.0, 15.0, 120.0), Sign::Plus).unwrap();
    let c = fl.cot_halves(1.0).unwrap().values();
    assert!((c[1] - 1.0).abs() < 1e-15);
    assert!((c[3] - 11f64.sqrt() / (1.0 + 2.0 * 3f64.sqrt())).abs() < 1e-12);
    let c0 = fl.cot_halves(0.0).unwrap().values();
    let want = 2f64.sqrt() / (1.0 + 3f64.sqrt());
    assert!((c0[0] - want).abs() < 1e-12 && (c0[2] - want).abs() < 1e-12 && (c0[3] - want).abs() < 1e-12);
}

#[test]
fn second_example_coefficients() {
    // Closed form scaled so the theta_4 numerator reads sqrt(2) sqrt(sqrt3 t^4 + 6 t^2 + 2 sqrt3).
    let fl = qs_flexion(&QsSeed::from_degrees(15.0, 60.0, 75.0), Sign::Plus).unwrap();
    let s3 = 3f64.sqrt();
    for t in [0.1f64, 0.5, 2.0] {
        let root = 2f64.sqrt() * (s3 * t.powi(4) + 6.0 * t * t + 2.0 * s3).sqrt();
        let want = [
            (root - 2.0 * 6f64.sqrt() * t) / (2.0 - (s3 + 1.0) * t * t),
            t,
            (root + 2.0 * 6f64.sqrt() * t) / (2.0 - (s3 + 1.0) * t * t),
            root / ((s3 - 1.0) * t * t + 2.0),
        ];
        let got = fl.cot_halves(t).unwrap().values();
        for k in 0..4 {
            assert!((got[k] - want[k]).abs() < 1e-12 * (1.0 + want[k].abs()), "t={t} k={k}");
        }
    }
}

#[test]
fn discriminant_factorization_and_closure_on_random_seeds() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    while tested < 200 {
        let seed = QsSeed {
            alpha1: rng.random_range(0.05..3.09),
            beta1: rng.random_range(0.05..3.09),
            gamma1: rng.random_range(0.05..3.09),
        };
        let Ok(fl) = qs_flexion(&seed, if tested % 2 == 0 { Sign::Plus } else { Sign::Minus }) else {
            continue;
        };
        tested += 1;
        for t in fl.sample_ts(20) {
            let scale = 1.0 + t * t * t * t;
            assert!((fl.discriminant(t) - fl.discriminant_factored(t)).abs() < 1e-12 * scale);
            let Ok(state) = fl.eval(t) else { continue };
            let c = state_closure(&fl.net, &state);
            assert!(c < 1e-9, "seed {seed:?} t {t} closure {c:e}");
            let r = vertex_equation_residuals(&fl.net, &state).unwrap();
            assert!(r.iter().all(|v| *v < 1e-8), "{r:?}");
        }
    }
}
