use kokonet::angles::derive_net;
use kokonet::catalog::{
    paradox_isolated_state, qs_first_net, qs_paradox_seed, right_angled_net, right_angled_range, right_angled_state,
};
use kokonet::classify::{classify, exclusivity, ExclusivityConfig, CLOSED_FORM_TOL};
use kokonet::elliptic::EllipticContext;
use kokonet::kinematics::{flexion_trace, rigidity_probe, state_closure, ProbeConfig, Rigidity};
use kokonet::qsnet::{cot_half, qs_flexion, Sign};

#[test]
fn right_angled_derived_values() {
    let q = derive_net(&right_angled_net()).unwrap();
    for v in &q {
        assert!((v.m - 0.5).abs() < 1e-12, "M = {}", v.m);
    }
    let (r, s) = ([4.0 / 3.0, 4.0 / 3.0, 2.5, 2.5], [3.0, 11.0 / 6.0, 11.0 / 6.0, 3.0]);
    for i in 0..4 {
        assert!((q[i].r - r[i]).abs() < 1e-12 && (q[i].s - s[i]).abs() < 1e-12);
    }
}

#[test]
fn right_angled_is_equimodular_with_half_period_sums() {
    let net = right_angled_net();
    let rep = classify(&net, CLOSED_FORM_TOL).unwrap();
    assert!(rep.elliptic && rep.moduli_equal && rep.amplitudes_match, "{rep:?}");
    assert!(rep.verdict, "{rep:?}");
    let ctx = EllipticContext::new(rep.modulus.unwrap()).unwrap();
    let t = rep.phase_shifts.unwrap().map(|p| p.to_complex(&ctx));
    let half = ctx.quarter_period_prime;
    for (a, b) in [(1, 2), (0, 3)] {
        let sum = t[a] + t[b];
        // Sums equal i K' modulo the period lattice.
        let r = kokonet::elliptic::lattice_residual(sum - num_complex::Complex64::new(0.0, half), &ctx);
        let r_neg = kokonet::elliptic::lattice_residual(sum + num_complex::Complex64::new(0.0, half), &ctx);
        assert!(r.min(r_neg) < 1e-8, "pair {a},{b}: {sum}");
    }
}

#[test]
fn right_angled_trace_follows_closed_form() {
    let net = right_angled_net();
    let (lo, hi) = right_angled_range();
    for br in [Sign::Minus, Sign::Plus] {
        let ts: Vec<f64> = (1..40).map(|k| lo + (hi - lo) * k as f64 / 40.0).collect();
        let start = right_angled_state(ts[0], br).unwrap();
        let trace = flexion_trace(&net, &start, &ts[1..]).unwrap();
        assert!(trace.diagnostic.is_none(), "{:?}", trace.diagnostic);
        for (t, s) in trace.t.iter().zip(&trace.states) {
            let want = right_angled_state(*t, br).unwrap();
            assert!(s.distance(&want) < 1e-8, "t={t}");
        }
    }
}

#[test]
fn right_angled_is_not_in_known_classes_except_possibly_linear_compound() {
    let net = right_angled_net();
    let (lo, hi) = right_angled_range();
    let samples: Vec<_> =
        (1..20).map(|k| right_angled_state(lo + (hi - lo) * k as f64 / 20.0, Sign::Minus).unwrap()).collect();
    let rep = exclusivity(&net, &samples, &ExclusivityConfig::default()).unwrap();
    assert_eq!(rep.strip_variants_checked, 16);
    assert!(rep.orthodiagonal_ruled_out);
    assert!(rep.conjugate_modular_ruled_out);
    assert!(rep.trivial_ruled_out);
    // cot(theta_1/2) cot(theta_3/2) = 1 along the flexion.
    assert!(!rep.linear_compound_ruled_out);
    for s in &samples {
        assert!((cot_half(s.theta[0]) * cot_half(s.theta[2]) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn quasi_symmetric_nets_classify_as_equimodular() {
    let rep = classify(&qs_first_net().unwrap(), CLOSED_FORM_TOL).unwrap();
    assert!(rep.verdict, "{rep:?}");
    let net = kokonet::qsnet::build_qs_net(&qs_paradox_seed()).unwrap();
    assert!(classify(&net, CLOSED_FORM_TOL).unwrap().verdict);
}

#[test]
fn first_quasi_symmetric_exclusivity() {
    let fl = qs_flexion(&kokonet::catalog::qs_first_seed(), Sign::Plus).unwrap();
    let samples: Vec<_> = fl.sample_ts(16).into_iter().filter_map(|t| fl.eval(t).ok()).collect();
    let rep = exclusivity(&fl.net, &samples, &ExclusivityConfig::default()).unwrap();
    assert!(rep.orthodiagonal_ruled_out && rep.conjugate_modular_ruled_out && rep.trivial_ruled_out);
    assert!(rep.linear_compound_ruled_out);
}

#[test]
fn too_few_samples_rejected() {
    let net = right_angled_net();
    let s = vec![right_angled_state(0.7, Sign::Minus).unwrap(); 3];
    let err = exclusivity(&net, &s, &ExclusivityConfig::default()).unwrap_err();
    assert_eq!(err.name(), "TooFewSamples");
}

#[test]
fn paradox_net_has_isolated_and_flexible_realizations() {
    let net = kokonet::qsnet::build_qs_net(&qs_paradox_seed()).unwrap();
    let iso = paradox_isolated_state();
    assert!(state_closure(&net, &iso) < 1e-12);
    let cfg = ProbeConfig::default();
    assert_eq!(rigidity_probe(&net, &iso, 1e-3, &cfg).unwrap(), Rigidity::Isolated);
    let fl = qs_flexion(&qs_paradox_seed(), Sign::Plus).unwrap();
    let flexing = fl.eval(0.5).unwrap();
    assert_eq!(rigidity_probe(&net, &flexing, 1e-3, &cfg).unwrap(), Rigidity::Flexes);
}
