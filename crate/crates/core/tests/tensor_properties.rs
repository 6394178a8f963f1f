use nalgebra::DMatrix;
use num_complex::Complex64;
use permsep_core::norm_group::{enumerate_classes, random_element};
use permsep_core::tensor::{random_operator, DEFAULT_TOLERANCE};
use permsep_core::{
    apply_permutation, compose, evaluate_criteria, make_state, trace_norm, Permutation, StateKind,
    Verdict,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn frobenius(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn max_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn coset_norms_agree(r in 2usize..=3, d in 2usize..=3, seed in any::<u64>()) {
        prop_assume!(r * d <= 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = make_state(&StateKind::RandomState { seed }, r, d).unwrap();
        let s = Permutation::random(2 * r, &mut rng).unwrap();
        let t = random_element(r, &mut rng);
        let a = apply_permutation(rho.operator(), &s).unwrap().trace_norm();
        let b = apply_permutation(rho.operator(), &compose(&s, &t).unwrap()).unwrap().trace_norm();
        prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
    }

    #[test]
    fn frobenius_isometry(r in 1usize..=3, d in 2usize..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_operator(r, d, seed).unwrap();
        let s = Permutation::random(2 * r, &mut rng).unwrap();
        let y = apply_permutation(&x, &s).unwrap();
        prop_assert!((frobenius(x.matrix()) - frobenius(y.matrix())).abs() < 1e-10);
    }

    #[test]
    fn maps_compose(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_operator(3, 2, seed).unwrap();
        let a = Permutation::random(6, &mut rng).unwrap();
        let b = Permutation::random(6, &mut rng).unwrap();
        let lhs = apply_permutation(&x, &compose(&a, &b).unwrap()).unwrap();
        let rhs = apply_permutation(&apply_permutation(&x, &a).unwrap(), &b).unwrap();
        prop_assert!(max_diff(lhs.matrix(), rhs.matrix()) < 1e-12);
    }

    #[test]
    fn separable_states_are_undetected(r in 2usize..=3, terms in 1usize..=5, seed in any::<u64>()) {
        let rho = make_state(&StateKind::RandomSeparable { terms, seed }, r, 2).unwrap();
        let report = evaluate_criteria(&rho, DEFAULT_TOLERANCE).unwrap();
        prop_assert!(report.max_norm <= 1.0 + DEFAULT_TOLERANCE, "max {}", report.max_norm);
        prop_assert_eq!(report.verdict, Verdict::Undetected);
    }
}

#[test]
fn representatives_of_a_class_give_one_norm() {
    let rho = make_state(&StateKind::RandomState { seed: 5 }, 3, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for class in enumerate_classes(3).unwrap() {
        let rep = class.representative();
        let base = apply_permutation(rho.operator(), &rep)
            .unwrap()
            .trace_norm();
        for _ in 0..5 {
            let t = random_element(3, &mut rng);
            let other = compose(&rep, &t).unwrap();
            let n =
                trace_norm(apply_permutation(rho.operator(), &other).unwrap().matrix()).unwrap();
            assert!((n - base).abs() < 1e-9);
        }
    }
}

#[test]
fn entangled_examples() {
    let bell = make_state(&StateKind::BellPair(1, 2), 2, 2).unwrap();
    let report = evaluate_criteria(&bell, DEFAULT_TOLERANCE).unwrap();
    assert_eq!(report.verdict, Verdict::Entangled);
    assert!((report.max_norm - 2.0).abs() < 1e-9);
    let ghz = make_state(&StateKind::Ghz, 3, 2).unwrap();
    assert_eq!(
        evaluate_criteria(&ghz, DEFAULT_TOLERANCE).unwrap().verdict,
        Verdict::Entangled
    );
    let mixed = make_state(&StateKind::MaximallyMixed, 3, 3).unwrap();
    let report = evaluate_criteria(&mixed, DEFAULT_TOLERANCE).unwrap();
    assert_eq!(report.verdict, Verdict::Undetected);
    assert!(report.records.iter().all(|rec| rec.norm <= 1.0 + 1e-12));
}
