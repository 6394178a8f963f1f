use permsep_core::norm_group::{is_norm_preserving, random_element};
use permsep_core::{
    canonical_key, compose, cycle_decomposition, derive_normal_form, equivalent, parse_permutation,
    representative_permutation, CanonicalKey, Permutation,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn perm_of_degree(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(&v).unwrap())
}

fn perm(r_max: usize) -> impl Strategy<Value = Permutation> {
    (2..=r_max).prop_flat_map(|r| perm_of_degree(2 * r))
}

fn perm_triple(r_max: usize) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (2..=r_max).prop_flat_map(|r| {
        (
            perm_of_degree(2 * r),
            perm_of_degree(2 * r),
            perm_of_degree(2 * r),
        )
    })
}

/// A permutation together with a norm-preserving element of the same degree.
fn perm_and_t(r_max: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (perm(r_max), any::<u64>()).prop_map(|(s, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_element(s.subsystems(), &mut rng);
        (s, t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn format_then_parse(s in perm(6)) {
        prop_assert_eq!(parse_permutation(&s.to_string(), s.degree()).unwrap(), s.clone());
        prop_assert_eq!(parse_permutation(&s.one_line(), s.degree()).unwrap(), s);
    }

    #[test]
    fn composition_is_associative((a, b, c) in perm_triple(6)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_cancels(s in perm(6)) {
        prop_assert!(compose(&s, &s.inverse()).unwrap().is_identity());
        prop_assert!(compose(&s.inverse(), &s).unwrap().is_identity());
    }

    #[test]
    fn decomposition_round_trips(s in perm(6)) {
        let cd = cycle_decomposition(&s);
        prop_assert_eq!(cd.to_permutation(), s);
        for c in cd.cycles() {
            prop_assert!(c.len() >= 2);
            prop_assert_eq!(c[0], *c.iter().min().unwrap());
        }
        let mins: Vec<usize> = cd.cycles().iter().map(|c| c[0]).collect();
        prop_assert!(mins.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn key_is_constant_on_cosets((s, t) in perm_and_t(4)) {
        prop_assert!(is_norm_preserving(&t));
        let st = compose(&s, &t).unwrap();
        prop_assert_eq!(canonical_key(&s), canonical_key(&st));
    }

    #[test]
    fn derivation_multipliers_preserve_norm(s in perm(6)) {
        let d = derive_normal_form(&s);
        prop_assert!(d.configuration.is_disjoint());
        for step in &d.steps {
            prop_assert!(is_norm_preserving(&step.multiplier), "{:?} {}", step.rule, step.multiplier);
            prop_assert_eq!(compose(&step.before, &step.multiplier).unwrap(), step.after.clone());
        }
        let reached = d.configuration.as_permutation();
        prop_assert!(is_norm_preserving(&compose(&s.inverse(), &reached).unwrap()));
    }

    #[test]
    fn representative_is_right_inverse(s in perm(6)) {
        let key = canonical_key(&s);
        let rep = representative_permutation(&key);
        prop_assert_eq!(canonical_key(&rep), key.clone());
        prop_assert!(is_norm_preserving(&compose(&rep.inverse(), &s).unwrap()));
        let (h, t) = key.flip_partner();
        prop_assert_eq!(CanonicalKey::new(key.r(), &h, &t).unwrap(), key);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn equivalent_under_right_multiplication((s, t) in perm_and_t(6)) {
        let st = compose(&s, &t).unwrap();
        prop_assert!(equivalent(&s, &st).unwrap());
    }

    #[test]
    fn equivalence_agrees_with_parity_test(s in perm(6), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let other = Permutation::random(s.degree(), &mut rng).unwrap();
        let parity = is_norm_preserving(&compose(&other.inverse(), &s).unwrap());
        prop_assert_eq!(equivalent(&s, &other).unwrap(), parity);
    }
}
