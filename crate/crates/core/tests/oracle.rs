//! Canonical keys and the census checked against an independent invariant:
//! the set of positions sent to odd points, taken up to complement.

use std::collections::{BTreeMap, BTreeSet};

use permsep_core::norm_group::{all_permutations, binomial, census_by_type};
use permsep_core::{canonical_key, is_norm_preserving, CanonicalKey, Permutation};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type ParitySet = Vec<usize>;

/// `{x : σ(x) odd}` or its complement, whichever sorts first.
fn oracle(sigma: &Permutation) -> ParitySet {
    let n = sigma.degree();
    let odd: ParitySet = (1..=n).filter(|&x| sigma.image(x) % 2 == 1).collect();
    let even: ParitySet = (1..=n)
        .filter(|&x| sigma.image(x).is_multiple_of(2))
        .collect();
    odd.min(even)
}

/// Parity set implied by a key: tails sit on even positions, non-heads on odd ones.
fn oracle_of_key(key: &CanonicalKey) -> ParitySet {
    let r = key.r();
    let mut set: BTreeSet<usize> = key.tails().iter().map(|&t| 2 * t).collect();
    set.extend(
        (1..=r)
            .filter(|j| !key.heads().contains(j))
            .map(|j| 2 * j - 1),
    );
    let set: ParitySet = set.into_iter().collect();
    let complement: ParitySet = (1..=2 * r).filter(|x| !set.contains(x)).collect();
    set.min(complement)
}

fn check_partition(r: usize) {
    let mut by_key: BTreeMap<CanonicalKey, BTreeSet<ParitySet>> = BTreeMap::new();
    let mut by_oracle: BTreeMap<ParitySet, BTreeSet<CanonicalKey>> = BTreeMap::new();
    let mut sizes: BTreeMap<ParitySet, u128> = BTreeMap::new();
    for sigma in all_permutations(2 * r) {
        let key = canonical_key(&sigma);
        let o = oracle(&sigma);
        assert_eq!(oracle_of_key(&key), o, "{sigma}: key {key}");
        by_key.entry(key.clone()).or_default().insert(o.clone());
        by_oracle.entry(o.clone()).or_default().insert(key);
        *sizes.entry(o).or_default() += 1;
    }
    assert!(by_key.values().all(|s| s.len() == 1));
    assert!(by_oracle.values().all(|s| s.len() == 1));
    assert_eq!(by_key.len() as u128, binomial(2 * r, r) / 2);
    let fact: u128 = (1..=r as u128).product();
    assert!(sizes.values().all(|&s| s == 2 * fact * fact));
}

#[test]
fn partition_matches_oracle_r2() {
    check_partition(2);
}

#[test]
fn partition_matches_oracle_r3() {
    check_partition(3);
}

#[test]
fn partition_matches_oracle_r4() {
    check_partition(4);
}

#[test]
fn random_pairs_up_to_r6() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for r in 2..=6 {
        for _ in 0..400 {
            let s = Permutation::random(2 * r, &mut rng).unwrap();
            let t = Permutation::random(2 * r, &mut rng).unwrap();
            let same = canonical_key(&s) == canonical_key(&t);
            assert_eq!(same, oracle(&s) == oracle(&t), "{s} vs {t}");
            assert_eq!(same, is_norm_preserving(&t.inverse().then(&s).unwrap()));
            assert_eq!(oracle_of_key(&canonical_key(&s)), oracle(&s));
        }
    }
}

fn structure(a: usize, l: usize) -> String {
    let part = |n: usize, s: &str| match n {
        0 => None,
        1 => Some(s.to_string()),
        n => Some(format!("{n}{s}")),
    };
    let parts: Vec<String> = [part(a, "R"), part(l, "QT")]
        .into_iter()
        .flatten()
        .collect();
    parts.join("+")
}

/// Census recomputed from every `r`-subset of positions.
fn oracle_census(r: usize) -> BTreeMap<String, usize> {
    let mut seen = BTreeSet::new();
    let mut census = BTreeMap::new();
    for mask in 0u32..(1 << (2 * r)) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let set: ParitySet = (1..=2 * r).filter(|x| mask & (1 << (x - 1)) != 0).collect();
        let complement: ParitySet = (1..=2 * r).filter(|x| !set.contains(x)).collect();
        if !seen.insert(set.clone().min(complement)) {
            continue;
        }
        let tails: BTreeSet<usize> = (1..=r).filter(|t| set.contains(&(2 * t))).collect();
        let heads: BTreeSet<usize> = (1..=r).filter(|j| !set.contains(&(2 * j - 1))).collect();
        let l = tails.intersection(&heads).count();
        let a = tails.len() - l;
        let f = r - 2 * a - l;
        let (fewer, more) = (l.min(f), l.max(f));
        if a == 0 && fewer == 0 {
            continue;
        }
        let label = if a == 0 || fewer == more {
            structure(a, fewer)
        } else {
            format!("{}|{}", structure(a, fewer), structure(a, more))
        };
        *census.entry(label).or_insert(0) += 1;
    }
    census
}

#[test]
fn census_matches_oracle() {
    for r in 2..=6 {
        assert_eq!(
            census_by_type(r).unwrap().as_map(),
            oracle_census(r),
            "r={r}"
        );
    }
}

#[test]
fn census_reference_values() {
    let m = |pairs: &[(&str, usize)]| {
        pairs
            .iter()
            .map(|&(k, v)| (k.to_string(), v))
            .collect::<BTreeMap<_, _>>()
    };
    assert_eq!(
        census_by_type(2).unwrap().as_map(),
        m(&[("QT", 1), ("R", 1)])
    );
    assert_eq!(
        census_by_type(3).unwrap().as_map(),
        m(&[("QT", 3), ("R|R+QT", 6)])
    );
    assert_eq!(
        census_by_type(4).unwrap().as_map(),
        m(&[
            ("QT", 4),
            ("2QT", 3),
            ("R|R+2QT", 12),
            ("R+QT", 12),
            ("2R", 3)
        ])
    );
    for r in 2..=8 {
        assert_eq!(
            census_by_type(r).unwrap().total() as u128,
            binomial(2 * r, r) / 2 - 1
        );
    }
}
