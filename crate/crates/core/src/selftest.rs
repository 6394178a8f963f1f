//! End-to-end acceptance checks, shared by the `selftest` command and the
//! `acceptance` test target.
//!
//! Every tolerance and count here is fixed; a check either reproduces it
//! exactly or fails.

use std::collections::BTreeSet;
use std::fmt;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrow::{canonical_key, configuration_from_sets, flip, CanonicalKey};
use crate::norm_group::{
    all_permutations, binomial, census_by_type, group_elements, group_elements_by_filter,
    is_norm_preserving, nontrivial_classes,
};
use crate::perm::{compose, parse_permutation, Permutation};
use crate::tensor::{
    apply_permutation, detector_state, evaluate_criteria, make_state, random_operator,
    swap_operator, StateKind,
};

pub const DEFAULT_SEED: u64 = 20_050_101;

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

struct Check {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check {
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        let what = what.into();
        if ok {
            self.notes.push(what);
        } else {
            self.failures.push(what);
        }
    }

    fn within(&mut self, start: Instant, limit: Duration) {
        let elapsed = start.elapsed();
        self.expect(
            elapsed < limit,
            format!("{:.2}s < {}s", elapsed.as_secs_f64(), limit.as_secs()),
        );
    }

    fn finish(self, id: usize, name: &'static str, start: Instant) -> CheckOutcome {
        let passed = self.failures.is_empty();
        let detail = if passed {
            self.notes.join("; ")
        } else {
            format!("FAILED: {}", self.failures.join("; "))
        };
        CheckOutcome {
            id,
            name,
            passed,
            detail,
            elapsed: start.elapsed(),
        }
    }
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Exhaustive canonicalization of `S_4`, `S_6`, `S_8`: 3 / 10 / 35 keys.
pub fn coset_counts() -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    for (r, expected) in [(2, 3), (3, 10), (4, 35)] {
        let keys: BTreeSet<CanonicalKey> =
            all_permutations(2 * r).map(|s| canonical_key(&s)).collect();
        c.expect(
            keys.len() == expected,
            format!("r={r}: {} keys (want {expected})", keys.len()),
        );
    }
    c.within(start, Duration::from_secs(10));
    c.finish(1, "coset counts", start)
}

/// Parity filter and generator closure give the same group of order 2·r!·r!.
pub fn group_order() -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    for (r, expected) in [(2, 8), (3, 72), (4, 1152)] {
        let closure = group_elements(r).expect("r <= 5");
        let filter = group_elements_by_filter(r).expect("r <= 4");
        c.expect(
            closure == filter && closure.len() == expected,
            format!(
                "r={r}: closure {} filter {} (want {expected})",
                closure.len(),
                filter.len()
            ),
        );
    }
    c.finish(2, "group order", start)
}

/// Shared key ⟺ `τ⁻¹σ` passes the parity test, over all pairs for r ≤ 3.
pub fn coset_soundness() -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    for r in 1..=3 {
        let perms: Vec<Permutation> = all_permutations(2 * r).collect();
        let keys: Vec<CanonicalKey> = perms.iter().map(canonical_key).collect();
        let inverses: Vec<Permutation> = perms.iter().map(|p| p.inverse()).collect();
        let mut mismatches = 0usize;
        let mut pairs = 0usize;
        for (i, sigma) in perms.iter().enumerate() {
            for (j, tau_inv) in inverses.iter().enumerate() {
                let same_key = keys[i] == keys[j];
                let parity = is_norm_preserving(&compose(tau_inv, sigma).expect("same degree"));
                if same_key != parity {
                    mismatches += 1;
                }
                pairs += 1;
            }
        }
        c.expect(
            mismatches == 0,
            format!("r={r}: {pairs} pairs, {mismatches} mismatches"),
        );
    }
    c.within(start, Duration::from_secs(30));
    c.finish(3, "coset soundness", start)
}

/// (3,12,1,2,10,8)(4,5,6) and (3,4)(1,8)(5,12) share a key at degree 12.
pub fn worked_example() -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    let a = canonical_key(&parse_permutation("(3,12,1,2,10,8)(4,5,6)", 12).expect("valid"));
    let b = canonical_key(&parse_permutation("(3,4)(1,8)(5,12)", 12).expect("valid"));
    c.expect(a == b, format!("{a} vs {b}"));
    c.finish(4, "worked example", start)
}

/// Nontrivial class totals 2 / 9 / 34 and their type breakdown.
pub fn census() -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    let expected: [(usize, &[(&str, usize)]); 3] = [
        (2, &[("QT", 1), ("R", 1)]),
        (3, &[("QT", 3), ("R|R+QT", 6)]),
        (
            4,
            &[
                ("QT", 4),
                ("2QT", 3),
                ("R|R+2QT", 12),
                ("R+QT", 12),
                ("2R", 3),
            ],
        ),
    ];
    for (r, rows) in expected {
        let census = census_by_type(r).expect("r <= 8");
        let want: std::collections::BTreeMap<String, usize> =
            rows.iter().map(|(l, n)| (l.to_string(), *n)).collect();
        let total: usize = rows.iter().map(|(_, n)| n).sum();
        c.expect(
            census.as_map() == want && census.total() == total,
            format!("r={r}: {:?} total {}", census.as_map(), census.total()),
        );
    }
    c.finish(5, "census", start)
}

/// Every element of 𝒯 (r = 2, 3; d = 2) keeps the trace norm of 20 random
/// operators to within 1e−9 relative.
pub fn norm_preservation(seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    for r in [2, 3] {
        let group = group_elements(r).expect("r <= 5");
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let op = random_operator(r, 2, seed.wrapping_add(1000 * r as u64 + i)).expect("small");
            let base = op.trace_norm();
            for t in &group {
                let n = apply_permutation(&op, t).expect("degree 2r").trace_norm();
                worst = worst.max((n / base - 1.0).abs());
            }
        }
        c.expect(
            worst < 1e-9,
            format!(
                "r={r}: {} elements, max |ratio−1| = {worst:.1e}",
                group.len()
            ),
        );
    }
    c.within(start, Duration::from_secs(60));
    c.finish(6, "norm preservation", start)
}

/// 100 seeded random separable states never exceed 1 + 1e−9.
pub fn separability_bound(seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = [(2, 2), (2, 3), (3, 2), (3, 3)];
    let mut worst: f64 = 0.0;
    let mut offenders = 0;
    for i in 0..100 {
        let (r, d) = shapes[i % shapes.len()];
        let terms = rng.random_range(1..=10);
        let state_seed = rng.random::<u64>();
        let rho = make_state(
            &StateKind::RandomSeparable {
                terms,
                seed: state_seed,
            },
            r,
            d,
        )
        .expect("valid parameters");
        let report = evaluate_criteria(&rho, 1e-9).expect("small state");
        worst = worst.max(report.max_norm);
        if report.max_norm > 1.0 + 1e-9 {
            offenders += 1;
        }
    }
    c.expect(
        offenders == 0,
        format!("100 states, max class norm {worst:.12}, {offenders} above 1+1e-9"),
    );
    c.finish(7, "separability bound", start)
}

/// Each nontrivial class (r ≤ 4, d = 2) has a detector state with norm 2^(a+l).
pub fn detection_witnesses() -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    for r in 2..=4 {
        let classes = nontrivial_classes(r).expect("r <= 8");
        let mut bad = Vec::new();
        for class in &classes {
            let rho = detector_state(class, 2).expect("nontrivial");
            let norm = apply_permutation(rho.operator(), &class.representative())
                .expect("degree 2r")
                .trace_norm();
            let fewer_loops = class.loop_count.min(class.free_count());
            let expected = 2f64.powi((class.arrow_count + fewer_loops) as i32);
            if (norm - expected).abs() > 1e-9 || norm <= 1.0 {
                bad.push(format!("{} norm {norm} want {expected}", class.key));
            }
        }
        c.expect(
            bad.is_empty(),
            format!(
                "r={r}: {} classes detected {}",
                classes.len(),
                bad.join(", ")
            ),
        );
    }
    c.within(start, Duration::from_secs(10));
    c.finish(8, "detection witnesses", start)
}

/// Bell Φ⁺: 2 under both criteria. I/4: 0.5 under realignment, 1 under partial transpose.
pub fn bipartite_anchors() -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();
    let qt = Permutation::transposition(4, 1, 2).expect("valid");
    let re = Permutation::transposition(4, 2, 3).expect("valid");
    let bell = make_state(&StateKind::BellPair(1, 2), 2, 2).expect("valid");
    let mixed = make_state(&StateKind::MaximallyMixed, 2, 2).expect("valid");
    for (name, rho, perm, want) in [
        ("Bell QT", &bell, &qt, 2.0),
        ("Bell R", &bell, &re, 2.0),
        ("I/4 R", &mixed, &re, 0.5),
        ("I/4 QT", &mixed, &qt, 1.0),
    ] {
        let n = apply_permutation(rho.operator(), perm)
            .expect("degree 4")
            .trace_norm();
        c.expect((n - want).abs() <= 1e-9, format!("{name} = {n:.12}"));
    }
    c.finish(9, "bipartite anchors", start)
}

/// Flip involution, binomial identity, homomorphism and swap identities.
pub fn structural_properties(seed: u64) -> CheckOutcome {
    let start = Instant::now();
    let mut c = Check::new();

    let mut flip_failures = 0;
    let mut pairs = 0;
    for r in 1..=6 {
        for heads in 0u32..(1 << r) {
            for tails in 0u32..(1 << r) {
                if heads.count_ones() != tails.count_ones() {
                    continue;
                }
                pairs += 1;
                let h: Vec<usize> = (0..r)
                    .filter(|i| heads & (1 << i) != 0)
                    .map(|i| i + 1)
                    .collect();
                let t: Vec<usize> = (0..r)
                    .filter(|i| tails & (1 << i) != 0)
                    .map(|i| i + 1)
                    .collect();
                let config = configuration_from_sets(r, &h, &t);
                let once = flip(&config).expect("disjoint");
                let twice = flip(&once).expect("disjoint");
                let moved = once.heads() != config.heads() || once.tails() != config.tails();
                if twice != config || !moved {
                    flip_failures += 1;
                }
            }
        }
    }
    c.expect(
        flip_failures == 0,
        format!("flip on {pairs} (H,T) pairs r<=6: {flip_failures} failures"),
    );

    let identity_ok = (0..=10)
        .all(|r| (0..=r).map(|k| binomial(r, k).pow(2)).sum::<u128>() == binomial(2 * r, r));
    c.expect(identity_ok, "sum_k C(r,k)^2 = C(2r,r) for r<=10");

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut worst: f64 = 0.0;
    for i in 0..200 {
        let r = 1 + i % 3;
        let d = 2 + (i / 3) % 2;
        let op = random_operator(r, d, rng.random()).expect("small");
        let s1 = Permutation::random(2 * r, &mut rng).expect("even degree");
        let s2 = Permutation::random(2 * r, &mut rng).expect("even degree");
        let lhs = apply_permutation(&op, &compose(&s1, &s2).expect("same degree")).expect("degree");
        let rhs =
            apply_permutation(&apply_permutation(&op, &s1).expect("degree"), &s2).expect("degree");
        worst = worst.max(max_abs_diff(lhs.matrix(), rhs.matrix()));
    }
    c.expect(
        worst <= 1e-12,
        format!("homomorphism on 200 triples, max diff {worst:.1e}"),
    );

    let mut worst: f64 = 0.0;
    for (r, d) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let op = random_operator(r, d, rng.random()).expect("small");
        for k in 1..=r {
            for l in (k + 1)..=r {
                let v = swap_operator(r, d, k, l).expect("k < l <= r");
                let odd = Permutation::transposition(2 * r, 2 * k - 1, 2 * l - 1).expect("valid");
                let even = Permutation::transposition(2 * r, 2 * k, 2 * l).expect("valid");
                let left = v.matrix() * op.matrix();
                let right = op.matrix() * v.matrix();
                worst = worst
                    .max(max_abs_diff(
                        apply_permutation(&op, &odd).expect("degree").matrix(),
                        &left,
                    ))
                    .max(max_abs_diff(
                        apply_permutation(&op, &even).expect("degree").matrix(),
                        &right,
                    ));
            }
        }
    }
    c.expect(
        worst <= 1e-12,
        format!("swap identities, max diff {worst:.1e}"),
    );
    c.finish(10, "structural properties", start)
}

pub fn run_all(seed: u64) -> Vec<CheckOutcome> {
    vec![
        coset_counts(),
        group_order(),
        coset_soundness(),
        worked_example(),
        census(),
        norm_preservation(seed),
        separability_bound(seed),
        detection_witnesses(),
        bipartite_anchors(),
        structural_properties(seed),
    ]
}
