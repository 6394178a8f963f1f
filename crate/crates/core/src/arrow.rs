//! Arrow configurations and the rewrite system that brings any permutation to
//! a disjoint configuration and a canonical class key.
//!
//! An arrow `k -> l` stands for the transposition `(2k, 2l−1)`; a loop `@k`
//! (tail = head = k) for the partial transpose `(2k−1, 2k)`. Every rewrite is
//! a right multiplication by a norm-preserving permutation, so it never leaves
//! the right coset of the input.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::norm_group::is_norm_preserving;
use crate::perm::{compose, cycle_decomposition, CycleDecomposition, PermError, Permutation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrowError {
    #[error("cycle {0} is not pruned: it has adjacent points of equal parity")]
    NotPruned(String),
    #[error("transposition ({0},{1}) does not join an odd and an even point")]
    NotAnArrow(usize, usize),
    #[error("arrow {0} is not part of the configuration")]
    MissingArrow(Arrow),
    #[error("cannot exchange an arrow with itself")]
    SameArrow,
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("configuration {0} is not disjoint")]
    NotDisjoint(String),
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// `tail -> head`; a loop when both are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub tail: usize,
    pub head: usize,
}

impl Arrow {
    pub fn new(tail: usize, head: usize) -> Self {
        Arrow { tail, head }
    }

    pub fn loop_at(k: usize) -> Self {
        Arrow { tail: k, head: k }
    }

    pub fn is_loop(&self) -> bool {
        self.tail == self.head
    }

    /// The two points of the corresponding transposition, even point first.
    pub fn points(&self) -> (usize, usize) {
        (2 * self.tail, 2 * self.head - 1)
    }

    /// Reads a transposition of one odd and one even point as an arrow.
    pub fn from_transposition(a: usize, b: usize) -> Result<Self, ArrowError> {
        let (odd, even) = match (a % 2, b % 2) {
            (1, 0) => (a, b),
            (0, 1) => (b, a),
            _ => return Err(ArrowError::NotAnArrow(a, b)),
        };
        Ok(Arrow {
            tail: even / 2,
            head: odd.div_ceil(2),
        })
    }
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_loop() {
            write!(f, "@{}", self.tail)
        } else {
            write!(f, "{}->{}", self.tail, self.head)
        }
    }
}

/// A valid set of arrows on subsystems `1..=r`, kept sorted by tail.
///
/// Valid means the underlying transpositions are pairwise disjoint: no two
/// arrows share a head or a tail, and nothing else touches a loop.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArrowConfiguration {
    r: usize,
    arrows: Vec<Arrow>,
}

impl ArrowConfiguration {
    pub fn new(r: usize, mut arrows: Vec<Arrow>) -> Result<Self, ArrowError> {
        if r == 0 {
            return Err(ArrowError::Invalid("no subsystems".into()));
        }
        let mut used = vec![None::<Arrow>; 2 * r];
        for &arrow in &arrows {
            for k in [arrow.tail, arrow.head] {
                if k == 0 || k > r {
                    return Err(ArrowError::Invalid(format!(
                        "arrow {arrow} leaves subsystems 1..={r}"
                    )));
                }
            }
            let (even, odd) = arrow.points();
            for p in [even, odd] {
                if let Some(other) = used[p - 1] {
                    return Err(ArrowError::Invalid(format!(
                        "arrows {other} and {arrow} collide"
                    )));
                }
                used[p - 1] = Some(arrow);
            }
        }
        arrows.sort();
        Ok(ArrowConfiguration { r, arrows })
    }

    pub fn empty(r: usize) -> Self {
        ArrowConfiguration {
            r,
            arrows: Vec::new(),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn contains(&self, arrow: &Arrow) -> bool {
        self.arrows.binary_search(arrow).is_ok()
    }

    /// Head set; loops count as heads.
    pub fn heads(&self) -> Vec<usize> {
        let mut h: Vec<usize> = self.arrows.iter().map(|a| a.head).collect();
        h.sort_unstable();
        h
    }

    /// Tail set; loops count as tails.
    pub fn tails(&self) -> Vec<usize> {
        self.arrows.iter().map(|a| a.tail).collect()
    }

    pub fn loops(&self) -> Vec<usize> {
        self.arrows
            .iter()
            .filter(|a| a.is_loop())
            .map(|a| a.tail)
            .collect()
    }

    /// Subsystems that are neither a head nor a tail.
    pub fn free(&self) -> Vec<usize> {
        let mut touched = vec![false; self.r + 1];
        for a in &self.arrows {
            touched[a.tail] = true;
            touched[a.head] = true;
        }
        (1..=self.r).filter(|&k| !touched[k]).collect()
    }

    /// Supports of all arrows are pairwise disjoint (no chains).
    pub fn is_disjoint(&self) -> bool {
        let mut touched = vec![false; self.r + 1];
        for a in &self.arrows {
            if touched[a.tail] || (!a.is_loop() && touched[a.head]) {
                return false;
            }
            touched[a.tail] = true;
            touched[a.head] = true;
        }
        true
    }

    pub fn as_permutation(&self) -> Permutation {
        as_permutation(self)
    }
}

impl fmt::Display for ArrowConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.arrows.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self.arrows.iter().map(|a| a.to_string()).collect();
        f.write_str(&parts.join(", "))
    }
}

/// Product of the configuration's transpositions; they are disjoint, so the
/// order does not matter.
pub fn as_permutation(config: &ArrowConfiguration) -> Permutation {
    let cycles: Vec<[usize; 2]> = config
        .arrows
        .iter()
        .map(|a| {
            let (even, odd) = a.points();
            [even, odd]
        })
        .collect();
    Permutation::from_cycles(2 * config.r, &cycles).expect("valid configuration")
}

fn same_parity(a: usize, b: usize) -> bool {
    a % 2 == b % 2
}

fn multiplier(before: &Permutation, after: &Permutation) -> Permutation {
    let m = compose(&before.inverse(), after).expect("equal degrees");
    assert!(
        is_norm_preserving(&m),
        "rewrite left the coset: {before} -> {after} via {m}"
    );
    m
}

/// Removes, cycle by cycle, the left point of the leftmost adjacent pair of
/// equal parity (cyclic adjacency included) until no such pair is left.
/// Cycles that shrink to a single point are dropped.
pub fn prune(cycles: &CycleDecomposition) -> CycleDecomposition {
    let pruned = cycles
        .cycles()
        .iter()
        .map(|cycle| {
            let mut c = cycle.clone();
            while c.len() >= 2 {
                let len = c.len();
                match (0..len).find(|&i| same_parity(c[i], c[(i + 1) % len])) {
                    Some(i) => {
                        c.remove(i);
                    }
                    None => break,
                }
            }
            c
        })
        .collect();
    CycleDecomposition::new(cycles.degree(), pruned).expect("subset of valid cycles")
}

/// Splits each alternating cycle `(n1,p1,…,nk,pk)` into `(n1,p1)…(nk,pk)`.
pub fn chop(cycles: &CycleDecomposition) -> Result<Vec<(usize, usize)>, ArrowError> {
    let mut out = Vec::new();
    for cycle in cycles.cycles() {
        let len = cycle.len();
        if (0..len).any(|i| same_parity(cycle[i], cycle[(i + 1) % len])) {
            let text = CycleDecomposition::new(cycles.degree(), vec![cycle.clone()])?;
            return Err(ArrowError::NotPruned(text.to_string()));
        }
        out.extend(cycle.chunks(2).map(|pair| (pair[0], pair[1])));
    }
    Ok(out)
}

/// Replaces `t1->h1`, `t2->h2` by `t1->h2`, `t2->h1`. Either arrow may be a loop.
pub fn exchange_heads(
    config: &ArrowConfiguration,
    a: Arrow,
    b: Arrow,
) -> Result<ArrowConfiguration, ArrowError> {
    for x in [a, b] {
        if !config.contains(&x) {
            return Err(ArrowError::MissingArrow(x));
        }
    }
    if a == b {
        return Err(ArrowError::SameArrow);
    }
    let mut arrows: Vec<Arrow> = config
        .arrows
        .iter()
        .copied()
        .filter(|x| *x != a && *x != b)
        .collect();
    arrows.push(Arrow::new(a.tail, b.head));
    arrows.push(Arrow::new(b.tail, a.head));
    ArrowConfiguration::new(config.r, arrows)
}

/// Reverses every proper arrow, removes loops and puts a loop on every free
/// subsystem.
pub fn flip(config: &ArrowConfiguration) -> Result<ArrowConfiguration, ArrowError> {
    if !config.is_disjoint() {
        return Err(ArrowError::NotDisjoint(config.to_string()));
    }
    let mut arrows: Vec<Arrow> = config
        .arrows
        .iter()
        .filter(|a| !a.is_loop())
        .map(|a| Arrow::new(a.head, a.tail))
        .collect();
    arrows.extend(config.free().into_iter().map(Arrow::loop_at));
    ArrowConfiguration::new(config.r, arrows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteRule {
    Prune,
    Chop,
    ExchangeHeads,
    Flip,
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RewriteRule::Prune => "prune",
            RewriteRule::Chop => "chop",
            RewriteRule::ExchangeHeads => "exchange heads",
            RewriteRule::Flip => "flip",
        })
    }
}

/// One rule application: `after = before · multiplier` with the multiplier in 𝒯.
#[derive(Debug, Clone)]
pub struct RewriteStep {
    pub rule: RewriteRule,
    pub before: Permutation,
    pub after: Permutation,
    pub multiplier: Permutation,
    /// Rule-specific rendering of the result (cycles, transpositions, arrows).
    pub result: String,
}

/// Full record of how a permutation reached its disjoint configuration.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub input: Permutation,
    pub cycles: CycleDecomposition,
    pub steps: Vec<RewriteStep>,
    pub configuration: ArrowConfiguration,
}

fn render_transpositions(ts: &[(usize, usize)]) -> String {
    if ts.is_empty() {
        return "()".into();
    }
    ts.iter().map(|(a, b)| format!("({a},{b})")).collect()
}

/// Disjoint configuration in the right coset of `sigma`, with every step.
pub fn derive_normal_form(sigma: &Permutation) -> Derivation {
    let r = sigma.subsystems();
    let cycles = cycle_decomposition(sigma);
    let mut steps = Vec::new();

    let pruned = prune(&cycles);
    let pruned_perm = pruned.to_permutation();
    steps.push(RewriteStep {
        rule: RewriteRule::Prune,
        before: sigma.clone(),
        multiplier: multiplier(sigma, &pruned_perm),
        after: pruned_perm.clone(),
        result: pruned.to_string(),
    });

    let transpositions = chop(&pruned).expect("pruned cycles alternate parity");
    let chopped: Vec<[usize; 2]> = transpositions.iter().map(|&(a, b)| [a, b]).collect();
    let chopped_perm = Permutation::from_cycles(2 * r, &chopped).expect("disjoint transpositions");
    let arrows: Vec<Arrow> = transpositions
        .iter()
        .map(|&(a, b)| Arrow::from_transposition(a, b).expect("alternating parity"))
        .collect();
    let mut config = ArrowConfiguration::new(r, arrows).expect("disjoint transpositions");
    steps.push(RewriteStep {
        rule: RewriteRule::Chop,
        before: pruned_perm.clone(),
        multiplier: multiplier(&pruned_perm, &chopped_perm),
        after: chopped_perm,
        result: format!("{}  [{}]", render_transpositions(&transpositions), config),
    });

    // Collapse chains: the lowest-tail proper arrow whose head is another
    // arrow's tail swaps heads with that successor, leaving a loop behind.
    loop {
        let proper: Vec<Arrow> = config
            .arrows
            .iter()
            .copied()
            .filter(|a| !a.is_loop())
            .collect();
        let pair = proper
            .iter()
            .find_map(|&a| proper.iter().find(|b| b.tail == a.head).map(|&b| (a, b)));
        let Some((a, b)) = pair else { break };
        let next = exchange_heads(&config, a, b).expect("arrows taken from the configuration");
        push_exchange(&mut steps, &config, &next, format!("{a} with {b}"));
        config = next;
    }

    // Display matching: sorted proper tails paired with sorted proper heads.
    let mut tails: Vec<usize> = config
        .arrows
        .iter()
        .filter(|a| !a.is_loop())
        .map(|a| a.tail)
        .collect();
    let mut heads: Vec<usize> = config
        .arrows
        .iter()
        .filter(|a| !a.is_loop())
        .map(|a| a.head)
        .collect();
    tails.sort_unstable();
    heads.sort_unstable();
    let mut arrows: Vec<Arrow> = tails
        .into_iter()
        .zip(heads)
        .map(|(t, h)| Arrow::new(t, h))
        .collect();
    arrows.extend(config.loops().into_iter().map(Arrow::loop_at));
    let paired = ArrowConfiguration::new(r, arrows).expect("same support");
    if paired != config {
        push_exchange(&mut steps, &config, &paired, "sorted pairing".into());
        config = paired;
    }

    debug_assert!(config.is_disjoint());
    Derivation {
        input: sigma.clone(),
        cycles,
        steps,
        configuration: config,
    }
}

fn push_exchange(
    steps: &mut Vec<RewriteStep>,
    before: &ArrowConfiguration,
    after: &ArrowConfiguration,
    what: String,
) {
    let (b, a) = (before.as_permutation(), after.as_permutation());
    steps.push(RewriteStep {
        rule: RewriteRule::ExchangeHeads,
        multiplier: multiplier(&b, &a),
        before: b,
        after: a,
        result: format!("{after}  ({what})"),
    });
}

/// Disjoint arrow configuration equivalent to `sigma`.
pub fn normal_form(sigma: &Permutation) -> ArrowConfiguration {
    derive_normal_form(sigma).configuration
}

/// Class key: head and tail sets of a disjoint configuration, reduced modulo
/// flipping.
///
/// Flipping maps `(H, T)` to `(H̄, T̄) = (complement of H, complement of T)`.
/// Of the two, the key keeps the one whose sorted tails (then sorted heads)
/// compare lexicographically smaller.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalKey {
    r: usize,
    heads: Vec<usize>,
    tails: Vec<usize>,
}

fn complement(r: usize, set: &[usize]) -> Vec<usize> {
    (1..=r).filter(|k| !set.contains(k)).collect()
}

impl CanonicalKey {
    /// Validates `(heads, tails)` and returns the flip-reduced key of its class.
    pub fn new(r: usize, heads: &[usize], tails: &[usize]) -> Result<Self, ArrowError> {
        if r == 0 {
            return Err(ArrowError::InvalidKey("no subsystems".into()));
        }
        let normalize = |set: &[usize], what: &str| -> Result<Vec<usize>, ArrowError> {
            let mut v = set.to_vec();
            v.sort_unstable();
            v.dedup();
            if v.len() != set.len() {
                return Err(ArrowError::InvalidKey(format!("repeated {what}")));
            }
            if v.iter().any(|&k| k == 0 || k > r) {
                return Err(ArrowError::InvalidKey(format!("{what} outside 1..={r}")));
            }
            Ok(v)
        };
        let heads = normalize(heads, "head")?;
        let tails = normalize(tails, "tail")?;
        if heads.len() != tails.len() {
            return Err(ArrowError::InvalidKey(format!(
                "{} heads but {} tails",
                heads.len(),
                tails.len()
            )));
        }
        let flipped_heads = complement(r, &heads);
        let flipped_tails = complement(r, &tails);
        let keep = (&tails, &heads) <= (&flipped_tails, &flipped_heads);
        Ok(if keep {
            CanonicalKey { r, heads, tails }
        } else {
            CanonicalKey {
                r,
                heads: flipped_heads,
                tails: flipped_tails,
            }
        })
    }

    pub fn from_configuration(config: &ArrowConfiguration) -> Result<Self, ArrowError> {
        if !config.is_disjoint() {
            return Err(ArrowError::NotDisjoint(config.to_string()));
        }
        CanonicalKey::new(config.r, &config.heads(), &config.tails())
    }

    pub fn trivial(r: usize) -> Self {
        CanonicalKey {
            r,
            heads: Vec::new(),
            tails: Vec::new(),
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn heads(&self) -> &[usize] {
        &self.heads
    }

    pub fn tails(&self) -> &[usize] {
        &self.tails
    }

    /// Head/tail sets of the flipped partner.
    pub fn flip_partner(&self) -> (Vec<usize>, Vec<usize>) {
        (
            complement(self.r, &self.heads),
            complement(self.r, &self.tails),
        )
    }

    pub fn loops(&self) -> Vec<usize> {
        self.heads
            .iter()
            .copied()
            .filter(|h| self.tails.contains(h))
            .collect()
    }

    pub fn loop_count(&self) -> usize {
        self.loops().len()
    }

    pub fn arrow_count(&self) -> usize {
        self.heads.len() - self.loop_count()
    }

    pub fn free_count(&self) -> usize {
        self.r - 2 * self.arrow_count() - self.loop_count()
    }

    pub fn is_trivial(&self) -> bool {
        self.heads.is_empty()
    }

    /// Loops on `H ∩ T`, proper arrows pairing sorted remaining tails with
    /// sorted remaining heads.
    pub fn configuration(&self) -> ArrowConfiguration {
        configuration_from_sets(self.r, &self.heads, &self.tails)
    }

    /// The same class drawn from the flipped partner's sets.
    pub fn flipped_configuration(&self) -> ArrowConfiguration {
        let (h, t) = self.flip_partner();
        configuration_from_sets(self.r, &h, &t)
    }
}

pub(crate) fn configuration_from_sets(
    r: usize,
    heads: &[usize],
    tails: &[usize],
) -> ArrowConfiguration {
    let loops: Vec<usize> = heads
        .iter()
        .copied()
        .filter(|h| tails.contains(h))
        .collect();
    let proper_heads = heads.iter().copied().filter(|h| !loops.contains(h));
    let proper_tails = tails.iter().copied().filter(|t| !loops.contains(t));
    let mut arrows: Vec<Arrow> = proper_tails
        .zip(proper_heads)
        .map(|(t, h)| Arrow::new(t, h))
        .collect();
    arrows.extend(loops.into_iter().map(Arrow::loop_at));
    ArrowConfiguration::new(r, arrows).expect("sets of equal size on distinct subsystems")
}

impl PartialOrd for CanonicalKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CanonicalKey {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.r, &self.tails, &self.heads).cmp(&(other.r, &other.tails, &other.heads))
    }
}

fn render_set(set: &[usize]) -> String {
    let body: Vec<String> = set.iter().map(|k| k.to_string()).collect();
    format!("{{{}}}", body.join(","))
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "H={} T={}",
            render_set(&self.heads),
            render_set(&self.tails)
        )
    }
}

pub fn canonical_key(sigma: &Permutation) -> CanonicalKey {
    CanonicalKey::from_configuration(&normal_form(sigma)).expect("normal form is disjoint")
}

/// Same right coset of 𝒯. The key comparison is checked against the parity
/// membership test on `τ⁻¹σ`; disagreement is a bug and panics.
pub fn equivalent(sigma: &Permutation, tau: &Permutation) -> Result<bool, ArrowError> {
    let quotient = compose(&tau.inverse(), sigma)?;
    let by_key = canonical_key(sigma) == canonical_key(tau);
    let by_parity = is_norm_preserving(&quotient);
    assert_eq!(
        by_key, by_parity,
        "canonical keys and parity test disagree for {sigma} and {tau}"
    );
    Ok(by_key)
}

/// `aR+lQT` with coefficient 1 omitted; `id` for the empty structure.
pub fn structure_label(arrows: usize, loops: usize) -> String {
    let mut parts = Vec::new();
    match arrows {
        0 => {}
        1 => parts.push("R".to_string()),
        a => parts.push(format!("{a}R")),
    }
    match loops {
        0 => {}
        1 => parts.push("QT".to_string()),
        l => parts.push(format!("{l}QT")),
    }
    if parts.is_empty() {
        "id".into()
    } else {
        parts.join("+")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::parse_permutation;

    fn p(text: &str, degree: usize) -> Permutation {
        parse_permutation(text, degree).unwrap()
    }

    fn cfg(r: usize, arrows: &[(usize, usize)]) -> ArrowConfiguration {
        ArrowConfiguration::new(r, arrows.iter().map(|&(t, h)| Arrow::new(t, h)).collect()).unwrap()
    }

    fn cd(degree: usize, cycles: &[&[usize]]) -> CycleDecomposition {
        CycleDecomposition::new(degree, cycles.iter().map(|c| c.to_vec()).collect()).unwrap()
    }

    #[test]
    fn prune_worked_example() {
        let pruned = prune(&cd(12, &[&[3, 12, 1, 2, 10, 8], &[4, 5, 6]]));
        assert_eq!(
            pruned.normalized(),
            cd(12, &[&[3, 12, 1, 8], &[5, 4]]).normalized()
        );
        assert_eq!(pruned.cycles(), &[vec![3, 12, 1, 8], vec![4, 5]]);
    }

    #[test]
    fn prune_small_cases() {
        assert!(prune(&cd(4, &[&[1, 3]])).is_empty());
        assert_eq!(prune(&cd(4, &[&[1, 2]])).cycles(), &[vec![1, 2]]);
    }

    #[test]
    fn chop_cases() {
        assert_eq!(
            chop(&cd(12, &[&[3, 12, 1, 8], &[5, 4]])).unwrap(),
            vec![(3, 12), (1, 8), (5, 4)]
        );
        assert_eq!(chop(&cd(4, &[&[1, 2]])).unwrap(), vec![(1, 2)]);
        assert_eq!(
            chop(&cd(4, &[&[2, 3, 4, 1]])).unwrap(),
            vec![(2, 3), (4, 1)]
        );
        assert!(matches!(
            chop(&cd(4, &[&[1, 3, 2]])),
            Err(ArrowError::NotPruned(_))
        ));
    }

    #[test]
    fn chop_multiplier_is_norm_preserving() {
        let before = cd(4, &[&[2, 3, 4, 1]]).to_permutation();
        let after = p("(2,3)(4,1)", 4);
        assert!(is_norm_preserving(
            &compose(&before.inverse(), &after).unwrap()
        ));
    }

    #[test]
    fn validity_rules() {
        assert!(ArrowConfiguration::new(3, vec![Arrow::new(1, 2), Arrow::new(2, 3)]).is_ok());
        assert!(ArrowConfiguration::new(3, vec![Arrow::new(2, 1), Arrow::new(2, 3)]).is_err());
        assert!(ArrowConfiguration::new(3, vec![Arrow::new(1, 2), Arrow::new(3, 2)]).is_err());
        assert!(ArrowConfiguration::new(3, vec![Arrow::loop_at(1), Arrow::new(2, 1)]).is_err());
        assert!(ArrowConfiguration::new(3, vec![Arrow::loop_at(1), Arrow::new(1, 2)]).is_err());
        assert!(ArrowConfiguration::new(3, vec![Arrow::new(1, 4)]).is_err());
        assert!(cfg(3, &[(1, 1), (2, 3)]).is_disjoint());
        assert!(!cfg(3, &[(1, 2), (2, 3)]).is_disjoint());
    }

    #[test]
    fn exchange_heads_examples() {
        let chain = cfg(3, &[(1, 2), (2, 3)]);
        let out = exchange_heads(&chain, Arrow::new(1, 2), Arrow::new(2, 3)).unwrap();
        assert_eq!(out, cfg(3, &[(1, 3), (2, 2)]));

        let closed = cfg(2, &[(1, 2), (2, 1)]);
        let out = exchange_heads(&closed, Arrow::new(1, 2), Arrow::new(2, 1)).unwrap();
        assert_eq!(out, cfg(2, &[(1, 1), (2, 2)]));

        // A loop exchanges like any other arrow: @1 = 1->1 and 2->3 give 1->3, 2->1.
        let with_loop = cfg(3, &[(1, 1), (2, 3)]);
        let out = exchange_heads(&with_loop, Arrow::loop_at(1), Arrow::new(2, 3)).unwrap();
        assert_eq!(out, cfg(3, &[(1, 3), (2, 1)]));
        let m = compose(&with_loop.as_permutation().inverse(), &out.as_permutation()).unwrap();
        assert_eq!(m, p("(1,5)(2,4)", 6));

        assert!(matches!(
            exchange_heads(&with_loop, Arrow::new(3, 1), Arrow::new(2, 3)),
            Err(ArrowError::MissingArrow(_))
        ));
    }

    #[test]
    fn exchange_heads_multiplier_matches_rule() {
        // (2h1−1, 2h2−1)(2t1, 2t2) for 1->2, 2->3: (3,5)(2,4)
        let before = cfg(3, &[(1, 2), (2, 3)]).as_permutation();
        let after = cfg(3, &[(1, 3), (2, 2)]).as_permutation();
        assert_eq!(
            compose(&before.inverse(), &after).unwrap(),
            p("(3,5)(2,4)", 6)
        );
    }

    #[test]
    fn flip_examples() {
        assert_eq!(
            flip(&ArrowConfiguration::empty(2)).unwrap(),
            cfg(2, &[(1, 1), (2, 2)])
        );
        assert_eq!(flip(&cfg(3, &[(1, 2)])).unwrap(), cfg(3, &[(2, 1), (3, 3)]));
        assert!(matches!(
            flip(&cfg(3, &[(1, 2), (2, 3)])),
            Err(ArrowError::NotDisjoint(_))
        ));
    }

    #[test]
    fn flip_multiplier_is_gqt_times_norm_preserving() {
        let c = cfg(3, &[(1, 2)]);
        let f = flip(&c).unwrap();
        let m = compose(&c.as_permutation().inverse(), &f.as_permutation()).unwrap();
        assert!(is_norm_preserving(&m));
    }

    #[test]
    fn as_permutation_examples() {
        assert_eq!(cfg(6, &[(2, 2)]).as_permutation(), p("(3,4)", 12));
        assert_eq!(cfg(2, &[(1, 2)]).as_permutation(), p("(2,3)", 4));
        assert!(ArrowConfiguration::empty(3).as_permutation().is_identity());
    }

    #[test]
    fn normal_form_worked_example() {
        let nf = normal_form(&p("(3,12,1,2,10,8)(4,5,6)", 12));
        assert!(nf.is_disjoint());
        assert_eq!(nf, cfg(6, &[(2, 2), (4, 1), (6, 3)]));
        assert_eq!(nf.to_string(), "@2, 4->1, 6->3");
        assert_eq!(nf.as_permutation(), p("(3,4)(1,8)(5,12)", 12));
    }

    #[test]
    fn normal_form_identity_and_gqt() {
        assert!(normal_form(&Permutation::identity(8).unwrap()).is_empty());
        assert_eq!(ArrowConfiguration::empty(2).to_string(), "()");
        for r in 1..=5 {
            let nf = normal_form(&Permutation::global_transpose(r).unwrap());
            let loops: Vec<(usize, usize)> = (1..=r).map(|k| (k, k)).collect();
            assert_eq!(nf, cfg(r, &loops));
        }
    }

    #[test]
    fn derivation_records_sound_steps() {
        let d = derive_normal_form(&p("(3,12,1,2,10,8)(4,5,6)", 12));
        assert_eq!(d.steps[0].rule, RewriteRule::Prune);
        assert_eq!(d.steps[0].result, "(1,8,3,12)(4,5)");
        assert_eq!(d.steps[1].rule, RewriteRule::Chop);
        assert!(d.steps[1].result.starts_with("(1,8)(3,12)(4,5)"));
        assert_eq!(d.steps[2].rule, RewriteRule::ExchangeHeads);
        for s in &d.steps {
            assert_eq!(compose(&s.before, &s.multiplier).unwrap(), s.after);
        }
        assert_eq!(
            d.steps.last().unwrap().after,
            d.configuration.as_permutation()
        );
    }

    #[test]
    fn canonical_key_examples() {
        let id = canonical_key(&Permutation::identity(4).unwrap());
        assert!(id.heads().is_empty() && id.tails().is_empty());
        assert!(id.is_trivial());

        let qt = canonical_key(&p("(1,2)", 4));
        assert_eq!((qt.heads(), qt.tails()), (&[1][..], &[1][..]));
        assert_eq!(qt.flip_partner(), (vec![2], vec![2]));

        let a = canonical_key(&p("(2,3)", 4));
        let b = canonical_key(&p("(1,4)", 4));
        assert_eq!(a, b);
        assert_eq!((a.heads(), a.tails()), (&[2][..], &[1][..]));
        assert_eq!(a.to_string(), "H={2} T={1}");
    }

    #[test]
    fn worked_example_key() {
        let a = canonical_key(&p("(3,12,1,2,10,8)(4,5,6)", 12));
        let b = canonical_key(&p("(3,4)(1,8)(5,12)", 12));
        assert_eq!(a, b);
    }

    #[test]
    fn key_reduction_and_validation() {
        let k = CanonicalKey::new(2, &[1], &[2]).unwrap();
        assert_eq!((k.heads(), k.tails()), (&[2][..], &[1][..]));
        assert!(CanonicalKey::new(2, &[1, 2], &[1]).is_err());
        assert!(CanonicalKey::new(2, &[3], &[1]).is_err());
        assert!(CanonicalKey::new(2, &[1, 1], &[1, 2]).is_err());
        let full = CanonicalKey::new(3, &[1, 2, 3], &[1, 2, 3]).unwrap();
        assert!(full.is_trivial());
    }

    #[test]
    fn equivalence_examples() {
        assert!(equivalent(&p("(2,3)", 4), &p("(1,4)", 4)).unwrap());
        assert!(!equivalent(&p("(1,2)", 4), &p("(2,3)", 4)).unwrap());
        assert!(equivalent(&p("(1,2)", 4), &p("(1,2)", 6)).is_err());
    }

    #[test]
    fn r_equals_one() {
        let id = Permutation::identity(2).unwrap();
        let swap = p("(1,2)", 2);
        assert!(equivalent(&id, &swap).unwrap());
        assert!(canonical_key(&swap).is_trivial());
    }

    #[test]
    fn labels() {
        assert_eq!(structure_label(0, 0), "id");
        assert_eq!(structure_label(0, 1), "QT");
        assert_eq!(structure_label(1, 2), "R+2QT");
        assert_eq!(structure_label(2, 0), "2R");
    }
}
