//! The group 𝒯 of norm-preserving permutations and the census of its right
//! cosets in `S_2r`.
//!
//! 𝒯 is generated by the odd–odd transpositions `(2k−1, 2l−1)`, the even–even
//! transpositions `(2k, 2l)` and the global transpose. As a set it is exactly
//! the permutations that keep every point's parity or flip every point's
//! parity, `2·r!·r!` elements in all.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::arrow::{canonical_key, structure_label, CanonicalKey};
use crate::perm::{compose, Permutation};

/// Largest `r` for which the group itself is materialized.
pub const MAX_GROUP_R: usize = 5;
/// Largest `r` for which `S_2r` is enumerated element by element.
pub const MAX_FILTER_R: usize = 4;
/// Largest `r` for which classes are enumerated.
pub const MAX_CLASS_R: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("r = {r} is out of range 1..={max}")]
    OutOfRange { r: usize, max: usize },
}

fn check_r(r: usize, max: usize) -> Result<(), GroupError> {
    if r == 0 || r > max {
        return Err(GroupError::OutOfRange { r, max });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParityKind {
    Preserving,
    Swapping,
}

pub fn parity_kind(sigma: &Permutation) -> Option<ParityKind> {
    let images = sigma.images_zero_based();
    if images.iter().enumerate().all(|(i, &p)| i % 2 == p % 2) {
        Some(ParityKind::Preserving)
    } else if images.iter().enumerate().all(|(i, &p)| i % 2 != p % 2) {
        Some(ParityKind::Swapping)
    } else {
        None
    }
}

/// Membership in 𝒯 by the parity characterization, O(r).
pub fn is_norm_preserving(sigma: &Permutation) -> bool {
    parity_kind(sigma).is_some()
}

/// An element of 𝒯 together with how it acts on parity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NormGroupElement {
    perm: Permutation,
    kind: ParityKind,
}

impl NormGroupElement {
    pub fn new(perm: Permutation) -> Option<Self> {
        parity_kind(&perm).map(|kind| NormGroupElement { perm, kind })
    }

    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    pub fn kind(&self) -> ParityKind {
        self.kind
    }
}

/// `(2k−1, 2l−1)`, `(2k, 2l)` for `k < l`, and the global transpose.
pub fn generators(r: usize) -> Vec<Permutation> {
    let degree = 2 * r;
    let mut gens = Vec::new();
    for k in 1..=r {
        for l in (k + 1)..=r {
            gens.push(Permutation::transposition(degree, 2 * k - 1, 2 * l - 1).expect("in range"));
            gens.push(Permutation::transposition(degree, 2 * k, 2 * l).expect("in range"));
        }
    }
    gens.push(Permutation::global_transpose(r).expect("r >= 1"));
    gens
}

/// 𝒯 as the closure of [`generators`] under composition.
pub fn group_elements(r: usize) -> Result<BTreeSet<Permutation>, GroupError> {
    check_r(r, MAX_GROUP_R)?;
    let gens = generators(r);
    let identity = Permutation::identity(2 * r).expect("r >= 1");
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    queue.push_back(identity);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let next = compose(&g, s).expect("same degree");
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    Ok(seen)
}

/// 𝒯 as the parity-filtered subset of all of `S_2r`.
pub fn group_elements_by_filter(r: usize) -> Result<BTreeSet<Permutation>, GroupError> {
    check_r(r, MAX_FILTER_R)?;
    Ok(all_permutations(2 * r).filter(is_norm_preserving).collect())
}

/// Every permutation of `{1, …, degree}` in lexicographic one-line order.
pub fn all_permutations(degree: usize) -> impl Iterator<Item = Permutation> {
    (1..=degree)
        .permutations(degree)
        .map(|images| Permutation::from_images(&images).expect("a permutation"))
}

/// Uniformly random element of 𝒯: independent shuffles of the odd and even
/// points, followed by the global transpose with probability ½.
pub fn random_element<R: Rng + ?Sized>(r: usize, rng: &mut R) -> Permutation {
    let mut odd: Vec<usize> = (0..r).map(|k| 2 * k + 1).collect();
    let mut even: Vec<usize> = (0..r).map(|k| 2 * k + 2).collect();
    odd.shuffle(rng);
    even.shuffle(rng);
    let images: Vec<usize> = (0..r).flat_map(|k| [odd[k], even[k]]).collect();
    let base = Permutation::from_images(&images).expect("a permutation");
    if rng.random::<bool>() {
        compose(&base, &Permutation::global_transpose(r).expect("r >= 1")).expect("same degree")
    } else {
        base
    }
}

pub fn group_order(r: usize) -> u128 {
    2 * factorial(r) * factorial(r)
}

pub fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k as u128).fold(1, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// Number of right cosets of 𝒯 in `S_2r`: `C(2r, r) / 2`.
pub fn class_count(r: usize) -> u128 {
    binomial(2 * r, r) / 2
}

/// One combinatorially independent class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDescriptor {
    pub key: CanonicalKey,
    pub arrow_count: usize,
    pub loop_count: usize,
    /// Structure of the flip-reduced key itself, e.g. `R+QT`.
    pub type_label: String,
    /// Census family: the flip-paired structure types this class belongs to.
    pub family_label: String,
    pub trivial: bool,
}

impl ClassDescriptor {
    pub fn from_key(key: CanonicalKey) -> Self {
        let a = key.arrow_count();
        let l = key.loop_count();
        let f = key.free_count();
        ClassDescriptor {
            trivial: key.is_trivial(),
            arrow_count: a,
            loop_count: l,
            type_label: structure_label(a, l),
            family_label: family_label(a, l.min(f), l.max(f)),
            key,
        }
    }

    pub fn free_count(&self) -> usize {
        self.key.free_count()
    }

    pub fn representative(&self) -> Permutation {
        representative_permutation(&self.key)
    }
}

/// Census label for the flip pair of types `(a, fewer loops)` / `(a, more loops)`.
pub fn family_label(arrows: usize, fewer: usize, more: usize) -> String {
    if arrows == 0 || fewer == more {
        structure_label(arrows, fewer)
    } else {
        format!(
            "{}|{}",
            structure_label(arrows, fewer),
            structure_label(arrows, more)
        )
    }
}

/// All classes for `r` subsystems, trivial class included, sorted by
/// `(arrows + loops, key)`.
pub fn enumerate_classes(r: usize) -> Result<Vec<ClassDescriptor>, GroupError> {
    check_r(r, MAX_CLASS_R)?;
    let mut keys = BTreeSet::new();
    for heads in 0u32..(1 << r) {
        for tails in 0u32..(1 << r) {
            if heads.count_ones() != tails.count_ones() {
                continue;
            }
            let h = mask_to_set(heads, r);
            let t = mask_to_set(tails, r);
            keys.insert(CanonicalKey::new(r, &h, &t).expect("equal-size subsets"));
        }
    }
    let mut classes: Vec<ClassDescriptor> =
        keys.into_iter().map(ClassDescriptor::from_key).collect();
    classes.sort_by(|x, y| {
        (x.arrow_count + x.loop_count, &x.key).cmp(&(y.arrow_count + y.loop_count, &y.key))
    });
    Ok(classes)
}

/// Nontrivial classes only.
pub fn nontrivial_classes(r: usize) -> Result<Vec<ClassDescriptor>, GroupError> {
    Ok(enumerate_classes(r)?
        .into_iter()
        .filter(|c| !c.trivial)
        .collect())
}

fn mask_to_set(mask: u32, r: usize) -> Vec<usize> {
    (0..r)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| i + 1)
        .collect()
}

/// Permutation of the key's own configuration (loops on `H ∩ T`, sorted
/// tails paired with sorted heads).
pub fn representative_permutation(key: &CanonicalKey) -> Permutation {
    let rep = key.configuration().as_permutation();
    debug_assert_eq!(&canonical_key(&rep), key);
    rep
}

/// One census row: a flip-paired structural family and its class count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusEntry {
    pub arrows: usize,
    /// Loops of the member with fewer loops.
    pub loops: usize,
    pub label: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    pub r: usize,
    pub entries: Vec<CensusEntry>,
}

impl Census {
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.count).sum()
    }

    pub fn count(&self, label: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.count)
    }

    pub fn as_map(&self) -> BTreeMap<String, usize> {
        self.entries
            .iter()
            .map(|e| (e.label.clone(), e.count))
            .collect()
    }

    /// Machine-readable lines `r,a,l,label,count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                self.r, e.arrows, e.loops, e.label, e.count
            ));
        }
        out
    }
}

impl fmt::Display for Census {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .entries
            .iter()
            .map(|e| e.label.len())
            .max()
            .unwrap_or(0)
            .max(6);
        writeln!(
            f,
            "{:<width$}  {:>7}  {:>6}  {:>5}",
            "family", "arrows", "loops", "count"
        )?;
        for e in &self.entries {
            writeln!(
                f,
                "{:<width$}  {:>7}  {:>6}  {:>5}",
                e.label, e.arrows, e.loops, e.count
            )?;
        }
        write!(
            f,
            "{:<width$}  {:>7}  {:>6}  {:>5}",
            "total",
            "",
            "",
            self.total()
        )
    }
}

/// Nontrivial class counts grouped by flip-paired structure type.
pub fn census_by_type(r: usize) -> Result<Census, GroupError> {
    let mut groups: BTreeMap<(usize, usize), CensusEntry> = BTreeMap::new();
    for class in nontrivial_classes(r)? {
        let fewer = class.loop_count.min(class.free_count());
        groups
            .entry((class.arrow_count, fewer))
            .or_insert_with(|| CensusEntry {
                arrows: class.arrow_count,
                loops: fewer,
                label: class.family_label.clone(),
                count: 0,
            })
            .count += 1;
    }
    Ok(Census {
        r,
        entries: groups.into_values().collect(),
    })
}
