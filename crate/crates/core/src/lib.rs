//! Permutation separability criteria for `r`-partite states with equal local
//! dimension `d`.
//!
//! A permutation `σ` of the `2r` density-matrix indices defines a map `Λ_σ`;
//! for separable states every `‖Λ_σ(ρ)‖₁ ≤ 1`. Permutations that differ by a
//! norm-preserving factor on the right give the same criterion, so criteria
//! are classified by right cosets of the norm-preserving group 𝒯 in `S_2r`.
//!
//! - [`perm`]: permutation arithmetic and parsing.
//! - [`arrow`]: arrow configurations, the rewrite rules and canonical keys.
//! - [`norm_group`]: 𝒯, class enumeration and the census.
//! - [`tensor`]: `Λ_σ`, trace norms, test and detector states.
//! - [`state_io`]: the text state-file format.
//! - [`selftest`]: end-to-end acceptance checks.

pub mod arrow;
pub mod norm_group;
pub mod perm;
pub mod selftest;
pub mod state_io;
pub mod tensor;

pub use arrow::{
    as_permutation, canonical_key, chop, derive_normal_form, equivalent, exchange_heads, flip,
    normal_form, prune, Arrow, ArrowConfiguration, ArrowError, CanonicalKey, Derivation,
};
pub use norm_group::{
    census_by_type, enumerate_classes, group_elements, is_norm_preserving,
    representative_permutation, Census, ClassDescriptor, GroupError,
};
pub use perm::{
    compose, cycle_decomposition, inverse, parse_permutation, CycleDecomposition, PermError,
    Permutation,
};
pub use tensor::{
    apply_permutation, detector_state, evaluate_criteria, make_state, swap_operator, trace_norm,
    CriterionReport, DensityMatrix, Operator, StateKind, TensorError, Verdict,
};
