//! Dense operators on `(ℂ^d)^⊗r` and the index-permutation maps `Λ_σ`.
//!
//! An operator's entries are addressed by `2r` local indices `i_1 … i_2r`:
//! odd positions form the row multi-index `(i_1, i_3, …)` and even positions
//! the column multi-index `(i_2, i_4, …)`, subsystem 1 most significant.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::norm_group::{enumerate_classes, ClassDescriptor, GroupError};
use crate::perm::Permutation;

/// Largest supported total dimension `d^r`.
pub const MAX_DIMENSION: usize = 4096;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
pub const TRACE_TOLERANCE: f64 = 1e-10;
pub const EIGENVALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("permutation has degree {found}, operator needs {expected}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("matrix is {rows}x{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("dimension {d}^{r} exceeds the limit of {MAX_DIMENSION}")]
    DimensionGuard { r: usize, d: usize },
    #[error("matrix shape {rows}x{cols} does not match d^r = {dim}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("not a valid state: {0}")]
    InvalidState(StateDiagnostics),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("the trivial class has no detector state")]
    TrivialClass,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// `d^r`, if it is within [`MAX_DIMENSION`].
pub fn total_dimension(r: usize, d: usize) -> Result<usize, TensorError> {
    if r == 0 || d == 0 {
        return Err(TensorError::InvalidParams(format!(
            "r = {r}, d = {d} must be positive"
        )));
    }
    let mut dim: usize = 1;
    for _ in 0..r {
        dim = dim
            .checked_mul(d)
            .filter(|&x| x <= MAX_DIMENSION)
            .ok_or(TensorError::DimensionGuard { r, d })?;
    }
    Ok(dim)
}

/// A general operator with subsystem metadata. No state invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    r: usize,
    d: usize,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(r: usize, d: usize, matrix: DMatrix<Complex64>) -> Result<Self, TensorError> {
        let dim = total_dimension(r, d)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(TensorError::ShapeMismatch {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                dim,
            });
        }
        Ok(Operator { r, d, matrix })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.matrix).expect("operators are square")
    }

    /// Checks the state invariants without consuming the operator.
    pub fn diagnose(&self) -> StateDiagnostics {
        StateDiagnostics::of(&self.matrix)
    }
}

/// Measured deviations from the state invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDiagnostics {
    /// Max absolute entry of `ρ − ρ†`.
    pub hermiticity_error: f64,
    pub trace: Complex64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    fn of(m: &DMatrix<Complex64>) -> Self {
        let adjoint = m.adjoint();
        let hermiticity_error = (m - &adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let hermitian_part = (m + &adjoint).scale(0.5);
        let min_eigenvalue = hermitian_part
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        StateDiagnostics {
            hermiticity_error,
            trace: m.trace(),
            min_eigenvalue,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.hermiticity_error > HERMITIAN_TOLERANCE {
            out.push(format!(
                "not Hermitian: max |ρ−ρ†| = {:e} > {HERMITIAN_TOLERANCE:e}",
                self.hermiticity_error
            ));
        }
        if (self.trace - Complex64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            out.push(format!(
                "trace {}{:+}i differs from 1 by more than {TRACE_TOLERANCE:e}",
                self.trace.re, self.trace.im
            ));
        }
        if self.min_eigenvalue < -EIGENVALUE_TOLERANCE {
            out.push(format!(
                "minimum eigenvalue {:e} < -{EIGENVALUE_TOLERANCE:e}",
                self.min_eigenvalue
            ));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.violations().is_empty()
    }
}

impl fmt::Display for StateDiagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.violations();
        if v.is_empty() {
            f.write_str("ok")
        } else {
            f.write_str(&v.join("; "))
        }
    }
}

/// An operator that passed the state checks: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(Operator);

impl DensityMatrix {
    pub fn new(op: Operator) -> Result<Self, TensorError> {
        let diag = op.diagnose();
        if !diag.is_valid() {
            return Err(TensorError::InvalidState(diag));
        }
        Ok(DensityMatrix(op))
    }

    pub fn from_matrix(r: usize, d: usize, m: DMatrix<Complex64>) -> Result<Self, TensorError> {
        DensityMatrix::new(Operator::new(r, d, m)?)
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn r(&self) -> usize {
        self.0.r
    }

    pub fn d(&self) -> usize {
        self.0.d
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0.matrix
    }
}

/// Digits of `index` in base `d`, most significant first.
fn digits(mut index: usize, d: usize, r: usize) -> Vec<usize> {
    let mut out = vec![0; r];
    for slot in out.iter_mut().rev() {
        *slot = index % d;
        index /= d;
    }
    out
}

/// `Λ_σ`: output entry at `(i_1, …, i_2r)` is the input entry at
/// `(i_σ(1), …, i_σ(2r))`.
pub fn apply_permutation(op: &Operator, sigma: &Permutation) -> Result<Operator, TensorError> {
    let (r, d) = (op.r, op.d);
    if sigma.degree() != 2 * r {
        return Err(TensorError::DegreeMismatch {
            expected: 2 * r,
            found: sigma.degree(),
        });
    }
    let dim = op.dim();
    let place = |position: usize| d.pow((r - 1 - position / 2) as u32);
    // Output index p (0-based) feeds source position σ⁻¹(p).
    let inv = sigma.inverse();
    let target: Vec<(bool, usize)> = (0..2 * r)
        .map(|p| {
            let q = inv.images_zero_based()[p];
            (q.is_multiple_of(2), place(q))
        })
        .collect();

    // Contribution of an output row (odd positions) or column (even positions)
    // to the source (row, col).
    let contributions = |parity: usize| -> Vec<(usize, usize)> {
        (0..dim)
            .map(|index| {
                let mut acc = (0, 0);
                for (j, digit) in digits(index, d, r).into_iter().enumerate() {
                    let (to_row, weight) = target[2 * j + parity];
                    if to_row {
                        acc.0 += digit * weight;
                    } else {
                        acc.1 += digit * weight;
                    }
                }
                acc
            })
            .collect()
    };
    let from_rows = contributions(0);
    let from_cols = contributions(1);
    let src = &op.matrix;
    let matrix = DMatrix::from_fn(dim, dim, |row, col| {
        let (a, b) = from_rows[row];
        let (c, e) = from_cols[col];
        src[(a + c, b + e)]
    });
    Ok(Operator { r, d, matrix })
}

/// Sum of singular values.
pub fn trace_norm(m: &DMatrix<Complex64>) -> Result<f64, TensorError> {
    if m.nrows() != m.ncols() {
        return Err(TensorError::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.is_empty() {
        return Ok(0.0);
    }
    Ok(m.clone().svd(false, false).singular_values.sum())
}

/// `V_kl`: swaps the local states of subsystems `k < l`.
pub fn swap_operator(r: usize, d: usize, k: usize, l: usize) -> Result<Operator, TensorError> {
    if !(1 <= k && k < l && l <= r) {
        return Err(TensorError::InvalidParams(format!(
            "swap needs 1 <= k < l <= r, got k = {k}, l = {l}, r = {r}"
        )));
    }
    let dim = total_dimension(r, d)?;
    let mut matrix = DMatrix::zeros(dim, dim);
    for x in 0..dim {
        let mut ds = digits(x, d, r);
        ds.swap(k - 1, l - 1);
        let y = ds.iter().fold(0, |acc, &v| acc * d + v);
        matrix[(y, x)] = Complex64::new(1.0, 0.0);
    }
    Ok(Operator { r, d, matrix })
}

/// Tensor product of blocks, each acting on a listed set of subsystems (in
/// the listed order). Every subsystem must appear in exactly one block.
pub fn product_operator(
    r: usize,
    d: usize,
    blocks: &[(Vec<usize>, DMatrix<Complex64>)],
) -> Result<Operator, TensorError> {
    let dim = total_dimension(r, d)?;
    let mut covered = vec![false; r];
    for (subsystems, m) in blocks {
        let local = d.pow(subsystems.len() as u32);
        if m.nrows() != local || m.ncols() != local {
            return Err(TensorError::InvalidParams(format!(
                "block on {subsystems:?} must be {local}x{local}"
            )));
        }
        for &s in subsystems {
            if s == 0 || s > r || covered[s - 1] {
                return Err(TensorError::InvalidParams(format!(
                    "subsystem {s} missing or repeated"
                )));
            }
            covered[s - 1] = true;
        }
    }
    if covered.iter().any(|c| !c) {
        return Err(TensorError::InvalidParams(
            "not every subsystem is covered".into(),
        ));
    }
    let all_digits: Vec<Vec<usize>> = (0..dim).map(|x| digits(x, d, r)).collect();
    let local_index = |ds: &[usize], subsystems: &[usize]| {
        subsystems.iter().fold(0, |acc, &s| acc * d + ds[s - 1])
    };
    let matrix = DMatrix::from_fn(dim, dim, |row, col| {
        blocks
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, (subs, m)| {
                acc * m[(
                    local_index(&all_digits[row], subs),
                    local_index(&all_digits[col], subs),
                )]
            })
    });
    Ok(Operator { r, d, matrix })
}

/// `Φ⁺ = |φ⟩⟨φ|` with `|φ⟩ = d^{-1/2} Σ_j |jj⟩`.
pub fn maximally_entangled(d: usize) -> DMatrix<Complex64> {
    let dim = d * d;
    let scale = Complex64::new(1.0 / d as f64, 0.0);
    DMatrix::from_fn(dim, dim, |row, col| {
        if row % (d + 1) == 0 && col % (d + 1) == 0 {
            scale
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

fn maximally_mixed_block(d: usize) -> DMatrix<Complex64> {
    DMatrix::identity(d, d).scale(1.0 / d as f64)
}

fn projector(v: &nalgebra::DVector<Complex64>) -> DMatrix<Complex64> {
    v * v.adjoint()
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> nalgebra::DVector<Complex64> {
    let v = nalgebra::DVector::from_fn(dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let norm = v.norm();
    v.unscale(norm)
}

/// Complex Gaussian matrix of shape `d^r × d^r`; not a state.
pub fn random_operator(r: usize, d: usize, seed: u64) -> Result<Operator, TensorError> {
    let dim = total_dimension(r, d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrix = DMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    Ok(Operator { r, d, matrix })
}

/// Test-state recipes. Randomized kinds are deterministic per seed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StateKind {
    /// `|x_1 … x_r⟩⟨x_1 … x_r|` with 0-based local levels; empty means all zero.
    BasisProduct(Vec<usize>),
    /// `Φ⁺` on subsystems `(k, l)`, maximally mixed elsewhere.
    BellPair(usize, usize),
    Ghz,
    MaximallyMixed,
    RandomSeparable {
        terms: usize,
        seed: u64,
    },
    RandomState {
        seed: u64,
    },
}

pub fn make_state(kind: &StateKind, r: usize, d: usize) -> Result<DensityMatrix, TensorError> {
    let dim = total_dimension(r, d)?;
    let matrix = match kind {
        StateKind::BasisProduct(levels) => {
            let levels = if levels.is_empty() {
                vec![0; r]
            } else {
                levels.clone()
            };
            if levels.len() != r || levels.iter().any(|&x| x >= d) {
                return Err(TensorError::InvalidParams(format!(
                    "basis product needs {r} levels below {d}, got {levels:?}"
                )));
            }
            let x = levels.iter().fold(0, |acc, &v| acc * d + v);
            let mut m = DMatrix::zeros(dim, dim);
            m[(x, x)] = Complex64::new(1.0, 0.0);
            m
        }
        StateKind::BellPair(k, l) => {
            let (k, l) = (*k, *l);
            if k == l || k == 0 || l == 0 || k > r || l > r {
                return Err(TensorError::InvalidParams(format!(
                    "Bell pair needs two distinct subsystems in 1..={r}, got ({k}, {l})"
                )));
            }
            let mut blocks = vec![(vec![k, l], maximally_entangled(d))];
            blocks.extend(
                (1..=r)
                    .filter(|&s| s != k && s != l)
                    .map(|s| (vec![s], maximally_mixed_block(d))),
            );
            product_operator(r, d, &blocks)?.into_matrix()
        }
        StateKind::Ghz => {
            let step = (dim - 1) / (d - 1).max(1);
            let scale = Complex64::new(1.0 / d as f64, 0.0);
            DMatrix::from_fn(dim, dim, |row, col| {
                let on = |x: usize| {
                    if d == 1 {
                        x == 0
                    } else {
                        x.is_multiple_of(step)
                    }
                };
                if on(row) && on(col) {
                    scale
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
        }
        StateKind::MaximallyMixed => DMatrix::identity(dim, dim).scale(1.0 / dim as f64),
        StateKind::RandomSeparable { terms, seed } => {
            if *terms == 0 {
                return Err(TensorError::InvalidParams(
                    "at least one product term".into(),
                ));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let weights: Vec<f64> = (0..*terms).map(|_| rng.random::<f64>() + 1e-3).collect();
            let total: f64 = weights.iter().sum();
            let mut m = DMatrix::zeros(dim, dim);
            for w in weights {
                let mut psi = nalgebra::DVector::from_element(1, Complex64::new(1.0, 0.0));
                for _ in 0..r {
                    psi = psi.kronecker(&random_unit_vector(&mut rng, d));
                }
                m += projector(&psi).scale(w / total);
            }
            m
        }
        StateKind::RandomState { seed } => {
            let g = random_operator(r, d, *seed)?.into_matrix();
            let m = &g * g.adjoint();
            let t = m.trace();
            m.map(|z| z / t)
        }
    };
    DensityMatrix::from_matrix(r, d, matrix)
}

/// Entangled state violating the criterion of `class`: `Φ⁺` on every arrow's
/// (tail, head) pair and on every (loop, free partner) pair, maximally mixed
/// elsewhere. Built from whichever flip member has no more loops than free
/// subsystems, so each loop gets a partner.
pub fn detector_state(class: &ClassDescriptor, d: usize) -> Result<DensityMatrix, TensorError> {
    if class.trivial {
        return Err(TensorError::TrivialClass);
    }
    if d < 2 {
        return Err(TensorError::InvalidParams(
            "detector states need d >= 2".into(),
        ));
    }
    let config = if class.loop_count <= class.free_count() {
        class.key.configuration()
    } else {
        class.key.flipped_configuration()
    };
    let r = config.r();
    let mut blocks = Vec::new();
    for a in config.arrows().iter().filter(|a| !a.is_loop()) {
        blocks.push((vec![a.tail, a.head], maximally_entangled(d)));
    }
    let free = config.free();
    let loops = config.loops();
    for (&l, &f) in loops.iter().zip(&free) {
        blocks.push((vec![l, f], maximally_entangled(d)));
    }
    for &f in &free[loops.len()..] {
        blocks.push((vec![f], maximally_mixed_block(d)));
    }
    DensityMatrix::new(product_operator(r, d, &blocks)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Entangled,
    Undetected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "ENTANGLED",
            Verdict::Undetected => "UNDETECTED",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CriterionRecord {
    pub class: ClassDescriptor,
    pub representative: Permutation,
    pub norm: f64,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub r: usize,
    pub d: usize,
    pub records: Vec<CriterionRecord>,
    /// Largest class norm; 0 when there are no nontrivial classes (`r = 1`).
    pub max_norm: f64,
    pub verdict: Verdict,
    pub tolerance: f64,
}

impl CriterionReport {
    /// Records sorted by descending norm, ties in class order.
    pub fn ranked(&self) -> Vec<&CriterionRecord> {
        let mut v: Vec<&CriterionRecord> = self.records.iter().collect();
        v.sort_by(|a, b| b.norm.total_cmp(&a.norm));
        v
    }

    pub fn norm_of(&self, label_key: &str) -> Option<f64> {
        self.records
            .iter()
            .find(|rec| rec.class.key.to_string() == label_key)
            .map(|rec| rec.norm)
    }
}

/// Trace norm of `Λ_rep(ρ)` for the representative of every nontrivial class.
pub fn evaluate_criteria(
    rho: &DensityMatrix,
    tolerance: f64,
) -> Result<CriterionReport, TensorError> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(TensorError::InvalidParams(format!(
            "tolerance {tolerance} must be >= 0"
        )));
    }
    let classes = enumerate_classes(rho.r())?;
    let mut records = Vec::new();
    for class in classes.into_iter().filter(|c| !c.trivial) {
        let representative = class.representative();
        let norm = apply_permutation(rho.operator(), &representative)?.trace_norm();
        records.push(CriterionRecord {
            class,
            representative,
            norm,
        });
    }
    let max_norm = records.iter().map(|rec| rec.norm).fold(0.0, f64::max);
    let verdict = if max_norm > 1.0 + tolerance {
        Verdict::Entangled
    } else {
        Verdict::Undetected
    };
    Ok(CriterionReport {
        r: rho.r(),
        d: rho.d(),
        records,
        max_norm,
        verdict,
        tolerance,
    })
}
