//! Permutations of `{1, …, 2r}`.
//!
//! Points are 1-based at every public boundary. Products are evaluated left to
//! right: in `compose(first, second)` the first permutation acts first.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree {0} is not a positive even number")]
    BadDegree(usize),
    #[error("column {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("column {position}: point {point} is out of range 1..={degree}")]
    OutOfRange {
        position: usize,
        point: usize,
        degree: usize,
    },
    #[error("column {position}: point {point} appears more than once")]
    Duplicate { position: usize, point: usize },
    #[error("one-line notation has {found} entries, expected {expected}")]
    WrongLength { found: usize, expected: usize },
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("images do not form a bijection of 1..={0}")]
    NotBijective(usize),
}

/// A bijection of `{1, …, 2r}` stored as its 0-based image table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

fn check_degree(degree: usize) -> Result<(), PermError> {
    if degree == 0 || !degree.is_multiple_of(2) {
        return Err(PermError::BadDegree(degree));
    }
    Ok(())
}

impl Permutation {
    pub fn identity(degree: usize) -> Result<Self, PermError> {
        check_degree(degree)?;
        Ok(Permutation {
            images: (0..degree).collect(),
        })
    }

    /// Builds a permutation from 1-based images: `images[k - 1]` is the image of `k`.
    pub fn from_images(images: &[usize]) -> Result<Self, PermError> {
        let degree = images.len();
        check_degree(degree)?;
        let mut seen = vec![false; degree];
        let mut zero_based = Vec::with_capacity(degree);
        for &p in images {
            if p == 0 || p > degree || seen[p - 1] {
                return Err(PermError::NotBijective(degree));
            }
            seen[p - 1] = true;
            zero_based.push(p - 1);
        }
        Ok(Permutation { images: zero_based })
    }

    /// Builds a permutation from disjoint cycles of 1-based points.
    pub fn from_cycles<C: AsRef<[usize]>>(degree: usize, cycles: &[C]) -> Result<Self, PermError> {
        let mut perm = Permutation::identity(degree)?;
        let mut seen = vec![false; degree];
        for cycle in cycles {
            let cycle = cycle.as_ref();
            for &p in cycle {
                if p == 0 || p > degree {
                    return Err(PermError::OutOfRange {
                        position: 0,
                        point: p,
                        degree,
                    });
                }
                if seen[p - 1] {
                    return Err(PermError::Duplicate {
                        position: 0,
                        point: p,
                    });
                }
                seen[p - 1] = true;
            }
            for (i, &p) in cycle.iter().enumerate() {
                let next = cycle[(i + 1) % cycle.len()];
                perm.images[p - 1] = next - 1;
            }
        }
        Ok(perm)
    }

    /// The transposition `(a, b)` on 1-based points.
    pub fn transposition(degree: usize, a: usize, b: usize) -> Result<Self, PermError> {
        Permutation::from_cycles(degree, &[[a, b]])
    }

    /// Uniformly random permutation of the given degree.
    pub fn random<R: Rng + ?Sized>(degree: usize, rng: &mut R) -> Result<Self, PermError> {
        check_degree(degree)?;
        let mut images: Vec<usize> = (0..degree).collect();
        images.shuffle(rng);
        Ok(Permutation { images })
    }

    /// Global transposition `(1,2)(3,4)⋯(2r−1,2r)`.
    pub fn global_transpose(r: usize) -> Result<Self, PermError> {
        let cycles: Vec<[usize; 2]> = (1..=r).map(|k| [2 * k - 1, 2 * k]).collect();
        Permutation::from_cycles(2 * r, &cycles)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Number of subsystems `r = degree / 2`.
    pub fn subsystems(&self) -> usize {
        self.images.len() / 2
    }

    /// Image of the 1-based point `point`.
    pub fn image(&self, point: usize) -> usize {
        self.images[point - 1] + 1
    }

    /// 1-based image table.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&p| p + 1).collect()
    }

    pub(crate) fn images_zero_based(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `x ↦ second(self(x))`.
    pub fn then(&self, second: &Permutation) -> Result<Permutation, PermError> {
        compose(self, second)
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p] = i;
        }
        Permutation { images }
    }

    pub fn cycles(&self) -> CycleDecomposition {
        cycle_decomposition(self)
    }

    /// One-line notation `[p1 p2 … p2r]`.
    pub fn one_line(&self) -> String {
        let body: Vec<String> = self.images.iter().map(|p| (p + 1).to_string()).collect();
        format!("[{}]", body.join(" "))
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.cycles(), f)
    }
}

/// Left-to-right product: the result maps `x` to `second(first(x))`.
pub fn compose(first: &Permutation, second: &Permutation) -> Result<Permutation, PermError> {
    if first.degree() != second.degree() {
        return Err(PermError::DegreeMismatch(first.degree(), second.degree()));
    }
    let images = first.images.iter().map(|&p| second.images[p]).collect();
    Ok(Permutation { images })
}

pub fn inverse(sigma: &Permutation) -> Permutation {
    sigma.inverse()
}

/// Disjoint cycles over 1-based points, fixed points omitted.
///
/// Cycles keep the rotation they were built with; [`cycle_decomposition`]
/// produces the canonical minimum-first, sorted form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleDecomposition {
    degree: usize,
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    /// Validates disjointness and range. Cycles of length 1 are dropped.
    pub fn new(degree: usize, cycles: Vec<Vec<usize>>) -> Result<Self, PermError> {
        check_degree(degree)?;
        let mut seen = vec![false; degree];
        for &p in cycles.iter().flatten() {
            if p == 0 || p > degree {
                return Err(PermError::OutOfRange {
                    position: 0,
                    point: p,
                    degree,
                });
            }
            if seen[p - 1] {
                return Err(PermError::Duplicate {
                    position: 0,
                    point: p,
                });
            }
            seen[p - 1] = true;
        }
        let cycles = cycles.into_iter().filter(|c| c.len() >= 2).collect();
        Ok(CycleDecomposition { degree, cycles })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_cycles(self.degree, &self.cycles).expect("validated on construction")
    }

    /// Same cycles, each rotated to start at its minimum and sorted by it.
    pub fn normalized(&self) -> CycleDecomposition {
        let mut cycles: Vec<Vec<usize>> = self
            .cycles
            .iter()
            .map(|c| {
                let start = c
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, &p)| p)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                c[start..].iter().chain(&c[..start]).copied().collect()
            })
            .collect();
        cycles.sort_by_key(|c| c[0]);
        CycleDecomposition {
            degree: self.degree,
            cycles,
        }
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in &self.cycles {
            let body: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", body.join(","))?;
        }
        Ok(())
    }
}

pub fn cycle_decomposition(sigma: &Permutation) -> CycleDecomposition {
    let n = sigma.degree();
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if visited[start] || sigma.images[start] == start {
            visited[start] = true;
            continue;
        }
        let mut cycle = Vec::new();
        let mut p = start;
        while !visited[p] {
            visited[p] = true;
            cycle.push(p + 1);
            p = sigma.images[p];
        }
        cycles.push(cycle);
    }
    CycleDecomposition { degree: n, cycles }
}

struct Scanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn error(&self, message: impl Into<String>) -> PermError {
        PermError::Syntax {
            position: self.column(),
            message: message.into(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), PermError> {
        match self.peek() {
            Some(b) if b == byte => {
                self.pos += 1;
                Ok(())
            }
            Some(b) => Err(self.error(format!(
                "expected '{}', found '{}'",
                byte as char, b as char
            ))),
            None => Err(self.error(format!("expected '{}', found end of input", byte as char))),
        }
    }

    fn integer(&mut self) -> Result<(usize, usize), PermError> {
        self.skip_ws();
        let column = self.column();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        let value = text.parse::<usize>().map_err(|_| PermError::Syntax {
            position: column,
            message: format!("integer '{text}' is too large"),
        })?;
        Ok((value, column))
    }
}

/// Parses cycle notation `(a,b,…)(c,d,…)` or one-line notation `[p1 … p2r]`.
///
/// The degree is always explicit; points not mentioned in cycle notation are fixed.
pub fn parse_permutation(text: &str, degree: usize) -> Result<Permutation, PermError> {
    check_degree(degree)?;
    let mut sc = Scanner {
        bytes: text.as_bytes(),
        pos: 0,
    };
    if sc.peek() == Some(b'[') {
        return parse_one_line(&mut sc, degree);
    }
    let mut seen = vec![false; degree];
    let mut cycles = Vec::new();
    while let Some(b) = sc.peek() {
        if b != b'(' {
            return Err(sc.error(format!("expected '(', found '{}'", b as char)));
        }
        sc.pos += 1;
        // "()" is how the identity prints.
        if sc.peek() == Some(b')') {
            sc.pos += 1;
            continue;
        }
        let mut cycle = Vec::new();
        loop {
            let (point, column) = sc.integer()?;
            if point == 0 || point > degree {
                return Err(PermError::OutOfRange {
                    position: column,
                    point,
                    degree,
                });
            }
            if seen[point - 1] {
                return Err(PermError::Duplicate {
                    position: column,
                    point,
                });
            }
            seen[point - 1] = true;
            cycle.push(point);
            match sc.peek() {
                Some(b',') => sc.pos += 1,
                Some(b')') => {
                    sc.pos += 1;
                    break;
                }
                Some(b) => {
                    return Err(sc.error(format!("expected ',' or ')', found '{}'", b as char)))
                }
                None => return Err(sc.error("unterminated cycle")),
            }
        }
        if cycle.len() < 2 {
            return Err(sc.error("a cycle needs at least two points"));
        }
        cycles.push(cycle);
    }
    Permutation::from_cycles(degree, &cycles)
}

fn parse_one_line(sc: &mut Scanner<'_>, degree: usize) -> Result<Permutation, PermError> {
    sc.expect(b'[')?;
    let mut images = Vec::new();
    let mut seen = vec![false; degree];
    loop {
        match sc.peek() {
            Some(b']') => {
                sc.pos += 1;
                break;
            }
            None => return Err(sc.error("unterminated one-line notation")),
            Some(_) => {
                let (point, column) = sc.integer()?;
                if point == 0 || point > degree {
                    return Err(PermError::OutOfRange {
                        position: column,
                        point,
                        degree,
                    });
                }
                if seen[point - 1] {
                    return Err(PermError::Duplicate {
                        position: column,
                        point,
                    });
                }
                seen[point - 1] = true;
                images.push(point);
            }
        }
    }
    if let Some(b) = sc.peek() {
        return Err(sc.error(format!(
            "unexpected '{}' after one-line notation",
            b as char
        )));
    }
    if images.len() != degree {
        return Err(PermError::WrongLength {
            found: images.len(),
            expected: degree,
        });
    }
    Permutation::from_images(&images)
}
