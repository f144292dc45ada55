//! Points of the standard simplex, coordinate permutations, majorization and
//! the contiguous-block partition of a permuted prefix.
//!
//! All indices in the Rust API are 0-based. Serialized documents use the
//! 1-based one-line notation (`image[i] = π(i)` with values in `1..=n`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack used for simplex membership and majorization comparisons.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// A point of the standard simplex: nonnegative entries summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SimplexDoc", into = "SimplexDoc")]
pub struct SimplexVector {
    entries: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SimplexDoc {
    n: usize,
    entries: Vec<f64>,
}

impl TryFrom<SimplexDoc> for SimplexVector {
    type Error = Error;

    fn try_from(doc: SimplexDoc) -> Result<Self> {
        if doc.n != doc.entries.len() {
            return Err(Error::DimensionMismatch {
                expected: doc.n,
                actual: doc.entries.len(),
            });
        }
        SimplexVector::new(doc.entries)
    }
}

impl From<SimplexVector> for SimplexDoc {
    fn from(x: SimplexVector) -> Self {
        SimplexDoc {
            n: x.entries.len(),
            entries: x.entries,
        }
    }
}

impl SimplexVector {
    /// Validates `entries` against the simplex invariants (with slack
    /// [`SIMPLEX_TOL`]) and wraps them unchanged.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionTooSmall { min: 1, actual: 0 });
        }
        if let Some((i, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < -SIMPLEX_TOL)
        {
            return Err(Error::NotInSimplex(format!("entry {} = {v:e}", i + 1)));
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::NotInSimplex(format!("entries sum to {sum:.17}")));
        }
        Ok(Self { entries })
    }

    /// Clamps negative entries to zero and rescales to unit mass. Fails if
    /// the input has no positive mass.
    pub fn normalized(mut entries: Vec<f64>) -> Result<Self> {
        for v in entries.iter_mut() {
            if !v.is_finite() {
                return Err(Error::NotInSimplex("non-finite entry".into()));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let sum: f64 = entries.iter().sum();
        if sum <= 0.0 {
            return Err(Error::NotInSimplex("no positive mass".into()));
        }
        entries.iter_mut().for_each(|v| *v /= sum);
        Self::new(entries)
    }

    /// The vertex `e_{index}` (0-based).
    pub fn vertex(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::IndexOutOfRange { index: index + 1, n });
        }
        let mut entries = vec![0.0; n];
        entries[index] = 1.0;
        Ok(Self { entries })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DimensionTooSmall { min: 1, actual: 0 });
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    /// Entries sorted in descending order.
    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        // ties broken by original index
        idx.sort_by(|&a, &b| {
            self.entries[b]
                .total_cmp(&self.entries[a])
                .then(a.cmp(&b))
        });
        idx.into_iter().map(|i| self.entries[i]).collect()
    }

    pub fn is_vertex(&self, index: usize, tol: f64) -> bool {
        index < self.dim() && (self.entries[index] - 1.0).abs() <= tol
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for SimplexVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v:.6}")?;
        }
        write!(f, ")")
    }
}

/// A bijection of `{0, …, n−1}` stored in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    image: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    /// Accepts the 1-based one-line notation used in documents.
    fn try_from(one_based: Vec<usize>) -> Result<Self> {
        Permutation::from_one_based(&one_based)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.to_one_based()
    }
}

impl Permutation {
    /// Builds a permutation from its 0-based image list.
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen = vec![false; n];
        for &v in &image {
            if v >= n {
                return Err(Error::InvalidPermutation(format!(
                    "image {} outside 1..={n}",
                    v + 1
                )));
            }
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidPermutation(format!(
                    "image {} repeated",
                    v + 1
                )));
            }
        }
        Ok(Self { image })
    }

    pub fn from_one_based(image: &[usize]) -> Result<Self> {
        if image.contains(&0) {
            return Err(Error::InvalidPermutation(
                "one-based image contains 0".into(),
            ));
        }
        Self::new(image.iter().map(|v| v - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.image.iter().map(|v| v + 1).collect()
    }

    pub fn identity(n: usize) -> Self {
        Self {
            image: (0..n).collect(),
        }
    }

    /// Swaps `i` and `j` (0-based).
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange {
                index: i.max(j) + 1,
                n,
            });
        }
        let mut image: Vec<usize> = (0..n).collect();
        image.swap(i, j);
        Ok(Self { image })
    }

    pub fn dim(&self) -> usize {
        self.image.len()
    }

    /// `π(i)`, 0-based.
    pub fn image_of(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.dim()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Self { image: inv }
    }

    /// The permutation that applies `self` first and `next` afterwards.
    pub fn then(&self, next: &Permutation) -> Result<Self> {
        if self.dim() != next.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: next.dim(),
            });
        }
        Ok(Self {
            image: self.image.iter().map(|&v| next.image[v]).collect(),
        })
    }

    /// Embeds `self` into dimension `n`, acting on `offset..offset+dim`.
    pub fn embed(&self, n: usize, offset: usize) -> Result<Self> {
        if offset + self.dim() > n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: offset + self.dim(),
            });
        }
        let mut image: Vec<usize> = (0..n).collect();
        for (i, &v) in self.image.iter().enumerate() {
            image[offset + i] = offset + v;
        }
        Ok(Self { image })
    }

    /// Moves the entry at position `i` to position `π(i)`.
    pub fn apply_slice(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        let mut out = vec![0.0; x.len()];
        for (i, &v) in self.image.iter().enumerate() {
            out[v] = x[i];
        }
        Ok(out)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{}", v + 1)?;
        }
        write!(f, "]")
    }
}

/// A maximal run of consecutive indices `lo..=hi` (0-based) inside a
/// permuted prefix `π({0, …, k−1})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "BlockDoc", into = "BlockDoc")]
pub struct Block {
    pub lo: usize,
    pub hi: usize,
}

#[derive(Serialize, Deserialize)]
struct BlockDoc {
    lo: usize,
    hi: usize,
}

impl From<BlockDoc> for Block {
    fn from(d: BlockDoc) -> Self {
        Block {
            lo: d.lo.saturating_sub(1),
            hi: d.hi.saturating_sub(1),
        }
    }
}

impl From<Block> for BlockDoc {
    fn from(b: Block) -> Self {
        BlockDoc {
            lo: b.lo + 1,
            hi: b.hi + 1,
        }
    }
}

impl Block {
    /// Constructs the block `{lo, …, hi}` from 1-based bounds.
    pub fn one_based(lo: usize, hi: usize) -> Self {
        assert!(1 <= lo && lo <= hi, "invalid block bounds {lo}..={hi}");
        Block {
            lo: lo - 1,
            hi: hi - 1,
        }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, i: usize) -> bool {
        self.lo <= i && i <= self.hi
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{{{}}}", self.lo + 1)
        } else {
            write!(f, "{{{}..{}}}", self.lo + 1, self.hi + 1)
        }
    }
}

/// Returns `π x`, i.e. the entry at position `i` is moved to `π(i)`.
pub fn apply_permutation(pi: &Permutation, x: &SimplexVector) -> Result<SimplexVector> {
    Ok(SimplexVector {
        entries: pi.apply_slice(x.as_slice())?,
    })
}

/// True iff `x ≺ d`: every partial sum of the descending-sorted entries of
/// `x` is bounded by the corresponding partial sum of `d` (slack
/// [`SIMPLEX_TOL`]).
pub fn majorizes(x: &SimplexVector, d: &SimplexVector) -> Result<bool> {
    Ok(majorization_excess(x, d)? <= SIMPLEX_TOL)
}

/// Largest amount by which a partial sum of sorted `x` exceeds that of `d`.
/// Nonpositive when `x ≺ d` holds exactly.
pub fn majorization_excess(x: &SimplexVector, d: &SimplexVector) -> Result<f64> {
    x.check_dim(d)?;
    let xs = x.sorted_desc();
    let ds = d.sorted_desc();
    let (mut sx, mut sd) = (0.0, 0.0);
    let mut worst = f64::NEG_INFINITY;
    for (a, b) in xs.iter().zip(&ds) {
        sx += a;
        sd += b;
        worst = worst.max(sx - sd);
    }
    Ok(worst)
}

/// Partitions `π({0, …, k−1})` into maximal contiguous runs, sorted by `lo`.
///
/// `k` is the prefix length and must satisfy `1 ≤ k ≤ n`.
pub fn blocks(pi: &Permutation, k: usize) -> Result<Vec<Block>> {
    let n = pi.dim();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, n });
    }
    let mut member = vec![false; n];
    for i in 0..k {
        member[pi.image_of(i)] = true;
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if member[i] {
            let lo = i;
            while i + 1 < n && member[i + 1] {
                i += 1;
            }
            out.push(Block { lo, hi: i });
        }
        i += 1;
    }
    Ok(out)
}

/// ℓ₁ distance between two simplex vectors.
pub fn l1_distance(x: &SimplexVector, y: &SimplexVector) -> Result<f64> {
    x.check_dim(y)?;
    Ok(l1(x.as_slice(), y.as_slice()))
}

pub(crate) fn l1(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).sum()
}
