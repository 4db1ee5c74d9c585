//! Binary linear algebra over GF(2) and the block-lower-triangular affine
//! (BLTA) group machinery: membership tests, group sizes, uniform sampling
//! and the P·U·L factorization of invertible matrices.
//!
//! Matrices here are square and small (n is the number of index bits of a
//! code of length 2^n), so every row is kept as a `u64` bitmask: bit `j` of
//! `rows[i]` is the entry at row `i`, column `j`.

use num_bigint::BigUint;
use rand::Rng;

use crate::error::{Error, Result};

/// Square binary matrix with bitmask rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinMatrix {
    n: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for BinMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinMatrix {}x{}", self.n, self.n)?;
        for r in &self.rows {
            for j in 0..self.n {
                write!(f, "{}", (r >> j) & 1)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl BinMatrix {
    /// Zero matrix of size `n`×`n`. Rows are `u64` bitmasks, hence `n ≤ 64`.
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1 && n <= 64, "matrix size out of range: {n}");
        BinMatrix {
            n,
            rows: vec![0; n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.rows[i] = 1 << i;
        }
        m
    }

    /// Build from explicit row masks.
    pub fn from_rows(n: usize, rows: Vec<u64>) -> Self {
        assert_eq!(rows.len(), n);
        let mask = Self::col_mask(n);
        assert!(rows.iter().all(|r| r & !mask == 0), "row bits beyond n");
        BinMatrix { n, rows }
    }

    fn col_mask(n: usize) -> u64 {
        if n == 64 {
            u64::MAX
        } else {
            (1u64 << n) - 1
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i] >> j) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if v {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    /// Matrix product over GF(2): row `i` of the result is the XOR of the
    /// rows of `other` selected by the set bits of row `i` of `self`.
    pub fn mul(&self, other: &BinMatrix) -> Result<BinMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                let mut acc = 0u64;
                let mut bits = r;
                while bits != 0 {
                    let k = bits.trailing_zeros() as usize;
                    acc ^= other.rows[k];
                    bits &= bits - 1;
                }
                acc
            })
            .collect();
        Ok(BinMatrix { n: self.n, rows })
    }

    /// Matrix-vector product; `v` is a bitmask with bit `i` = coordinate `i`.
    pub fn mul_vec(&self, v: u64) -> u64 {
        let mut out = 0u64;
        for (i, &r) in self.rows.iter().enumerate() {
            out |= (((r & v).count_ones() & 1) as u64) << i;
        }
        out
    }

    pub fn transpose(&self) -> BinMatrix {
        let mut t = Self::zero(self.n);
        for i in 0..self.n {
            let mut bits = self.rows[i];
            while bits != 0 {
                let j = bits.trailing_zeros() as usize;
                t.rows[j] |= 1 << i;
                bits &= bits - 1;
            }
        }
        t
    }

    /// Reverse both the row order and the column order (conjugation by the
    /// exchange matrix J). Maps lower-triangular to upper-triangular and
    /// permutation matrices to permutation matrices.
    pub fn reversed(&self) -> BinMatrix {
        let n = self.n;
        let rows = (0..n)
            .map(|i| {
                let src = self.rows[n - 1 - i];
                let mut out = 0u64;
                for j in 0..n {
                    out |= ((src >> (n - 1 - j)) & 1) << j;
                }
                out
            })
            .collect();
        BinMatrix { n, rows }
    }

    /// Inverse over GF(2) by Gauss-Jordan elimination on an augmented system.
    pub fn inverse(&self) -> Result<BinMatrix> {
        let n = self.n;
        let mut work = self.rows.clone();
        let mut inv = Self::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| (work[r] >> col) & 1 == 1)
                .ok_or(Error::SingularMatrix)?;
            work.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && (work[r] >> col) & 1 == 1 {
                    work[r] ^= work[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(BinMatrix { n, rows: inv })
    }

    pub fn is_invertible(&self) -> bool {
        let n = self.n;
        let mut work = self.rows.clone();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| (work[r] >> col) & 1 == 1) else {
                return false;
            };
            work.swap(col, pivot);
            for r in col + 1..n {
                if (work[r] >> col) & 1 == 1 {
                    work[r] ^= work[col];
                }
            }
        }
        true
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = 0u64;
        for &r in &self.rows {
            if r.count_ones() != 1 || seen & r != 0 {
                return false;
            }
            seen |= r;
        }
        true
    }

    /// True iff unit diagonal and no entries above it.
    pub fn is_unit_lower(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &r)| (r >> i) & 1 == 1 && r >> (i + 1) == 0)
    }

    /// True iff unit diagonal and no entries below it.
    pub fn is_unit_upper(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &r)| (r >> i) & 1 == 1 && r & ((1 << i) - 1) == 0)
    }
}

/// Ordered diagonal block sizes (s_1, ..., s_t) of a BLTA group; the first
/// block covers the lowest index bits.
///
/// Displays as the comma-separated size list (`"3,2"`) and parses back from
/// the same shape.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BlockStructure {
    sizes: Vec<usize>,
}

impl std::fmt::Display for BlockStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for size in &self.sizes {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{size}")?;
            first = false;
        }
        Ok(())
    }
}

impl std::str::FromStr for BlockStructure {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let sizes = text
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad block size {tok:?}")))
            })
            .collect::<Result<Vec<usize>>>()?;
        BlockStructure::new(sizes)
    }
}

impl BlockStructure {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidConfig(format!(
                "block sizes must be positive and non-empty, got {sizes:?}"
            )));
        }
        Ok(BlockStructure { sizes })
    }

    /// The absorbed-group structure (2, 1, ..., 1) on `n` bits.
    pub fn absorbed(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "structure (2,1,...,1) needs n >= 2, got {n}"
            )));
        }
        let mut sizes = vec![2];
        sizes.extend(std::iter::repeat(1).take(n - 2));
        Ok(BlockStructure { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Total bit count (the n this structure partitions).
    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// Interior cut positions between blocks (prefix sums, excluding 0 and n).
    pub fn cuts(&self) -> Vec<usize> {
        let mut acc = 0;
        self.sizes[..self.sizes.len() - 1]
            .iter()
            .map(|&s| {
                acc += s;
                acc
            })
            .collect()
    }

    /// (offset, size) of each diagonal block.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let mut acc = 0;
        self.sizes
            .iter()
            .map(|&s| {
                let b = (acc, s);
                acc += s;
                b
            })
            .collect()
    }

    /// True iff BLTA(`other`) is a subgroup of BLTA(`self`), i.e. every block
    /// of `other` lies inside one block of `self`.
    pub fn admits(&self, other: &BlockStructure) -> bool {
        if self.n() != other.n() {
            return false;
        }
        let ours = self.cuts();
        let theirs = other.cuts();
        ours.iter().all(|c| theirs.contains(c))
    }

    /// Membership test for the BLT matrix group of this structure: invertible
    /// with nothing strictly above the block diagonal.
    pub fn is_blta_member(&self, a: &BinMatrix) -> bool {
        if a.n() != self.n() {
            return false;
        }
        for (offset, size) in self.blocks() {
            let end = offset + size;
            for i in offset..end {
                if a.row(i) >> end != 0 {
                    return false;
                }
            }
        }
        a.is_invertible()
    }

    /// Exact order of the affine group BLTA(S):
    /// 2^(n(n+1)/2) * prod_i prod_{j=2..s_i} (2^j - 1).
    pub fn blta_size(&self) -> BigUint {
        let n = self.n();
        let mut size = BigUint::from(1u32) << (n * (n + 1) / 2);
        for &s in &self.sizes {
            for j in 2..=s {
                size *= (BigUint::from(1u32) << j) - 1u32;
            }
        }
        size
    }
}

/// One code-bit permutation: the affine map z -> A·z + b on bit indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineTransform {
    a: BinMatrix,
    b: u64,
}

impl AffineTransform {
    pub fn new(a: BinMatrix, b: u64) -> Result<Self> {
        if !a.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        let b = b & BinMatrix::col_mask(a.n());
        Ok(AffineTransform { a, b })
    }

    pub fn identity(n: usize) -> Self {
        AffineTransform {
            a: BinMatrix::identity(n),
            b: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.a.n()
    }

    pub fn matrix(&self) -> &BinMatrix {
        &self.a
    }

    pub fn offset(&self) -> u64 {
        self.b
    }

    /// Image of code-bit index `z` (its binary expansion is the variable
    /// vector; bit i is variable i).
    pub fn map_index(&self, z: usize) -> usize {
        (self.a.mul_vec(z as u64) ^ self.b) as usize
    }

    /// The inverse map z -> A⁻¹·z + A⁻¹·b.
    pub fn inverse(&self) -> Self {
        let ai = self
            .a
            .inverse()
            .expect("transform matrices are invertible by construction");
        let b = ai.mul_vec(self.b);
        AffineTransform { a: ai, b }
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &AffineTransform) -> Result<Self> {
        let a = self.a.mul(&other.a)?;
        let b = self.a.mul_vec(other.b) ^ self.b;
        Ok(AffineTransform { a, b })
    }
}

/// Factor an invertible affine transform as A = P·U·L and b = P·U·b0 with P
/// a permutation, U unit upper-triangular and L unit lower-triangular.
///
/// The factorization runs a partially-pivoted LU on the row/column-reversed
/// matrix J·A·J; conjugating the resulting Qᵀ·L'·U' back by J swaps the
/// triangle orientations and yields exactly the P·U·L shape.
pub fn pul_decompose(t: &AffineTransform) -> (BinMatrix, BinMatrix, BinMatrix, u64) {
    let n = t.n();
    let rev = t.matrix().reversed();

    // Partially-pivoted LU of `rev`: perm[i] is the source row of work row i.
    let mut work = (0..n).map(|i| rev.row(i)).collect::<Vec<_>>();
    let mut lower = vec![0u64; n];
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| (work[r] >> col) & 1 == 1)
            .expect("transform matrices are invertible by construction");
        if pivot != col {
            work.swap(col, pivot);
            perm.swap(col, pivot);
            // Swap already-recorded multipliers (columns < col) along with
            // the rows, as in standard PLU pivoting.
            let mask = (1u64 << col) - 1;
            let (lc, lp) = (lower[col] & mask, lower[pivot] & mask);
            lower[col] = (lower[col] & !mask) | lp;
            lower[pivot] = (lower[pivot] & !mask) | lc;
        }
        for r in col + 1..n {
            if (work[r] >> col) & 1 == 1 {
                work[r] ^= work[col];
                lower[r] |= 1 << col;
            }
        }
    }
    for (i, row) in lower.iter_mut().enumerate() {
        *row |= 1 << i; // unit diagonal
    }

    // rev = Qᵀ·L'·U' with Q(i, perm[i]) = 1, so A = (J·Qᵀ·J)(J·L'·J)(J·U'·J).
    let mut p = BinMatrix::zero(n);
    for (i, &src) in perm.iter().enumerate() {
        // Qᵀ has its 1 for column i at row perm[i]; conjugate both indices.
        p.set(n - 1 - src, n - 1 - i, true);
    }
    let u = BinMatrix { n, rows: lower }.reversed();
    let l = BinMatrix { n, rows: work }.reversed();

    // Solve (P·U)·b0 = b: apply Pᵀ, then back-substitute through U.
    let pt = p.transpose();
    let w = pt.mul_vec(t.offset());
    let mut b0 = 0u64;
    for i in (0..n).rev() {
        let parity = (u.row(i) & b0).count_ones() & 1;
        b0 |= (((w >> i) & 1) ^ parity as u64) << i;
    }

    (p, u, l, b0)
}

/// Draw a uniformly random element of BLTA(S): each diagonal block is an
/// invertible matrix drawn by rejection, everything below the block diagonal
/// and the offset b are uniform bits.
pub fn sample_blta<R: Rng + ?Sized>(s: &BlockStructure, rng: &mut R) -> AffineTransform {
    let n = s.n();
    let mut a = BinMatrix::zero(n);
    for (offset, size) in s.blocks() {
        // Rejection sampling stays uniform over GL(size); the acceptance
        // probability prod_{j>=1}(1 - 2^-j) never drops below 0.288.
        let mask = BinMatrix::col_mask(size);
        loop {
            let block = BinMatrix::from_rows(
                size,
                (0..size).map(|_| rng.random::<u64>() & mask).collect(),
            );
            if block.is_invertible() {
                for i in 0..size {
                    a.rows[offset + i] |= block.row(i) << offset;
                }
                break;
            }
        }
        let below = BinMatrix::col_mask(offset);
        for i in offset..offset + size {
            a.rows[i] |= rng.random::<u64>() & below;
        }
    }
    let b = rng.random::<u64>() & BinMatrix::col_mask(n);
    AffineTransform::new(a, b).expect("diagonal blocks are invertible by construction")
}
