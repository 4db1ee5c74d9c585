//! Monomial formalism for polar codes.
//!
//! Every row of the transform T_N = T_2^{⊗n} is the evaluation table of one
//! monomial in n binary variables, so a polar code is described by a set of
//! monomials instead of a set of row indices. This module provides the
//! index↔monomial bijection, the "decreasing" partial order, minimal
//! information sets, the automorphism oracle, and the auxiliary matrix that
//! records which monomials must be added to free an elementary affine
//! transformation.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::gf2::{AffineTransform, BlockStructure};

/// A squarefree monomial over variables x_0..x_{n-1}, stored as the bitmask
/// of the variables present.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    mask: u32,
}

impl std::fmt::Debug for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.mask == 0 {
            return write!(f, "1");
        }
        for v in self.vars() {
            write!(f, "x{v}")?;
        }
        Ok(())
    }
}

impl Monomial {
    /// The constant monomial 1 (no variables).
    pub const ONE: Monomial = Monomial { mask: 0 };

    pub fn from_mask(mask: u32) -> Self {
        Monomial { mask }
    }

    pub fn from_vars(vars: &[usize]) -> Self {
        let mut mask = 0;
        for &v in vars {
            assert!(v < 32, "variable index out of range: {v}");
            mask |= 1 << v;
        }
        Monomial { mask }
    }

    /// The monomial whose evaluation is row `i` of T_N: its variables are
    /// the zero bits of `i`, so degree = n − popcount(i).
    pub fn from_index(i: usize, n: usize) -> Self {
        assert!(n <= 32 && i < 1usize << n, "index {i} out of range for n={n}");
        Monomial {
            mask: !(i as u32) & index_mask(n),
        }
    }

    /// Inverse of [`Monomial::from_index`].
    pub fn to_index(self, n: usize) -> usize {
        debug_assert!(self.mask <= index_mask(n));
        (!self.mask & index_mask(n)) as usize
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    pub fn degree(self) -> usize {
        self.mask.count_ones() as usize
    }

    /// Variable indices in ascending order.
    pub fn vars(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.degree());
        let mut bits = self.mask;
        while bits != 0 {
            out.push(bits.trailing_zeros() as usize);
            bits &= bits - 1;
        }
        out
    }

    pub fn contains(self, var: usize) -> bool {
        (self.mask >> var) & 1 == 1
    }

    pub fn without(self, var: usize) -> Self {
        Monomial {
            mask: self.mask & !(1 << var),
        }
    }

    pub fn with(self, var: usize) -> Self {
        Monomial {
            mask: self.mask | 1 << var,
        }
    }

    pub fn divides(self, other: Monomial) -> bool {
        self.mask & !other.mask == 0
    }
}

fn index_mask(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Partial order on monomials: `a ⪯ b` iff deg(a) ≤ deg(b) and, with
/// variable indices sorted ascending, every index of `a` is dominated by the
/// corresponding index among the top deg(a) indices of `b`. Same-degree
/// comparison is plain elementwise domination; across degrees this composes
/// divisibility with domination.
pub fn upo_le(a: Monomial, b: Monomial) -> bool {
    let (da, db) = (a.degree(), b.degree());
    if da > db {
        return false;
    }
    let (va, vb) = (a.vars(), b.vars());
    (0..da).all(|k| va[k] <= vb[k + db - da])
}

/// Evaluation table of `m` over all 2^n points, packed 64 entries per word
/// (bit z of word z/64). Entry z is 1 iff no variable of `m` meets a set bit
/// of z, which makes the table of the index-i monomial exactly row i of
/// T_2^{⊗n}.
pub fn eval_monomial(m: Monomial, n: usize) -> Vec<u64> {
    let len = 1usize << n;
    let mut out = vec![0u64; len.div_ceil(64)];
    for z in 0..len {
        if z as u32 & m.mask() == 0 {
            out[z / 64] |= 1 << (z % 64);
        }
    }
    out
}

/// A set of monomials over a fixed variable count; doubles as the generating
/// set of a code and (via the index bijection) as its information set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialSet {
    n: usize,
    members: BTreeSet<Monomial>,
}

impl MonomialSet {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1 && n <= 32, "variable count out of range: {n}");
        MonomialSet {
            n,
            members: BTreeSet::new(),
        }
    }

    pub fn from_monomials<I: IntoIterator<Item = Monomial>>(n: usize, iter: I) -> Result<Self> {
        let mut set = Self::new(n);
        for m in iter {
            if m.mask() > index_mask(n) {
                return Err(Error::InvalidConfig(format!(
                    "monomial {m:?} uses variables beyond n={n}"
                )));
            }
            set.members.insert(m);
        }
        Ok(set)
    }

    pub fn from_indices(n: usize, indices: &[usize]) -> Result<Self> {
        let mut set = Self::new(n);
        for &i in indices {
            if i >= 1usize << n {
                return Err(Error::InvalidConfig(format!(
                    "code-bit index {i} out of range for length {}",
                    1usize << n
                )));
            }
            set.members.insert(Monomial::from_index(i, n));
        }
        Ok(set)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, m: Monomial) -> bool {
        self.members.contains(&m)
    }

    pub fn insert(&mut self, m: Monomial) -> bool {
        debug_assert!(m.mask() <= index_mask(self.n));
        self.members.insert(m)
    }

    pub fn iter(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.members.iter().copied()
    }

    /// Code-bit indices of the members, ascending.
    pub fn indices(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.members.iter().map(|m| m.to_index(self.n)).collect();
        out.sort_unstable();
        out
    }

    pub fn max_degree(&self) -> Result<usize> {
        self.members
            .iter()
            .map(|m| m.degree())
            .max()
            .ok_or(Error::EmptyMonomialSet)
    }

    /// The immediate predecessors of `m` under the partial order: drop one
    /// variable, or slide one variable down to the adjacent free index.
    /// Their transitive closure generates the whole down-set of `m`.
    fn predecessors(&self, m: Monomial) -> Vec<Monomial> {
        let mut out = Vec::new();
        for v in m.vars() {
            out.push(m.without(v));
            if v > 0 && !m.contains(v - 1) {
                out.push(m.without(v).with(v - 1));
            }
        }
        out
    }

    /// True iff the set is decreasing: closed under factors and under
    /// same-degree domination (checked via the generating moves).
    pub fn is_decreasing(&self) -> bool {
        self.members.iter().all(|&m| {
            self.predecessors(m)
                .into_iter()
                .all(|p| self.members.contains(&p))
        })
    }

    /// Smallest decreasing superset.
    pub fn downward_closure(&self) -> MonomialSet {
        let mut members = self.members.clone();
        let mut work: Vec<Monomial> = members.iter().copied().collect();
        while let Some(m) = work.pop() {
            for p in self.predecessors(m) {
                if members.insert(p) {
                    work.push(p);
                }
            }
        }
        MonomialSet { n: self.n, members }
    }

    /// The maxima of a decreasing set: the unique minimal subset whose
    /// downward closure reproduces the whole set.
    pub fn min_info_set(&self) -> Result<MonomialSet> {
        if !self.is_decreasing() {
            return Err(Error::NotDecreasing);
        }
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&m| {
                !self
                    .members
                    .iter()
                    .any(|&other| other != m && upo_le(m, other))
            })
            .collect();
        Ok(MonomialSet {
            n: self.n,
            members,
        })
    }

    /// True iff the code-bit permutation `t` maps the code onto itself:
    /// every generator row, re-indexed through `t`, must stay inside the
    /// row space spanned by the generator rows.
    pub fn is_automorphism(&self, t: &AffineTransform) -> bool {
        assert_eq!(t.n(), self.n, "transform size does not match variable count");
        let len = 1usize << self.n;
        let words = len.div_ceil(64);

        // Forward-eliminated basis of the generator rows, keyed by pivot bit.
        let mut basis: Vec<(usize, Vec<u64>)> = Vec::with_capacity(self.members.len());
        let reduce = |row: &mut Vec<u64>, basis: &Vec<(usize, Vec<u64>)>| {
            for (pivot, b) in basis {
                if (row[pivot / 64] >> (pivot % 64)) & 1 == 1 {
                    for w in 0..words {
                        row[w] ^= b[w];
                    }
                }
            }
        };
        for &m in &self.members {
            let mut row = eval_monomial(m, self.n);
            reduce(&mut row, &basis);
            let pivot = row
                .iter()
                .enumerate()
                .find(|(_, &w)| w != 0)
                .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
                .expect("distinct transform rows are linearly independent");
            basis.push((pivot, row));
        }

        self.members.iter().all(|&m| {
            let row = eval_monomial(m, self.n);
            let mut permuted = vec![0u64; words];
            for z in 0..len {
                if (row[z / 64] >> (z % 64)) & 1 == 1 {
                    let zp = t.map_index(z);
                    permuted[zp / 64] |= 1 << (zp % 64);
                }
            }
            reduce(&mut permuted, &basis);
            permuted.iter().all(|&w| w == 0)
        })
    }

    /// The auxiliary matrix of the set: cell (i,j) lists the monomials that
    /// must be added before the elementary transformation z_i ← z_i + z_j
    /// becomes an automorphism.
    ///
    /// That transformation sends the evaluation of a monomial containing x_i
    /// but not x_j to itself plus lower terms plus the evaluation of the
    /// monomial with x_i replaced by x_j; the cell therefore collects the
    /// substituted monomials that fall outside the set.
    pub fn compute_aux(&self) -> Result<AuxMatrix> {
        if !self.is_decreasing() {
            return Err(Error::NotDecreasing);
        }
        let n = self.n;
        let mut cells = vec![Vec::new(); n * n];
        for &m in &self.members {
            for i in m.vars() {
                let dropped = m.without(i);
                for j in 0..n {
                    if j != i && !m.contains(j) {
                        let sub = dropped.with(j);
                        if !self.members.contains(&sub) {
                            cells[i * n + j].push(sub);
                        }
                    }
                }
            }
        }
        Ok(AuxMatrix { n, cells })
    }

    /// The block structure of the affine automorphism group: the coarsest
    /// partition of the index bits into contiguous blocks such that every
    /// elementary transformation inside a block fixes the code. Grows each
    /// block greedily from the diagonal, which is exact because every
    /// block-crossing cell of a coarser candidate is occupied.
    pub fn block_structure(&self) -> Result<BlockStructure> {
        let aux = self.compute_aux()?;
        let n = self.n;
        let mut sizes = Vec::new();
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            'grow: while end < n {
                for i in start..=end {
                    for j in start..=end {
                        if !aux.is_free(i, j) {
                            break 'grow;
                        }
                    }
                }
                end += 1;
            }
            sizes.push(end - start);
            start = end;
        }
        BlockStructure::new(sizes)
    }
}

/// Grid of the monomials blocking each elementary affine transformation;
/// see [`MonomialSet::compute_aux`].
#[derive(Clone, Debug)]
pub struct AuxMatrix {
    n: usize,
    cells: Vec<Vec<Monomial>>,
}

impl AuxMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell(&self, i: usize, j: usize) -> &[Monomial] {
        &self.cells[i * self.n + j]
    }

    /// True iff the elementary transformation z_i ← z_i + z_j (plus the
    /// trivial diagonal) is already an automorphism.
    pub fn is_free(&self, i: usize, j: usize) -> bool {
        i == j || self.cells[i * self.n + j].is_empty()
    }
}

/// All monomials of degree ≤ r over n variables (a Reed-Muller generating
/// set; decreasing by construction).
pub fn reed_muller_set(r: usize, n: usize) -> MonomialSet {
    let mut set = MonomialSet::new(n);
    for mask in 0..1u32 << n {
        if mask.count_ones() as usize <= r {
            set.insert(Monomial::from_mask(mask));
        }
    }
    set
}
