//! Code automorphisms: counting equivalence classes of decoders, testing
//! whether two affine permutations lead to the same decoding behaviour, and
//! sampling well-separated class representatives for an ensemble.
//!
//! The backdrop: lower-triangular affine permutations are absorbed by
//! successive-cancellation decoding, so composing a decoder with `t` or with
//! `l ∘ t` (`l` lower-triangular affine with an invertible top-left 2×2 block)
//! yields identical outputs.  Two permutations are therefore interchangeable
//! exactly when they differ by such a factor, and an ensemble should pick at
//! most one member per class.

use num_bigint::BigUint;

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{AffineTransform, BinMatrix, BlockStructure};

/// Permutes a length-`2^n` vector by an affine index map: entry `z` of the
/// input lands at index `t.map_index(z)` of the output.
///
/// Works for any copyable payload, so the same routine shuffles LLR frames
/// on the way into a decoder and hard bits on the way back out.
///
/// # Panics
///
/// Panics when `v.len() != 2^t.n()`.
pub fn apply_affine<T: Copy>(v: &[T], t: &AffineTransform) -> Vec<T> {
    assert_eq!(
        v.len(),
        1usize << t.n(),
        "vector length must match the transform's index space"
    );
    let mut out = vec![v[0]; v.len()];
    for (z, &value) in v.iter().enumerate() {
        out[t.map_index(z)] = value;
    }
    out
}

/// Number of decoder equivalence classes in `BLTA(s)`: the group order
/// divided by the order of the absorbed subgroup `BLTA(2, 1, …, 1)`,
/// which comes out to `(1/3) · ∏_i ∏_{j=2}^{s_i} (2^j − 1)`.
///
/// Requires the leading block to span at least two variables; otherwise the
/// absorbed subgroup is not contained in `BLTA(s)` and the quotient is not
/// defined.
pub fn ec_count(s: &BlockStructure) -> Result<BigUint> {
    let s1 = s.sizes()[0];
    if s1 < 2 {
        return Err(Error::FirstBlockTooSmall(s1));
    }
    let mut count = BigUint::from(1u32);
    for &size in s.sizes() {
        for j in 2..=size {
            count *= (BigUint::from(1u32) << j) - BigUint::from(1u32);
        }
    }
    // The j = 2 factor of the leading block contributes exactly 3.
    Ok(count / BigUint::from(3u32))
}

/// Orders of the two factor groups used to build class representatives:
/// block-diagonal unit-upper-triangular matrices (`2^{Σ s_i(s_i−1)/2}`)
/// and block-preserving permutation matrices (`∏ s_i!`).
pub fn count_au_ap(s: &BlockStructure) -> (BigUint, BigUint) {
    let mut upper = BigUint::from(1u32);
    let mut perms = BigUint::from(1u32);
    for &size in s.sizes() {
        upper <<= size * (size - 1) / 2;
        for k in 2..=size {
            perms *= BigUint::from(k);
        }
    }
    (upper, perms)
}

/// Number of positions at which two equal-length slices differ.
pub fn hamming_distance<T: PartialEq>(a: &[T], b: &[T]) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x != y).count())
}

/// Tests whether two affine permutations belong to the same decoder
/// equivalence class: true exactly when `A₁ · A₂⁻¹` is block lower
/// triangular for the absorbed profile `(2, 1, …, 1)`.  The affine offsets
/// play no role because every translation is absorbed.
///
/// # Panics
///
/// Panics when the transforms act on different index spaces or on fewer
/// than two variables.
pub fn same_ec(t1: &AffineTransform, t2: &AffineTransform) -> bool {
    let n = t1.n();
    assert_eq!(n, t2.n(), "transforms must act on the same index space");
    assert!(n >= 2, "equivalence classes need at least two variables");
    let inv = t2
        .matrix()
        .inverse()
        .expect("transform matrices are invertible by construction");
    let prod = t1
        .matrix()
        .mul(&inv)
        .expect("factor dimensions agree by construction");
    BlockStructure::absorbed(n)
        .expect("n >= 2 was checked above")
        .is_blta_member(&prod)
}

/// Minimum Hamming separation enforced between accepted representatives:
/// `d_u` on the upper-triangular bit vectors and `d_p` on the permutation
/// vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelectionThresholds {
    pub d_u: usize,
    pub d_p: usize,
}

/// One decoder-class representative, factored as `z ↦ P·U·z` with `P` a
/// block-preserving permutation and `U` block-diagonal unit upper
/// triangular.  No translation part: the offset is absorbed anyway, so
/// representatives keep `b = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EcRepresentative {
    p_vec: Vec<usize>,
    u_vec: Vec<bool>,
    transform: AffineTransform,
}

/// Number of free strictly-upper entries inside the diagonal blocks of `s`,
/// which is the length of an [`EcRepresentative`] bit vector.
pub fn upper_bit_count(s: &BlockStructure) -> usize {
    s.sizes().iter().map(|&size| size * (size - 1) / 2).sum()
}

impl EcRepresentative {
    /// Builds a representative from its two coordinate vectors.
    ///
    /// `p_vec` lists the permutation as images: `p_vec[i] = j` means
    /// variable `i` is sent to variable `j`, and each block of `s` must be
    /// permuted within itself.  `u_vec` lists the strictly-upper entries of
    /// the diagonal blocks, blocks in order, row-major within each block.
    pub fn from_vectors(s: &BlockStructure, p_vec: Vec<usize>, u_vec: Vec<bool>) -> Result<Self> {
        let n = s.n();
        if p_vec.len() != n {
            return Err(Error::DimensionMismatch {
                left: p_vec.len(),
                right: n,
            });
        }
        let expected_bits = upper_bit_count(s);
        if u_vec.len() != expected_bits {
            return Err(Error::DimensionMismatch {
                left: u_vec.len(),
                right: expected_bits,
            });
        }
        let mut p_mat = BinMatrix::zero(n);
        for (offset, size) in s.blocks() {
            let mut seen = vec![false; size];
            for i in offset..offset + size {
                let j = p_vec[i];
                if j < offset || j >= offset + size || seen[j - offset] {
                    return Err(Error::InvalidConfig(format!(
                        "p_vec is not a within-block permutation at index {i}"
                    )));
                }
                seen[j - offset] = true;
                // Column i carries its single 1 in row p(i).
                p_mat.set(j, i, true);
            }
        }
        let mut u_mat = BinMatrix::identity(n);
        let mut next = 0;
        for (offset, size) in s.blocks() {
            for i in offset..offset + size {
                for j in i + 1..offset + size {
                    u_mat.set(i, j, u_vec[next]);
                    next += 1;
                }
            }
        }
        let transform = AffineTransform::new(p_mat.mul(&u_mat)?, 0)?;
        Ok(Self {
            p_vec,
            u_vec,
            transform,
        })
    }

    /// The identity representative: every class listing starts with it so
    /// the plain decoder is always part of the ensemble.
    pub fn identity(s: &BlockStructure) -> Self {
        let n = s.n();
        Self::from_vectors(s, (0..n).collect(), vec![false; upper_bit_count(s)])
            .expect("identity vectors are always valid")
    }

    /// Permutation images: `p_vec()[i]` is where variable `i` goes.
    pub fn p_vec(&self) -> &[usize] {
        &self.p_vec
    }

    /// Strictly-upper block entries, blocks in order, row-major per block.
    pub fn u_vec(&self) -> &[bool] {
        &self.u_vec
    }

    /// The assembled index map `z ↦ P·U·z`.
    pub fn transform(&self) -> &AffineTransform {
        &self.transform
    }
}

/// Samples `m_count` pairwise-inequivalent representatives of `BLTA(s)`
/// decoder classes, starting with the identity, by rejection: a fresh
/// `(P, U)` pair is kept only if it clears the Hamming thresholds in `d`
/// against every accepted representative and falls in a new equivalence
/// class.
///
/// Fails upfront with [`Error::TooManyClasses`] when `m_count` exceeds the
/// number of classes, and with [`Error::SelectionExhausted`] when
/// `max_attempts` draws pass without completing the list (thresholds too
/// demanding for the group at hand).
pub fn generate_representatives<R: Rng + ?Sized>(
    s: &BlockStructure,
    m_count: usize,
    d: SelectionThresholds,
    rng: &mut R,
    max_attempts: u64,
) -> Result<Vec<EcRepresentative>> {
    if m_count == 0 {
        return Err(Error::InvalidConfig(
            "ensemble size must be at least 1".into(),
        ));
    }
    let available = ec_count(s)?;
    if BigUint::from(m_count) > available {
        return Err(Error::TooManyClasses {
            requested: m_count,
            available,
        });
    }
    let bits = upper_bit_count(s);
    let mut reps = vec![EcRepresentative::identity(s)];
    let mut attempts = 0u64;
    while reps.len() < m_count {
        if attempts == max_attempts {
            return Err(Error::SelectionExhausted { attempts });
        }
        attempts += 1;
        let mut p_vec: Vec<usize> = (0..s.n()).collect();
        for (offset, size) in s.blocks() {
            // Fisher-Yates within the block.
            for i in (1..size).rev() {
                let j = rng.random_range(0..=i);
                p_vec.swap(offset + i, offset + j);
            }
        }
        let u_vec: Vec<bool> = (0..bits).map(|_| rng.random::<bool>()).collect();
        let candidate = EcRepresentative::from_vectors(s, p_vec, u_vec)?;
        let admissible = reps.iter().all(|r| {
            hamming_distance(&candidate.u_vec, &r.u_vec).expect("equal length by construction")
                >= d.d_u
                && hamming_distance(&candidate.p_vec, &r.p_vec)
                    .expect("equal length by construction")
                    >= d.d_p
                && !same_ec(&candidate.transform, &r.transform)
        });
        if admissible {
            reps.push(candidate);
        }
    }
    Ok(reps)
}
