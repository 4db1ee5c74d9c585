//! Code construction: bit-channel reliability ranking by density evolution
//! under the Gaussian approximation, and a design loop that trades the
//! least-reliable information positions for a prescribed block structure of
//! the automorphism group.

use crate::error::{Error, Result};
use crate::gf2::BlockStructure;
use crate::monomial::MonomialSet;

/// Bit-channel ranking for one design SNR, most reliable first.
#[derive(Clone, Debug)]
pub struct ReliabilityList {
    order: Vec<usize>,
    design_snr_db: f64,
}

impl ReliabilityList {
    /// Indices sorted by descending mean LLR (ties: lower index first).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn design_snr_db(&self) -> f64 {
        self.design_snr_db
    }
}

/// ln φ(x) for the Gaussian-approximation reliability function
/// φ(x) = 1 − E[tanh(L/2)] under L ~ N(x, 2x), using the standard fit
/// exp(0.0218 − 0.4527·x^0.86) below 10 and the asymptotic
/// sqrt(π/x)·exp(−x/4)·(1 − 10/(7x)) above. Only meaningful for x large
/// enough that φ < 1; tiny x goes through [`ln_tanh_mean`] instead.
fn ln_phi(x: f64) -> f64 {
    if x <= 10.0 {
        0.0218 - 0.4527 * x.powf(0.86)
    } else {
        0.5 * (std::f64::consts::PI / x).ln() - 0.25 * x + (-10.0 / (7.0 * x)).ln_1p()
    }
}

/// Inverse of ln φ: closed form on the low branch, bisection (ln φ is
/// strictly decreasing) on the asymptotic branch.
fn ln_phi_inv(ln_y: f64) -> f64 {
    if ln_y >= ln_phi(10.0) {
        return ((0.0218 - ln_y) / 0.4527).powf(1.0 / 0.86);
    }
    let mut lo = 10.0;
    let mut hi = 20.0;
    while ln_phi(hi) > ln_y {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ln_phi(mid) > ln_y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Boundary below which the φ fit misbehaves (it reaches 1 at x ≈ 0.0294,
/// collapsing every worse channel onto a spurious fixed point); means below
/// it use a dedicated small-x piece of E[tanh(L/2)].
const X_SMALL: f64 = 0.3;
/// Decay constant of the small-x piece (x/2)·exp(−c·x), chosen so the piece
/// meets 1 − exp(ln_phi(x)) at `X_SMALL`.
const C_SMALL: f64 = 0.484_106_834_406_314_13;

/// ln E[tanh(L/2)] = ln(1 − φ), valid over the whole positive axis: the
/// small-x piece has the exact x/2 leading behavior, so the check-node rule
/// keeps degrading bad channels instead of pinning them to a fixed point.
fn ln_tanh_mean(x: f64) -> f64 {
    if x < X_SMALL {
        (0.5 * x).ln() - C_SMALL * x
    } else {
        (-ln_phi(x).exp_m1()).ln()
    }
}

/// Mean LLR after combining two independent branches of mean `m` through a
/// check node. The GA combining rule is E[tanh] → E[tanh]², i.e.
/// 1 − φ_c = (1 − φ)²; it is evaluated in whichever log domain keeps
/// precision: ln φ for near-perfect channels, ln E[tanh] otherwise.
fn check_node(m: f64) -> f64 {
    let lp = ln_phi(m);
    if lp < -36.0 {
        // 1 − φ rounds to 1; φ_c = φ·(2 − φ) ≈ 2φ to full precision.
        return ln_phi_inv(lp + std::f64::consts::LN_2);
    }
    let target = 2.0 * ln_tanh_mean(m);
    if target >= ln_tanh_mean(X_SMALL) {
        ln_phi_inv((-target.exp_m1()).ln())
    } else {
        // Invert ln(x/2) − c·x = target, increasing in w = ln x; the root
        // satisfies x ≥ 2·e^target, which brackets it from below.
        let mut lo = target + std::f64::consts::LN_2;
        let mut hi = X_SMALL.ln();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid - std::f64::consts::LN_2 - C_SMALL * mid.exp() < target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 {
                break;
            }
        }
        (0.5 * (lo + hi)).exp()
    }
}

/// Mean LLRs of all bit-channels of length `len` at the given design SNR
/// (Es/N0 in dB): starting from the channel mean 2/σ², each polarization
/// level maps a mean m to (check(m), 2m), so entry i applies the index bits
/// of i most-significant first.
pub fn bit_channel_means(len: usize, snr_db: f64) -> Vec<f64> {
    assert!(len.is_power_of_two() && len >= 2, "length must be a power of two");
    let sigma2 = 1.0 / (2.0 * 10f64.powf(snr_db / 10.0));
    let mut means = vec![2.0 / sigma2];
    for _ in 0..len.trailing_zeros() {
        means = means
            .iter()
            .flat_map(|&m| [check_node(m), 2.0 * m])
            .collect();
    }
    means
}

/// Rank the bit-channels of length `len` at the given design SNR, most
/// reliable first; deterministic (equal means break toward lower index).
pub fn dega_reliability(len: usize, snr_db: f64) -> ReliabilityList {
    let means = bit_channel_means(len, snr_db);
    let mut order: Vec<usize> = (0..len).collect();
    order.sort_by(|&a, &b| {
        means[b]
            .partial_cmp(&means[a])
            .expect("mean LLRs are finite")
            .then(a.cmp(&b))
    });
    ReliabilityList {
        order,
        design_snr_db: snr_db,
    }
}

/// Design-SNR sweep for [`design`]: from `min_db` to `max_db` in steps of
/// `step_db`.
#[derive(Clone, Copy, Debug)]
pub struct SnrSweep {
    pub min_db: f64,
    pub step_db: f64,
    pub max_db: f64,
}

impl SnrSweep {
    /// Default sweep: 0.25 dB steps over a 4 dB window above `min_db`.
    pub fn starting_at(min_db: f64) -> Self {
        SnrSweep {
            min_db,
            step_db: 0.25,
            max_db: min_db + 4.0,
        }
    }
}

fn binomial_sum(n: usize, d_max: usize) -> u64 {
    let mut total = 0u64;
    let mut c = 1u64; // C(n, 0)
    for k in 0..=d_max.min(n) {
        total += c;
        c = c * (n - k) as u64 / (k + 1) as u64;
    }
    total
}

enum Attempt {
    Success(MonomialSet),
    Decrement,
    NextSnr,
}

/// One inner-loop pass: seed with the `k_s` most reliable positions, then
/// free every column of every requested block.
fn attempt(
    n: usize,
    dim: usize,
    s: &BlockStructure,
    order: &[usize],
    k_s: usize,
) -> Attempt {
    // The raw reliability prefix need not respect the partial order; close
    // it downward so the freeing loop starts from a decreasing set.
    let seed = MonomialSet::from_indices(n, &order[..k_s])
        .expect("reliability order indices are in range")
        .downward_closure();
    if seed.len() > dim {
        return Attempt::Decrement;
    }
    let d_max = seed.max_degree().expect("seed is nonempty for k_s >= 1");
    // Freeing substitutes variables within monomials, so it never raises the
    // maximum degree; if all degrees up to d_max cannot fill the dimension,
    // no smaller seed can either and only a new SNR can change the outcome.
    if binomial_sum(n, d_max) < dim as u64 {
        return Attempt::NextSnr;
    }

    let mut g = seed;
    for (offset, size) in s.blocks() {
        for col in offset..offset + size {
            let aux = match g.compute_aux() {
                Ok(aux) => aux,
                Err(_) => return Attempt::Decrement,
            };
            for row in offset..offset + size {
                if row != col {
                    for &m in aux.cell(row, col) {
                        g.insert(m);
                    }
                }
            }
        }
        if g.len() > dim {
            return Attempt::Decrement;
        }
    }
    if g.len() == dim
        && g.is_decreasing()
        && g.block_structure().map_or(false, |found| found.admits(s))
    {
        Attempt::Success(g)
    } else {
        Attempt::Decrement
    }
}

/// Design a code of length `len` and dimension `dim` whose automorphism
/// group contains BLTA(`s`).
///
/// Sweeps the design SNR upward; at each SNR, decrements the seed size k_s
/// from `dim` − 1, seeds with the k_s most reliable positions, frees the
/// requested blocks column by column (recomputing the auxiliary matrix
/// after every column), and returns the first seed whose freed set hits the
/// dimension exactly. Deterministic; fails once the sweep is exhausted.
pub fn design(
    len: usize,
    dim: usize,
    s: &BlockStructure,
    sweep: SnrSweep,
) -> Result<MonomialSet> {
    if !len.is_power_of_two() || len < 2 {
        return Err(Error::InvalidConfig(format!(
            "code length must be a power of two >= 2, got {len}"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if s.n() != n {
        return Err(Error::BlockSumMismatch {
            sizes: s.sizes().to_vec(),
            sum: s.n(),
            expected: n,
        });
    }
    if dim == 0 || dim >= len {
        return Err(Error::InvalidConfig(format!(
            "dimension must satisfy 0 < K < N, got K={dim}, N={len}"
        )));
    }
    if !(sweep.step_db > 0.0) || sweep.max_db < sweep.min_db {
        return Err(Error::InvalidConfig(format!(
            "invalid SNR sweep: {sweep:?}"
        )));
    }

    let mut snr = sweep.min_db;
    while snr <= sweep.max_db + 1e-9 {
        let rel = dega_reliability(len, snr);
        let mut k_s = dim - 1;
        while k_s >= 1 {
            match attempt(n, dim, s, rel.order(), k_s) {
                Attempt::Success(g) => return Ok(g),
                Attempt::Decrement => k_s -= 1,
                Attempt::NextSnr => break,
            }
        }
        snr += sweep.step_db;
    }
    Err(Error::DesignFailure {
        len,
        dim,
        snr_max_db: sweep.max_db,
    })
}

/// A fully specified code: length, information set, detected automorphism
/// block structure, and the CRC length carried inside the information bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeProfile {
    n: usize,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
    structure: BlockStructure,
    crc_bits: usize,
}

impl CodeProfile {
    pub fn from_monomials(g: &MonomialSet, crc_bits: usize) -> Result<Self> {
        if g.is_empty() {
            return Err(Error::EmptyMonomialSet);
        }
        if !g.is_decreasing() {
            return Err(Error::NotDecreasing);
        }
        if crc_bits >= g.len() {
            return Err(Error::InvalidConfig(format!(
                "{crc_bits} CRC bits leave no payload in a K={} code",
                g.len()
            )));
        }
        let structure = g.block_structure()?;
        let n = g.n();
        let info_set = g.indices();
        let mut frozen = vec![true; 1 << n];
        for &i in &info_set {
            frozen[i] = false;
        }
        Ok(CodeProfile {
            n,
            info_set,
            frozen,
            structure,
            crc_bits,
        })
    }

    pub fn from_info_indices(n: usize, info: &[usize], crc_bits: usize) -> Result<Self> {
        Self::from_monomials(&MonomialSet::from_indices(n, info)?, crc_bits)
    }

    pub fn from_frozen_indices(n: usize, frozen: &[usize], crc_bits: usize) -> Result<Self> {
        let len = 1usize << n;
        let mut is_frozen = vec![false; len];
        for &i in frozen {
            if i >= len {
                return Err(Error::InvalidConfig(format!(
                    "frozen index {i} out of range for length {len}"
                )));
            }
            is_frozen[i] = true;
        }
        let info: Vec<usize> = (0..len).filter(|&i| !is_frozen[i]).collect();
        Self::from_info_indices(n, &info, crc_bits)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Code length N = 2^n.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    /// Code dimension K (CRC bits included).
    pub fn dim(&self) -> usize {
        self.info_set.len()
    }

    /// Number of payload bits carried per frame: K minus the CRC length.
    pub fn payload_len(&self) -> usize {
        self.info_set.len() - self.crc_bits
    }

    pub fn crc_bits(&self) -> usize {
        self.crc_bits
    }

    /// Effective rate used for Eb/N0 conversion: payload bits over length,
    /// so CRC overhead is charged to the code.
    pub fn rate(&self) -> f64 {
        self.payload_len() as f64 / self.len() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.frozen[i]).collect()
    }

    pub fn is_frozen(&self, z: usize) -> bool {
        self.frozen[z]
    }

    /// Frozen indicator for every index, `true` meaning frozen.
    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    pub fn structure(&self) -> &BlockStructure {
        &self.structure
    }

    pub fn info_monomials(&self) -> MonomialSet {
        MonomialSet::from_indices(self.n, &self.info_set)
            .expect("stored info set is valid by construction")
    }
}
