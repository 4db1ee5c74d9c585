//! Polar encoding and decoding: successive cancellation (SC), SC list with
//! optional CRC-aided selection, and the automorphism-ensemble wrapper that
//! runs SC under several code automorphisms and keeps the candidate closest
//! to the received frame.
//!
//! All decoders work on log-likelihood ratios with positive values favouring
//! bit 0.  Candidate selection and the ML lower bound share one metric: the
//! squared Euclidean distance between the LLR frame and the ±1 image of a
//! codeword, which orders candidates exactly like correlation and therefore
//! like maximum likelihood.

use crate::autgroup::{apply_affine, EcRepresentative};
use crate::construct::CodeProfile;
use crate::error::{Error, Result};
use crate::gf2::AffineTransform;

/// One received frame of log-likelihood ratios, natural log, positive
/// favouring bit 0.
///
/// # Panics
///
/// [`LlrFrame::new`] panics on non-finite entries: every decoder here
/// assumes finite inputs, and catching an infinity at the boundary beats
/// chasing a NaN path metric later.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    values: Vec<f64>,
}

impl LlrFrame {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(
            values.iter().all(|v| v.is_finite()),
            "LLR frames must be finite"
        );
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Outcome of one decoding attempt.  `info_bits` is the payload only: when
/// the profile carries a CRC, the checksum bits are stripped.  `branch`
/// identifies the winning automorphism in an ensemble and is 0 for plain
/// decoders.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub codeword: Vec<bool>,
    pub info_bits: Vec<bool>,
    pub metric: f64,
    pub branch: usize,
}

/// In-place multiplication by the transform matrix: `bits ← bits · T_N`,
/// so entry `j` becomes the parity of the input over all supersets of `j`.
/// The matrix is an involution, so applying this twice restores the input.
///
/// # Panics
///
/// Panics unless the length is a power of two.
pub fn polar_transform(bits: &mut [bool]) {
    let len = bits.len();
    assert!(len.is_power_of_two(), "transform length must be 2^n");
    let mut h = 1;
    while h < len {
        for z in 0..len {
            if z & h == 0 {
                bits[z] ^= bits[z | h];
            }
        }
        h <<= 1;
    }
}

/// Encodes a payload: CRC attached when the profile asks for one, frozen
/// positions zero, information bits placed on the profile's information set
/// in ascending index order, then the transform.
pub fn encode(payload: &[bool], profile: &CodeProfile) -> Result<Vec<bool>> {
    if payload.len() != profile.payload_len() {
        return Err(Error::DimensionMismatch {
            left: payload.len(),
            right: profile.payload_len(),
        });
    }
    let info = match profile.crc_bits() {
        0 => payload.to_vec(),
        6 => crc6_attach(payload)?,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unsupported CRC length {other}, only 6-bit CRC is implemented"
            )))
        }
    };
    let mut u = vec![false; profile.len()];
    for (bit, &z) in info.iter().zip(profile.info_set()) {
        u[z] = *bit;
    }
    polar_transform(&mut u);
    Ok(u)
}

// Feedback taps of the CRC generator x^6 + x^5 + 1: the x^5 and x^0
// coefficients folded back into a six-bit register.
const CRC6_TAPS: u8 = 0b10_0001;

fn crc6_register(bits: impl Iterator<Item = bool>) -> u8 {
    let mut reg = 0u8;
    for bit in bits {
        let feedback = bit ^ (reg >> 5 & 1 == 1);
        reg = (reg << 1) & 0x3F;
        if feedback {
            reg ^= CRC6_TAPS;
        }
    }
    reg
}

/// Appends the six CRC bits (most significant first) to a payload.
pub fn crc6_attach(payload: &[bool]) -> Result<Vec<bool>> {
    if payload.is_empty() {
        return Err(Error::InvalidConfig(
            "cannot attach a CRC to an empty payload".into(),
        ));
    }
    let reg = crc6_register(payload.iter().copied());
    let mut out = payload.to_vec();
    out.extend((0..6).rev().map(|k| reg >> k & 1 == 1));
    Ok(out)
}

/// Verifies a payload-plus-CRC word: true when the remainder is zero.
/// Inputs too short to contain a payload and a checksum are rejected.
pub fn crc6_check(bits: &[bool]) -> bool {
    bits.len() > 6 && crc6_register(bits.iter().copied()) == 0
}

/// Check-node LLR combination.  The default build uses the exact rule; the
/// `min-sum` feature drops the correction terms.
fn boxplus(a: f64, b: f64) -> f64 {
    let sign = if (a < 0.0) ^ (b < 0.0) { -1.0 } else { 1.0 };
    let approx = sign * a.abs().min(b.abs());
    #[cfg(feature = "min-sum")]
    {
        approx
    }
    #[cfg(not(feature = "min-sum"))]
    {
        approx + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
    }
}

/// Variable-node update once the left half is decided: `(1-2u)·a + b`.
fn partial_sum(a: f64, b: f64, bit: bool) -> f64 {
    if bit {
        b - a
    } else {
        b + a
    }
}

/// Recursive SC over one segment.  `pos` tracks the absolute leaf index so
/// frozen decisions line up with the profile; decisions are appended to `u`
/// in natural order and the segment's re-encoded codeword is returned.
fn sc_segment(llr: &[f64], pos: &mut usize, frozen: &[bool], u: &mut Vec<bool>) -> Vec<bool> {
    let len = llr.len();
    if len == 1 {
        let bit = if frozen[*pos] { false } else { llr[0] < 0.0 };
        *pos += 1;
        u.push(bit);
        return vec![bit];
    }
    let half = len / 2;
    let left_llr: Vec<f64> = (0..half).map(|i| boxplus(llr[i], llr[i + half])).collect();
    let left = sc_segment(&left_llr, pos, frozen, u);
    let right_llr: Vec<f64> = (0..half)
        .map(|i| partial_sum(llr[i], llr[i + half], left[i]))
        .collect();
    let right = sc_segment(&right_llr, pos, frozen, u);
    let mut out: Vec<bool> = (0..half).map(|i| left[i] ^ right[i]).collect();
    out.extend_from_slice(&right);
    out
}

/// Squared Euclidean distance between an LLR frame and the BPSK image
/// (`0 ↦ +1`, `1 ↦ −1`) of a codeword.  Lower is closer; the ordering it
/// induces over codewords is the maximum-likelihood ordering.
pub fn least_squares_metric(llr: &LlrFrame, codeword: &[bool]) -> f64 {
    assert_eq!(llr.len(), codeword.len(), "frame and codeword lengths differ");
    llr.values
        .iter()
        .zip(codeword)
        .map(|(&v, &bit)| {
            let s = if bit { -1.0 } else { 1.0 };
            (v - s) * (v - s)
        })
        .sum()
}

fn payload_of(u: &[bool], profile: &CodeProfile) -> Vec<bool> {
    profile
        .info_set()
        .iter()
        .take(profile.payload_len())
        .map(|&z| u[z])
        .collect()
}

/// Plain successive cancellation.
///
/// # Panics
///
/// Panics when the frame length differs from the profile's.
pub fn sc_decode(llr: &LlrFrame, profile: &CodeProfile) -> DecodeResult {
    assert_eq!(llr.len(), profile.len(), "frame length must match the code");
    let mut u = Vec::with_capacity(profile.len());
    let codeword = sc_segment(llr.values(), &mut 0, profile.frozen_mask(), &mut u);
    let metric = least_squares_metric(llr, &codeword);
    DecodeResult {
        info_bits: payload_of(&u, profile),
        codeword,
        metric,
        branch: 0,
    }
}

/// SC under an automorphism: permute the frame by `t`, decode, and permute
/// the codeword estimate back.  The metric is computed against the original
/// frame, so results of different automorphisms are directly comparable.
///
/// Fails with [`Error::NotAutomorphism`] when the de-permuted word violates
/// a frozen constraint, which is how a non-automorphism `t` manifests at
/// runtime (a true automorphism always maps codewords to codewords).
pub fn asc_decode(llr: &LlrFrame, profile: &CodeProfile, t: &AffineTransform) -> Result<DecodeResult> {
    assert_eq!(llr.len(), profile.len(), "frame length must match the code");
    if t.n() != profile.n() {
        return Err(Error::DimensionMismatch {
            left: t.n(),
            right: profile.n(),
        });
    }
    let permuted = apply_affine(llr.values(), t);
    let mut u_permuted = Vec::with_capacity(profile.len());
    let inner = sc_segment(&permuted, &mut 0, profile.frozen_mask(), &mut u_permuted);
    let codeword = apply_affine(&inner, &t.inverse());
    let mut u = codeword.clone();
    polar_transform(&mut u);
    if profile.frozen_set().iter().any(|&z| u[z]) {
        return Err(Error::NotAutomorphism);
    }
    let metric = least_squares_metric(llr, &codeword);
    Ok(DecodeResult {
        info_bits: payload_of(&u, profile),
        codeword,
        metric,
        branch: 0,
    })
}

/// Automorphism-ensemble decoding: one SC pass per representative, then the
/// candidate with the smallest least-squares metric wins; ties go to the
/// lowest branch index.
pub fn ae_decode(
    llr: &LlrFrame,
    profile: &CodeProfile,
    reps: &[EcRepresentative],
) -> Result<DecodeResult> {
    if reps.is_empty() {
        return Err(Error::InvalidConfig(
            "automorphism ensemble needs at least one representative".into(),
        ));
    }
    let mut best: Option<DecodeResult> = None;
    for (branch, rep) in reps.iter().enumerate() {
        let mut candidate = asc_decode(llr, profile, rep.transform())?;
        candidate.branch = branch;
        if best.as_ref().is_none_or(|b| candidate.metric < b.metric) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one branch ran"))
}

/// Path-metric penalty for deciding `bit` against LLR `lambda`:
/// `ln(1 + exp(−(1−2·bit)·λ))` in the exact build, the usual clipped
/// magnitude under `min-sum`.
fn penalty(lambda: f64, bit: bool) -> f64 {
    let aligned = if bit { -lambda } else { lambda };
    #[cfg(feature = "min-sum")]
    {
        (-aligned).max(0.0)
    }
    #[cfg(not(feature = "min-sum"))]
    {
        softplus(-aligned)
    }
}

#[cfg(not(feature = "min-sum"))]
fn softplus(x: f64) -> f64 {
    // Beyond 34 the correction term falls below f64 resolution.
    if x > 34.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Clone)]
struct Path {
    pm: f64,
    // Stack discipline shared by both stacks: entering a segment, its LLRs
    // sit on top of `llr_stack`; on return they are popped and the decoded
    // segment codeword is pushed onto `cw_stack`.
    llr_stack: Vec<Vec<f64>>,
    cw_stack: Vec<Vec<bool>>,
    u: Vec<bool>,
}

/// One SC recursion step shared by all surviving paths, forking and pruning
/// at information leaves.  Pruning sorts by path metric with a stable tie
/// rule (parent order, bit 0 before bit 1), which keeps the whole decoder
/// deterministic and makes L=1 coincide with plain SC, ties included.
fn scl_segment(paths: &mut Vec<Path>, len: usize, pos: &mut usize, frozen: &[bool], l: usize) {
    if len == 1 {
        let z = *pos;
        *pos += 1;
        if frozen[z] {
            for p in paths.iter_mut() {
                let lambda = p.llr_stack.pop().expect("segment LLRs present")[0];
                p.pm += penalty(lambda, false);
                p.u.push(false);
                p.cw_stack.push(vec![false]);
            }
        } else {
            let mut forked: Vec<Path> = Vec::with_capacity(paths.len() * 2);
            for p in paths.drain(..) {
                for bit in [false, true] {
                    let mut q = p.clone();
                    let lambda = q.llr_stack.pop().expect("segment LLRs present")[0];
                    q.pm += penalty(lambda, bit);
                    q.u.push(bit);
                    q.cw_stack.push(vec![bit]);
                    forked.push(q);
                }
            }
            forked.sort_by(|a, b| a.pm.partial_cmp(&b.pm).expect("path metrics are finite"));
            forked.truncate(l);
            *paths = forked;
        }
        return;
    }
    let half = len / 2;
    for p in paths.iter_mut() {
        let seg = p.llr_stack.last().expect("segment LLRs present");
        let left: Vec<f64> = (0..half).map(|i| boxplus(seg[i], seg[i + half])).collect();
        p.llr_stack.push(left);
    }
    scl_segment(paths, half, pos, frozen, l);
    for p in paths.iter_mut() {
        let seg = p.llr_stack.last().expect("segment LLRs present");
        let cl = p.cw_stack.last().expect("left codeword present");
        let right: Vec<f64> = (0..half)
            .map(|i| partial_sum(seg[i], seg[i + half], cl[i]))
            .collect();
        p.llr_stack.push(right);
    }
    scl_segment(paths, half, pos, frozen, l);
    for p in paths.iter_mut() {
        let right = p.cw_stack.pop().expect("right codeword present");
        let left = p.cw_stack.pop().expect("left codeword present");
        p.llr_stack.pop();
        let mut out: Vec<bool> = (0..half).map(|i| left[i] ^ right[i]).collect();
        out.extend_from_slice(&right);
        p.cw_stack.push(out);
    }
}

/// Successive-cancellation list decoding.  With `crc_aided` the best-metric
/// path whose information word passes the CRC wins; if none passes, the
/// best-metric path is returned as-is.
pub fn scl_decode(
    llr: &LlrFrame,
    profile: &CodeProfile,
    l: usize,
    crc_aided: bool,
) -> Result<DecodeResult> {
    if l == 0 {
        return Err(Error::InvalidConfig("list size must be at least 1".into()));
    }
    if crc_aided && profile.crc_bits() == 0 {
        return Err(Error::InvalidConfig(
            "CRC-aided selection needs a profile with CRC bits".into(),
        ));
    }
    assert_eq!(llr.len(), profile.len(), "frame length must match the code");
    let mut paths = vec![Path {
        pm: 0.0,
        llr_stack: vec![llr.values().to_vec()],
        cw_stack: Vec::new(),
        u: Vec::new(),
    }];
    scl_segment(
        &mut paths,
        profile.len(),
        &mut 0,
        profile.frozen_mask(),
        l,
    );
    let mut order: Vec<usize> = (0..paths.len()).collect();
    order.sort_by(|&a, &b| {
        paths[a]
            .pm
            .partial_cmp(&paths[b].pm)
            .expect("path metrics are finite")
    });
    let info_of = |p: &Path| -> Vec<bool> {
        profile.info_set().iter().map(|&z| p.u[z]).collect()
    };
    let mut winner = order[0];
    if crc_aided {
        if let Some(&passing) = order.iter().find(|&&i| crc6_check(&info_of(&paths[i]))) {
            winner = passing;
        }
    }
    let path = &paths[winner];
    let codeword = path.cw_stack.last().expect("full codeword present").clone();
    let metric = least_squares_metric(llr, &codeword);
    Ok(DecodeResult {
        info_bits: payload_of(&path.u, profile),
        codeword,
        metric,
        branch: 0,
    })
}

/// True when a block error would have survived even under maximum-likelihood
/// decoding: the decoder's output differs from the transmitted codeword and
/// sits strictly closer to the received frame.  Counting only these events
/// yields a lower bound on the ML block error rate.
pub fn ml_bound_event(llr: &LlrFrame, transmitted: &[bool], decoded: &[bool]) -> bool {
    decoded != transmitted
        && least_squares_metric(llr, decoded) < least_squares_metric(llr, transmitted)
}
