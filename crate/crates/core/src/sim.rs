//! Monte-Carlo evaluation over the BPSK-AWGN channel: frame generation,
//! block-error-rate runs with an ML lower bound, and the text formats the
//! CLI uses for code profiles, representative lists, and result tables.
//!
//! Reproducibility is a hard requirement here: every frame draws from its
//! own counter-derived substream of a seeded generator, and stopping
//! decisions are taken on fixed-size batches, so a run is bit-identical
//! across repetitions and thread counts.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::autgroup::{upper_bit_count, EcRepresentative};
use crate::construct::CodeProfile;
use crate::decode::{
    ae_decode, encode, ml_bound_event, sc_decode, scl_decode, DecodeResult, LlrFrame,
};
use crate::error::{Error, Result};
use crate::gf2::BlockStructure;

/// BPSK-AWGN operating point.  The noise level follows the Eb/N0
/// convention with the payload rate (CRC overhead charged to the code):
/// `σ = sqrt(1 / (2 · rate · 10^(EbN0/10)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    ebn0_db: f64,
    rate: f64,
    sigma: f64,
}

impl ChannelConfig {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) || !ebn0_db.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "invalid channel point: rate {rate}, Eb/N0 {ebn0_db} dB"
            )));
        }
        let sigma = (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt();
        Ok(Self {
            ebn0_db,
            rate,
            sigma,
        })
    }

    pub fn ebn0_db(&self) -> f64 {
        self.ebn0_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Modulates a codeword to ±1 (bit 0 ↦ +1), adds white Gaussian noise, and
/// returns the channel LLRs `2y/σ²`.
pub fn transmit<R: Rng + ?Sized>(codeword: &[bool], cfg: &ChannelConfig, rng: &mut R) -> LlrFrame {
    let sigma = cfg.sigma;
    let values = codeword
        .iter()
        .map(|&bit| {
            let s = if bit { -1.0 } else { 1.0 };
            let noise: f64 = StandardNormal.sample(rng);
            2.0 * (s + sigma * noise) / (sigma * sigma)
        })
        .collect();
    LlrFrame::new(values)
}

/// Which decoder a simulation run drives.
#[derive(Debug, Clone)]
pub enum DecoderConfig {
    Sc,
    Scl { list_size: usize },
    CaScl { list_size: usize },
    Ae { reps: Vec<EcRepresentative> },
}

impl DecoderConfig {
    fn decode(&self, llr: &LlrFrame, profile: &CodeProfile) -> Result<DecodeResult> {
        match self {
            DecoderConfig::Sc => Ok(sc_decode(llr, profile)),
            DecoderConfig::Scl { list_size } => scl_decode(llr, profile, *list_size, false),
            DecoderConfig::CaScl { list_size } => scl_decode(llr, profile, *list_size, true),
            DecoderConfig::Ae { reps } => ae_decode(llr, profile, reps),
        }
    }
}

/// Per-point stopping rule: simulate until `min_errors` frame errors have
/// been observed or `max_frames` frames are spent, whichever comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_errors: u64,
    pub max_frames: u64,
}

impl StopRule {
    /// 100 errors or 10⁶ frames: roughly ±20% relative accuracy down to
    /// block error rates of 10⁻⁴ at desk-scale runtime.
    pub const DEFAULT: StopRule = StopRule {
        min_errors: 100,
        max_frames: 1_000_000,
    };
}

/// One Monte-Carlo measurement point.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub ebn0_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bler: f64,
    pub ml_bound_bler: f64,
    pub seed: u64,
}

/// Frames are counted in batches of this size; stopping is decided only on
/// batch boundaries so the simulated frame set never depends on how the
/// batch was scheduled across threads.
const BATCH: u64 = 256;

/// Estimates block error rate and its ML lower bound for each Eb/N0 point.
///
/// Every frame draws a fresh payload and noise realization from a ChaCha
/// substream indexed by `(point, frame)`, making runs reproducible from the
/// seed alone, independent of thread count.
pub fn run_bler(
    profile: &CodeProfile,
    decoder: &DecoderConfig,
    ebn0_list: &[f64],
    stop: StopRule,
    seed: u64,
) -> Result<Vec<SimResult>> {
    if ebn0_list.is_empty() {
        return Err(Error::InvalidConfig("no Eb/N0 points requested".into()));
    }
    if stop.min_errors == 0 || stop.max_frames == 0 {
        return Err(Error::InvalidConfig(
            "stop rule must allow at least one error and one frame".into(),
        ));
    }
    let mut results = Vec::with_capacity(ebn0_list.len());
    for (point, &ebn0_db) in ebn0_list.iter().enumerate() {
        let cfg = ChannelConfig::new(ebn0_db, profile.rate())?;
        let mut frames = 0u64;
        let mut frame_errors = 0u64;
        let mut ml_errors = 0u64;
        while frame_errors < stop.min_errors && frames < stop.max_frames {
            let batch = BATCH.min(stop.max_frames - frames);
            let outcomes: Result<Vec<(bool, bool)>> = (frames..frames + batch)
                .into_par_iter()
                .map(|frame| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream((point as u64) << 40 | frame);
                    let payload: Vec<bool> =
                        (0..profile.payload_len()).map(|_| rng.random()).collect();
                    let codeword = encode(&payload, profile)?;
                    let llr = transmit(&codeword, &cfg, &mut rng);
                    let decoded = decoder.decode(&llr, profile)?;
                    let error = decoded.info_bits != payload;
                    let ml = ml_bound_event(&llr, &codeword, &decoded.codeword);
                    Ok((error, ml))
                })
                .collect();
            for (error, ml) in outcomes? {
                frame_errors += error as u64;
                ml_errors += ml as u64;
            }
            frames += batch;
        }
        results.push(SimResult {
            ebn0_db,
            frames,
            frame_errors,
            bler: frame_errors as f64 / frames as f64,
            ml_bound_bler: ml_errors as f64 / frames as f64,
            seed,
        });
    }
    Ok(results)
}

/// Writes results as CSV with exactly these columns:
/// `ebn0_db,frames,errors,bler,ml_bound_bler,seed`.
pub fn write_csv<W: Write>(results: &[SimResult], writer: &mut W) -> Result<()> {
    writeln!(writer, "ebn0_db,frames,errors,bler,ml_bound_bler,seed")?;
    for r in results {
        writeln!(
            writer,
            "{},{},{},{},{},{}",
            r.ebn0_db, r.frames, r.frame_errors, r.bler, r.ml_bound_bler, r.seed
        )?;
    }
    Ok(())
}

const PROFILE_MAGIC: &str = "# polar-ae profile v1";
const REPS_MAGIC: &str = "# polar-ae representatives v1";

/// Serializes a profile: versioned comment, key-value header, then the
/// frozen indices in ascending order.
pub fn write_profile<W: Write>(profile: &CodeProfile, writer: &mut W) -> Result<()> {
    writeln!(writer, "{PROFILE_MAGIC}")?;
    writeln!(writer, "n = {}", profile.n())?;
    writeln!(writer, "K = {}", profile.dim())?;
    writeln!(writer, "crc_bits = {}", profile.crc_bits())?;
    writeln!(writer, "structure = {}", profile.structure())?;
    for chunk in profile.frozen_set().chunks(16) {
        let line = chunk
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

/// Reads a profile written by [`write_profile`], recomputing the block
/// structure from the information set and cross-checking every header field.
pub fn read_profile<R: BufRead>(reader: R) -> Result<CodeProfile> {
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(first)) if first.trim() == PROFILE_MAGIC => {}
        _ => return Err(Error::Parse("not a v1 profile file".into())),
    }
    let mut n: Option<usize> = None;
    let mut dim: Option<usize> = None;
    let mut crc_bits = 0usize;
    let mut structure: Option<BlockStructure> = None;
    let mut frozen: Vec<usize> = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            let value = value.trim();
            match key.trim() {
                "n" => n = Some(parse_usize(value)?),
                "K" => dim = Some(parse_usize(value)?),
                "crc_bits" => crc_bits = parse_usize(value)?,
                "structure" => structure = Some(value.parse()?),
                other => return Err(Error::Parse(format!("unknown profile key {other:?}"))),
            }
        } else {
            for tok in line.split_whitespace() {
                frozen.push(parse_usize(tok)?);
            }
        }
    }
    let n = n.ok_or_else(|| Error::Parse("profile missing n".into()))?;
    let profile = CodeProfile::from_frozen_indices(n, &frozen, crc_bits)?;
    if let Some(k) = dim {
        if k != profile.dim() {
            return Err(Error::Parse(format!(
                "header says K = {k} but the frozen set leaves {} information bits",
                profile.dim()
            )));
        }
    }
    if let Some(s) = structure {
        if &s != profile.structure() {
            return Err(Error::Parse(format!(
                "header structure {} does not match the detected {}",
                s,
                profile.structure()
            )));
        }
    }
    Ok(profile)
}

fn parse_usize(tok: &str) -> Result<usize> {
    tok.trim()
        .parse::<usize>()
        .map_err(|_| Error::Parse(format!("bad integer {tok:?}")))
}

/// Serializes representatives: versioned comment, the block structure, then
/// one line per representative holding the permutation images and the
/// upper-triangular bits separated by `|`.
pub fn write_representatives<W: Write>(
    s: &BlockStructure,
    reps: &[EcRepresentative],
    writer: &mut W,
) -> Result<()> {
    writeln!(writer, "{REPS_MAGIC}")?;
    writeln!(writer, "structure = {}", s)?;
    for rep in reps {
        let p = rep
            .p_vec()
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        let u: String = rep
            .u_vec()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        if u.is_empty() {
            writeln!(writer, "{p} |")?;
        } else {
            writeln!(writer, "{p} | {u}")?;
        }
    }
    Ok(())
}

/// Reads a representative file written by [`write_representatives`],
/// rebuilding each transform from its vectors.
pub fn read_representatives<R: BufRead>(reader: R) -> Result<(BlockStructure, Vec<EcRepresentative>)> {
    let mut lines = reader.lines();
    match lines.next() {
        Some(Ok(first)) if first.trim() == REPS_MAGIC => {}
        _ => return Err(Error::Parse("not a v1 representative file".into())),
    }
    let mut structure: Option<BlockStructure> = None;
    let mut reps = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            if key.trim() == "structure" {
                structure = Some(value.parse()?);
                continue;
            }
            return Err(Error::Parse(format!("unknown key {:?}", key.trim())));
        }
        let s = structure
            .as_ref()
            .ok_or_else(|| Error::Parse("representative before structure line".into()))?;
        let (p_part, u_part) = line
            .split_once('|')
            .ok_or_else(|| Error::Parse(format!("missing | separator in {line:?}")))?;
        let p_vec: Vec<usize> = p_part
            .split_whitespace()
            .map(parse_usize)
            .collect::<Result<_>>()?;
        let u_text = u_part.trim();
        let u_vec: Vec<bool> = u_text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("bad bit {other:?}"))),
            })
            .collect::<Result<_>>()?;
        if u_vec.len() != upper_bit_count(s) {
            return Err(Error::Parse(format!(
                "expected {} upper bits, found {}",
                upper_bit_count(s),
                u_vec.len()
            )));
        }
        reps.push(EcRepresentative::from_vectors(s, p_vec, u_vec)?);
    }
    let structure = structure.ok_or_else(|| Error::Parse("missing structure line".into()))?;
    Ok((structure, reps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autgroup::{generate_representatives, SelectionThresholds};
    use crate::construct::{design, SnrSweep};
    use crate::monomial::reed_muller_set;

    fn rm_16_5() -> CodeProfile {
        CodeProfile::from_monomials(&reed_muller_set(1, 4), 0).unwrap()
    }

    fn designed_32_23() -> CodeProfile {
        let s = BlockStructure::new(vec![3, 2]).unwrap();
        let g = design(32, 23, &s, SnrSweep::starting_at(2.0)).unwrap();
        CodeProfile::from_monomials(&g, 0).unwrap()
    }

    #[test]
    fn channel_noise_level_follows_the_ebn0_convention() {
        let cfg = ChannelConfig::new(2.0, 0.5).unwrap();
        let expected = (1.0 / (2.0 * 0.5 * 10f64.powf(0.2))).sqrt();
        assert!((cfg.sigma() - expected).abs() < 1e-15);
        assert!(ChannelConfig::new(1.0, 0.0).is_err());
        assert!(ChannelConfig::new(1.0, 1.5).is_err());
        assert!(ChannelConfig::new(f64::INFINITY, 0.5).is_err());
    }

    #[test]
    fn transmit_signs_match_the_codeword_at_high_snr() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0051);
        let cfg = ChannelConfig::new(40.0, 0.5).unwrap();
        let codeword: Vec<bool> = (0..64).map(|_| rng.random()).collect();
        let llr = transmit(&codeword, &cfg, &mut rng);
        for (v, &bit) in llr.values().iter().zip(&codeword) {
            assert_eq!(*v < 0.0, bit);
        }
    }

    #[test]
    fn transmit_llr_statistics_match_the_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0052);
        let cfg = ChannelConfig::new(1.0, 0.5).unwrap();
        let sigma = cfg.sigma();
        let samples = 100_000;
        let codeword = vec![false; samples];
        let llr = transmit(&codeword, &cfg, &mut rng);
        let mean = llr.values().iter().sum::<f64>() / samples as f64;
        let expected = 2.0 / (sigma * sigma);
        // Per-sample standard deviation of the LLR is 2/σ.
        let bound = 3.0 * (2.0 / sigma) / (samples as f64).sqrt();
        assert!(
            (mean - expected).abs() < bound,
            "LLR mean {mean} outside {expected} ± {bound}"
        );
    }

    #[test]
    fn transmit_is_reproducible_from_the_seed() {
        let cfg = ChannelConfig::new(2.0, 0.5).unwrap();
        let codeword = vec![false; 32];
        let mut rng_a = ChaCha8Rng::seed_from_u64(0x0053);
        let mut rng_b = ChaCha8Rng::seed_from_u64(0x0053);
        assert_eq!(
            transmit(&codeword, &cfg, &mut rng_a),
            transmit(&codeword, &cfg, &mut rng_b)
        );
    }

    #[test]
    fn run_bler_rejects_degenerate_requests() {
        let profile = rm_16_5();
        let stop = StopRule {
            min_errors: 0,
            max_frames: 100,
        };
        match run_bler(&profile, &DecoderConfig::Sc, &[1.0], stop, 7) {
            Err(Error::InvalidConfig(_)) => {}
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
        match run_bler(&profile, &DecoderConfig::Sc, &[], StopRule::DEFAULT, 7) {
            Err(Error::InvalidConfig(_)) => {}
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
    }

    #[test]
    fn run_bler_is_deterministic_and_consistent() {
        let profile = rm_16_5();
        let stop = StopRule {
            min_errors: 30,
            max_frames: 4096,
        };
        let points = [0.0, 2.0];
        let a = run_bler(&profile, &DecoderConfig::Sc, &points, stop, 11).unwrap();
        let b = run_bler(&profile, &DecoderConfig::Sc, &points, stop, 11).unwrap();
        assert_eq!(a, b);
        for r in &a {
            assert!(r.frame_errors <= r.frames);
            assert!((r.bler - r.frame_errors as f64 / r.frames as f64).abs() < 1e-15);
            assert!(r.ml_bound_bler <= r.bler, "ML bound above the decoder BLER");
            assert_eq!(r.seed, 11);
        }
        // A different seed simulates different noise.
        let c = run_bler(&profile, &DecoderConfig::Sc, &points, stop, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn run_bler_does_not_depend_on_thread_count() {
        let profile = rm_16_5();
        let stop = StopRule {
            min_errors: 20,
            max_frames: 2048,
        };
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_bler(&profile, &DecoderConfig::Sc, &[1.5], stop, 5))
            .unwrap();
        let several = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(|| run_bler(&profile, &DecoderConfig::Sc, &[1.5], stop, 5))
            .unwrap();
        assert_eq!(single, several);
    }

    #[test]
    fn decoder_configs_drive_their_decoders() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0054);
        let profile = designed_32_23();
        let s = BlockStructure::new(vec![3, 2]).unwrap();
        let reps = generate_representatives(
            &s,
            4,
            SelectionThresholds { d_u: 1, d_p: 1 },
            &mut rng,
            100_000,
        )
        .unwrap();
        let stop = StopRule {
            min_errors: 10,
            max_frames: 1024,
        };
        let sc = run_bler(&profile, &DecoderConfig::Sc, &[1.0], stop, 3).unwrap();
        let scl1 = run_bler(
            &profile,
            &DecoderConfig::Scl { list_size: 1 },
            &[1.0],
            stop,
            3,
        )
        .unwrap();
        // Same frames, same decisions: SCL with L=1 is SC.
        assert_eq!(sc, scl1);
        let ae = run_bler(&profile, &DecoderConfig::Ae { reps }, &[1.0], stop, 3).unwrap();
        assert!(ae[0].frame_errors <= sc[0].frame_errors || ae[0].frames != sc[0].frames);
    }

    #[test]
    fn csv_has_the_exact_column_layout() {
        let results = vec![SimResult {
            ebn0_db: 2.0,
            frames: 512,
            frame_errors: 17,
            bler: 17.0 / 512.0,
            ml_bound_bler: 9.0 / 512.0,
            seed: 42,
        }];
        let mut buf = Vec::new();
        write_csv(&results, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "ebn0_db,frames,errors,bler,ml_bound_bler,seed"
        );
        assert_eq!(
            lines.next().unwrap(),
            format!("2,512,17,{},{},42", 17.0 / 512.0, 9.0 / 512.0)
        );
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn profile_files_roundtrip() {
        for profile in [rm_16_5(), designed_32_23()] {
            let mut buf = Vec::new();
            write_profile(&profile, &mut buf).unwrap();
            let restored = read_profile(&buf[..]).unwrap();
            assert_eq!(restored, profile);
        }
    }

    #[test]
    fn profile_reader_rejects_tampered_files() {
        let mut buf = Vec::new();
        write_profile(&rm_16_5(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        let unversioned = text.replace("v1", "v9");
        assert!(matches!(
            read_profile(unversioned.as_bytes()),
            Err(Error::Parse(_))
        ));

        let wrong_k = text.replace("K = 5", "K = 6");
        assert!(matches!(read_profile(wrong_k.as_bytes()), Err(Error::Parse(_))));

        let wrong_structure = text.replace("structure = 4", "structure = 1,3");
        assert!(matches!(
            read_profile(wrong_structure.as_bytes()),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn representative_files_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x0055);
        let s = BlockStructure::new(vec![3, 5]).unwrap();
        let reps = generate_representatives(
            &s,
            8,
            SelectionThresholds { d_u: 4, d_p: 3 },
            &mut rng,
            1_000_000,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_representatives(&s, &reps, &mut buf).unwrap();
        let (restored_s, restored) = read_representatives(&buf[..]).unwrap();
        assert_eq!(restored_s, s);
        assert_eq!(restored, reps);
    }

    #[test]
    fn representative_files_cover_the_trivial_group() {
        // A structure of isolated variables has an empty bit vector; the
        // format must survive the degenerate case.
        let s = BlockStructure::new(vec![1, 1, 1]).unwrap();
        let reps = vec![EcRepresentative::identity(&s)];
        let mut buf = Vec::new();
        write_representatives(&s, &reps, &mut buf).unwrap();
        let (restored_s, restored) = read_representatives(&buf[..]).unwrap();
        assert_eq!(restored_s, s);
        assert_eq!(restored, reps);
    }

    #[test]
    fn representative_reader_rejects_malformed_lines() {
        let s = BlockStructure::new(vec![2]).unwrap();
        let reps = vec![EcRepresentative::identity(&s)];
        let mut buf = Vec::new();
        write_representatives(&s, &reps, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();

        assert!(matches!(
            read_representatives(text.replace("v1", "v2").as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            read_representatives(text.replace('|', ";").as_bytes()),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            read_representatives(text.replace("| 0", "| 01").as_bytes()),
            Err(Error::Parse(_))
        ));
    }
}
