//! Command-line frontend: design a code with a prescribed automorphism
//! block structure, inspect its group counts, sample ensemble
//! representatives, and run BLER simulations.  File payloads go to stdout
//! unless `-o` is given; progress and summaries go to stderr.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use polar_ae::autgroup::{count_au_ap, ec_count, generate_representatives, SelectionThresholds};
use polar_ae::gf2::BlockStructure;
use polar_ae::sim::{
    read_profile, read_representatives, run_bler, write_csv, write_profile,
    write_representatives, DecoderConfig, StopRule,
};
use polar_ae::{design, CodeProfile, SnrSweep};

#[derive(Parser)]
#[command(
    name = "polar-ae",
    version,
    about = "Polar codes with prescribed affine automorphism groups: design, analysis, and automorphism-ensemble decoding"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for a code whose automorphism group contains BLTA of the requested structure
    Design(DesignArgs),
    /// Print code parameters and automorphism group counts for a profile
    Analyze(AnalyzeArgs),
    /// Sample pairwise-inequivalent, well-separated automorphism representatives
    Perms(PermsArgs),
    /// Estimate block error rate over the BPSK-AWGN channel
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Code length N, a power of two
    #[arg(long)]
    length: usize,
    /// Code dimension K, CRC bits included
    #[arg(long)]
    dim: usize,
    /// Requested block structure as comma-separated sizes, e.g. 3,2
    #[arg(long)]
    structure: BlockStructure,
    /// Start of the design-SNR sweep in dB
    #[arg(long)]
    snr_min: f64,
    /// Sweep step in dB
    #[arg(long, default_value_t = 0.25)]
    snr_step: f64,
    /// End of the sweep in dB; defaults to snr-min + 4
    #[arg(long)]
    snr_max: Option<f64>,
    /// CRC bits carried inside the K information bits (0 or 6)
    #[arg(long, default_value_t = 0)]
    crc: usize,
    /// Profile output path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Profile file to inspect
    profile: PathBuf,
}

#[derive(Args)]
struct PermsArgs {
    /// Profile file providing the block structure
    profile: PathBuf,
    /// Ensemble size M, identity included
    #[arg(short = 'm', long)]
    count: usize,
    /// Minimum Hamming distance between upper-triangular bit vectors
    #[arg(long, default_value_t = 1)]
    d_u: usize,
    /// Minimum Hamming distance between permutation vectors
    #[arg(long, default_value_t = 1)]
    d_p: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Rejection-sampling budget; defaults to 10000 per requested representative
    #[arg(long)]
    max_attempts: Option<u64>,
    /// Representative output path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Profile file of the code to simulate
    profile: PathBuf,
    /// Decoder: sc, scl:<L>, cascl:<L>, or ae
    #[arg(long, default_value = "sc")]
    decoder: String,
    /// Representative file; required for --decoder ae
    #[arg(long)]
    reps: Option<PathBuf>,
    /// Comma-separated Eb/N0 points in dB, e.g. 1.0,1.5,2.0
    #[arg(long)]
    ebn0: String,
    /// Stop a point after this many frame errors
    #[arg(long, default_value_t = 100)]
    min_errors: u64,
    /// Hard cap on frames per point
    #[arg(long, default_value_t = 1_000_000)]
    max_frames: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Design(args) => run_design(args),
        Command::Analyze(args) => run_analyze(args),
        Command::Perms(args) => run_perms(args),
        Command::Simulate(args) => run_simulate(args),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn load_profile(path: &Path) -> Result<CodeProfile> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_profile(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))
}

fn run_design(args: DesignArgs) -> Result<()> {
    if args.crc != 0 && args.crc != 6 {
        bail!("only 0 or 6 CRC bits are supported, got {}", args.crc);
    }
    let sweep = SnrSweep {
        min_db: args.snr_min,
        step_db: args.snr_step,
        max_db: args.snr_max.unwrap_or(args.snr_min + 4.0),
    };
    let g = design(args.length, args.dim, &args.structure, sweep)
        .context("no admissible code found over the design-SNR sweep")?;
    let profile = CodeProfile::from_monomials(&g, args.crc)?;
    eprintln!(
        "designed ({}, {}) code, detected structure ({})",
        profile.len(),
        profile.dim(),
        profile.structure()
    );
    let mut out = open_output(args.output.as_deref())?;
    write_profile(&profile, &mut out)?;
    Ok(())
}

fn run_analyze(args: AnalyzeArgs) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let s = profile.structure();
    let (upper, perms) = count_au_ap(s);
    println!("length      N = {} (n = {})", profile.len(), profile.n());
    println!(
        "dimension   K = {} ({} payload + {} CRC bits)",
        profile.dim(),
        profile.payload_len(),
        profile.crc_bits()
    );
    println!("rate        R = {}", profile.rate());
    println!("structure   ({s})");
    println!("|BLTA|      {}", s.blta_size());
    match ec_count(s) {
        Ok(classes) => println!("|EC|        {classes}"),
        Err(_) => println!("|EC|        undefined (leading block spans a single variable)"),
    }
    println!("|A_U|       {upper}");
    println!("|A_P|       {perms}");
    Ok(())
}

fn run_perms(args: PermsArgs) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let s = profile.structure().clone();
    let budget = args
        .max_attempts
        .unwrap_or(10_000 * args.count.max(1) as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let reps = generate_representatives(
        &s,
        args.count,
        SelectionThresholds {
            d_u: args.d_u,
            d_p: args.d_p,
        },
        &mut rng,
        budget,
    )
    .context("representative sampling failed")?;
    eprintln!(
        "sampled {} representatives of ({s}) with d_u >= {}, d_p >= {}",
        reps.len(),
        args.d_u,
        args.d_p
    );
    let mut out = open_output(args.output.as_deref())?;
    write_representatives(&s, &reps, &mut out)?;
    Ok(())
}

fn parse_decoder(args: &SimulateArgs, profile: &CodeProfile) -> Result<DecoderConfig> {
    let spec = args.decoder.as_str();
    if let Some(list) = spec.strip_prefix("scl:") {
        return Ok(DecoderConfig::Scl {
            list_size: list.parse().context("bad list size")?,
        });
    }
    if let Some(list) = spec.strip_prefix("cascl:") {
        return Ok(DecoderConfig::CaScl {
            list_size: list.parse().context("bad list size")?,
        });
    }
    match spec {
        "sc" => Ok(DecoderConfig::Sc),
        "ae" => {
            let path = args
                .reps
                .as_ref()
                .context("--decoder ae needs a representative file via --reps")?;
            let file =
                File::open(path).with_context(|| format!("opening {}", path.display()))?;
            let (s, reps) = read_representatives(BufReader::new(file))
                .with_context(|| format!("parsing {}", path.display()))?;
            if !profile.structure().admits(&s) {
                bail!(
                    "representatives were drawn from BLTA({s}), which is not contained in \
                     the code's automorphism group BLTA({})",
                    profile.structure()
                );
            }
            Ok(DecoderConfig::Ae { reps })
        }
        other => bail!("unknown decoder {other:?}; use sc, scl:<L>, cascl:<L>, or ae"),
    }
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let decoder = parse_decoder(&args, &profile)?;
    let ebn0: Vec<f64> = args
        .ebn0
        .split(',')
        .map(|tok| tok.trim().parse::<f64>().context("bad Eb/N0 point"))
        .collect::<Result<_>>()?;
    let stop = StopRule {
        min_errors: args.min_errors,
        max_frames: args.max_frames,
    };
    let results = run_bler(&profile, &decoder, &ebn0, stop, args.seed)?;
    for r in &results {
        eprintln!(
            "{} dB: {} errors / {} frames, BLER {:.3e} (ML bound {:.3e})",
            r.ebn0_db, r.frame_errors, r.frames, r.bler, r.ml_bound_bler
        );
    }
    let mut out = open_output(args.output.as_deref())?;
    write_csv(&results, &mut out)?;
    Ok(())
}
