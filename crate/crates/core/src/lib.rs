//! Polar-code automorphism toolkit: monomial-formalism code construction,
//! block-lower-triangular affine (BLTA) automorphism groups, equivalence
//! classes of automorphisms under successive cancellation, and the decoders
//! (SC, SC-List, automorphism-ensemble) plus Monte-Carlo simulation glue.

pub mod autgroup;
pub mod construct;
pub mod decode;
pub mod error;
pub mod gf2;
pub mod monomial;
pub mod sim;

pub use autgroup::{
    apply_affine, count_au_ap, ec_count, generate_representatives, hamming_distance, same_ec,
    EcRepresentative, SelectionThresholds,
};
pub use construct::{dega_reliability, design, CodeProfile, ReliabilityList, SnrSweep};
pub use decode::{
    ae_decode, asc_decode, crc6_attach, crc6_check, encode, least_squares_metric, ml_bound_event,
    polar_transform, sc_decode, scl_decode, DecodeResult, LlrFrame,
};
pub use error::{Error, Result};
pub use gf2::{pul_decompose, sample_blta, AffineTransform, BinMatrix, BlockStructure};
pub use monomial::{eval_monomial, upo_le, AuxMatrix, Monomial, MonomialSet};
pub use sim::{
    read_profile, read_representatives, run_bler, transmit, write_csv, write_profile,
    write_representatives, ChannelConfig, DecoderConfig, SimResult, StopRule,
};
