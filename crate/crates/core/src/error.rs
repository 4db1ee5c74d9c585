//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the code-design, group and decoding routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is singular over GF(2)")]
    SingularMatrix,

    #[error("block structure {sizes:?} sums to {sum}, expected {expected}")]
    BlockSumMismatch {
        sizes: Vec<usize>,
        sum: usize,
        expected: usize,
    },

    #[error("monomial set is not decreasing (not closed under factors and antecedents)")]
    NotDecreasing,

    #[error("operation requires a non-empty monomial set")]
    EmptyMonomialSet,

    #[error("no ({len},{dim}) code with the requested block structure up to design SNR {snr_max_db} dB")]
    DesignFailure {
        len: usize,
        dim: usize,
        snr_max_db: f64,
    },

    #[error("first block size must exceed 1 for equivalence-class operations, got {0}")]
    FirstBlockTooSmall(usize),

    #[error("requested {requested} representatives but the structure has only {available} equivalence classes")]
    TooManyClasses {
        requested: usize,
        available: num_bigint::BigUint,
    },

    #[error("gave up after {attempts} rejected samples; thresholds too strict for the requested count")]
    SelectionExhausted { attempts: u64 },

    #[error("transform is not an automorphism of this code (de-permuted word violates the frozen set)")]
    NotAutomorphism,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
