//! Demand-private coded caching.
//!
//! A server with `N` files serves `K` users over a noiseless broadcast link.
//! Each user caches `M` files' worth of bits ahead of time and later requests
//! one file; the broadcast must satisfy every request while revealing nothing
//! about any user's demand to the other users. The construction here plants a
//! per-user key during placement and lifts the `K`-user demand vector into an
//! `NK`-virtual-user demand for a non-private building-block scheme, so that
//! the broadcast depends only on the per-user shifts `c_k = (s_k - d_k) mod N`
//! and the file contents.
//!
//! The crate provides:
//!
//! * the private scheme and its non-private building block ([`private`], [`yma`]),
//! * an exact brute-force verifier for decodability and privacy ([`verifier`]),
//! * exact-rational evaluation of every closed-form rate and bound ([`rates`]).
//!
//! Everything operational is deterministic given a seed; all probability and
//! rate arithmetic is exact (arbitrary-precision rationals).

pub mod combinatorics;
pub mod gf2;
pub mod model;
pub mod private;
pub mod rates;
pub mod scheme;
pub mod verifier;
pub mod yma;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("subset element out of range or duplicated: {0}")]
    BadSubset(String),
    #[error("rank {rank} out of range for C({n},{t})")]
    RankOutOfRange { n: usize, t: usize, rank: usize },
    #[error("enumeration budget exceeded: instance needs {needed} bits, budget is {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("user {user} cannot determine subfile {subfile} of file {file}")]
    Undetermined {
        user: usize,
        file: usize,
        subfile: usize,
    },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("arithmetic overflow computing {0}")]
    Overflow(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
