//! Delay-guaranteed enumeration of join-project query results.
//!
//! This crate implements enumeration algorithms for three query shapes —
//! star queries, left-deep hierarchical queries and path queries — whose
//! delay between consecutive output tuples is bounded by data-dependent
//! quantities (input size, full join size, degree thresholds). All
//! algorithms run on a virtual operation clock: every hash probe, list
//! pointer advance, comparison and emission costs one tick, so delay
//! bounds are deterministic and empirically checkable.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the
//! benchmark CLI live in the companion `qenum` crate.
//!
//! The building blocks are:
//!
//! * [`relation`] / [`domain`] — relations over a compressed integer
//!   domain with degree-annotated sorted adjacency lists,
//! * [`reduce`] / [`stats`] — semijoin reduction, linear-time full join
//!   counting, count sort and degree-split selection,
//! * [`enumerate`] / [`merge`] / [`interleave`] — the pausable
//!   enumerator contract and the three combinators every algorithm is
//!   composed from,
//! * [`star`], [`selfjoin`], [`mmjoin`], [`leftdeep`], [`path`] — the
//!   per-shape enumeration algorithms.

#![no_std]

extern crate alloc;

pub mod clock;
pub mod domain;
pub mod enumerate;
mod hash;
pub mod interleave;
pub mod leftdeep;
pub mod loops;
pub mod merge;
pub mod mmjoin;
pub mod path;
pub mod query;
pub mod reduce;
pub mod relation;
pub mod selfjoin;
pub mod star;
pub mod stats;

use core::fmt;

pub use clock::{DelayReport, OpClock};
pub use domain::{DomainMap, RawRelation};
pub use enumerate::{measure_delay, run_to_completion, step, Emit, Enumerator, OutVec};
pub use hash::{Map, Set};
pub use query::QueryShape;
pub use relation::{IdTuple, Relation, Vid};

/// Errors surfaced by preprocessing and combinator construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A relation does not have the arity the query shape requires.
    Arity {
        relation: alloc::string::String,
        expected: usize,
        got: usize,
    },
    /// An interleaving plan violates `eta <= T * gamma / T'`.
    InvalidPlan {
        eta: u64,
        gamma: u64,
        t: u64,
        t_prime: u64,
    },
    /// A numeric parameter is outside its legal range.
    InvalidParameter(&'static str),
    /// Boolean matrix dimensions do not line up for multiplication.
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Arity {
                relation,
                expected,
                got,
            } => write!(f, "relation {relation}: expected arity {expected}, got {got}"),
            Error::InvalidPlan {
                eta,
                gamma,
                t,
                t_prime,
            } => write!(
                f,
                "interleave plan eta={eta} gamma={gamma} violates eta*T' <= T*gamma (T={t}, T'={t_prime})"
            ),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::DimensionMismatch { left, right } => write!(
                f,
                "matrix dimensions {}x{} and {}x{} cannot be multiplied",
                left.0, left.1, right.0, right.1
            ),
        }
    }
}

/// Result alias for fallible core operations.
pub type Result<T, E = Error> = core::result::Result<T, E>;
