//! Finite-field coding toolkit with desk-scale exhaustive audits.
//!
//! The crate builds the classical objects of coding-theoretic derandomization
//! — randomness extractors and condensers, wiretap secrecy schemes,
//! group-testing matrices, channel-code ensembles, and distance-meeting code
//! ensembles — at sizes small enough that every claimed property can be
//! checked by brute force. Each constructor returns a concrete object
//! carrying its claimed parameters, and each claim has an audit routine that
//! recomputes the quantity exactly (rational arithmetic) or verifiably
//! (seeded Monte Carlo with reported intervals).
//!
//! Modules:
//! - [`field`]: `GF(p^m)` contexts, polynomial arithmetic, Frobenius powers.
//! - [`probdist`]: distributions over field vectors, statistical distance,
//!   min-entropy, and entropy-distance diagnostics.
//! - [`lincode`]: linear codes over `GF(q)` — constructors, distance,
//!   erasure decoding, concatenation.
//! - [`prand`]: seeded maps (hash families, condensers, code-derived maps,
//!   random-walk maps, combinatorial designs) and their audits.
//! - [`wiretap`]: inverter-based secrecy schemes and resilience audits.
//! - [`gtest`]: non-adaptive group-testing matrices, decoders, verifiers.
//! - [`chancode`]: channel-code ensembles and decoding experiments.
//! - [`gvrand`]: distance-meeting random code ensembles, derandomized.
//! - [`cli`]: the `derand` command-line front end.

pub mod caps;
pub mod chancode;
pub mod error;
pub mod field;
pub mod gtest;
pub mod gvrand;
pub mod lincode;
pub mod prand;
pub mod probdist;
pub mod wiretap;

pub use error::{Error, Result};
