//! Finite-scale laboratory for the equicontinuity and sequence-entropy
//! taxonomy of one-sided symbolic systems.
//!
//! The crate is organised along the quantities it estimates:
//!
//! - [`density`]: upper/lower density of time sets along the windows `[0, n]`
//!   and the pigeonhole extraction used when refining covers.
//! - [`systems`]: symbolic points, subshift models (full shift, the
//!   "at most one 1" shift, the powers-of-two shift, a regular Toeplitz
//!   shift with positive sequence entropy, Sturmian codings) and their
//!   empirical languages.
//! - [`besicovitch`]: disagreement densities and the Besicovitch
//!   pseudometric under the Cantor metric.
//! - [`probes`]: mean / diam-mean equicontinuity verdicts and mean
//!   sensitivity witnesses.
//! - [`entropy`]: pattern counts along time sequences, empirical partition
//!   entropy, independence certificates and the greedy splitting-sequence
//!   builder.
//! - [`factor`]: periodic structures of Toeplitz points and Sturmian fiber
//!   ambiguity.
//! - [`suite`]: declarative probe suites and the classification report.
//!
//! Every estimate is tied to the horizon at which it was computed; nothing
//! here claims a true limit.

pub mod besicovitch;
pub mod density;
pub mod entropy;
mod error;
pub mod factor;
pub mod probes;
pub mod seed;
pub mod suite;
pub mod systems;

pub use error::{Error, Result};
