//! De-anonymization pipeline for link-prediction contests, evaluated on
//! synthetic contests with known ground truth.
//!
//! The stages, in pipeline order:
//!
//! 1. [`crawl`] — synthesize a scale-free ground-truth graph and take two
//!    overlapping partial crawls: the attacker's and the (obfuscated) contest
//!    organizers'.
//! 2. [`contest`] — turn the contest crawl into a link-prediction task:
//!    training edges plus a test set of real edges mixed with fakes.
//! 3. [`seed`] — match the high in-degree hubs of the two crawls by weighted
//!    graph matching, solved with simulated annealing.
//! 4. [`propagate`] — grow the seed correspondence across the rest of both
//!    graphs by neighborhood-similarity propagation.
//! 5. [`features`] / [`forest`] — structural link-prediction features and a
//!    random-forest classifier over them.
//! 6. [`eval`] — fuse mapping lookups with classifier probabilities and score
//!    everything (AUC, coverage, mapping precision).
//!
//! [`pipeline`] orchestrates the stages over a working directory of file
//! artifacts; the `deanon` CLI is a thin wrapper around it.

pub mod contest;
pub mod crawl;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod graph;
pub mod pipeline;
pub mod propagate;
pub mod rng;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{DirectedGraph, GraphBuilder, NodeId, NodeMapping};
