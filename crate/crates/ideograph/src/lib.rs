//! Growing concept networks from hyperlinked article corpora.
//!
//! The library builds directed, cosine-weighted concept networks from a
//! Wikipedia multistream dump or a bundled mini-corpus, then analyzes
//! how they grew: structural metrics against edge-rewired nulls,
//! persistent homology of knowledge gaps, a calibrated genetic growth
//! simulator, temporal module epochs, and impulse-response influence
//! scores.
//!
//! Start from the runnable programs in `examples/`; each one drives a
//! major capability end to end against the bundled corpus in `data/`.

pub mod corpus;
pub mod error;
pub mod genetic;
pub mod graph;
pub mod homology;
pub mod influence;
pub mod metrics;
pub mod nulls;
pub mod pipeline;
pub mod seeds;
pub mod stats;
pub mod temporal;

pub use error::{Error, Result};
