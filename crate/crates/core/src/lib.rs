//! Team communication networks from course email archives.
//!
//! Reads an mbox or message CSV plus team rosters, builds daily windowed
//! communication graphs per team, computes structural metrics (rotating
//! leadership, centralization, contribution balance), response times and
//! sentiment, and correlates the per-team metrics with creativity ratings.

pub mod config;
pub mod error;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod pipeline;
pub mod report;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
