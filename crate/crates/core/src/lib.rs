//! Data-driven design of network graphs that synchronize well.
//!
//! The crate covers the whole pipeline: generating datasets of
//! `(graph, objective)` pairs for networks of linear or bistable nodes with
//! diffusive coupling, analysing those datasets (entanglement correlations,
//! Pareto fronts over edge count), and designing new graphs from the data with
//! seven strategies, plus the genetic-algorithm oracle used to validate them.

pub mod error;
pub mod graph;
pub mod dynamics;
pub mod spectral;
pub mod dataset;
pub mod analysis;
pub mod learn;
pub mod strategies;
pub mod validation;

pub use error::{Error, Result};
pub use graph::Graph;
