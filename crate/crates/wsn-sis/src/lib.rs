//! SIS epidemic spreading on duty-cycled wireless sensor networks.
//!
//! Nodes alternate between an active state (able to transmit, receive, and
//! recover) and a low-power sleep state (frozen). Infection runs as a
//! discrete-time SIS process over the active part of the network. The crate
//! provides:
//!
//! - [`graph`]: network construction and the dominant adjacency eigenvalue;
//! - [`mmc`]: the discrete-time microscopic Markov chain (mean-field)
//!   approximation, its equilibrium, and the epidemic threshold;
//! - [`montecarlo`]: the stochastic agent-based engine;
//! - [`experiments`]: figure-level sweeps comparing the two engines;
//! - [`cli`]: config parsing and command dispatch for the `wsn-sis` binary.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod mmc;
pub mod montecarlo;

pub use error::{Error, Result};
pub use graph::{DegreeStats, Graph, SpectralResult};
pub use mmc::{Fractions, FractionSeries, MmcState, ModelParams};
pub use montecarlo::{AgentPopulation, EnsembleSeries, InitActivity, NodeState, RunConfig};
