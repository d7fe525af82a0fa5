//! An Echo-style artificial-life world on a torus of patches.
//!
//! Three kinds of self-replicating organism share the lattice: plantoids
//! (patch-bound energy producers that compete for territory), cog-0 m-agents
//! (reflexless mobile automata) and cog-1 m-agents (mobile agents that turn
//! body state into desire and fear responses before they move, feed, fight
//! or replicate). Interfaces between organisms are scored by matching
//! chromosome tags over a formal alphabet.
//!
//! Every run is a pure function of its configuration and a 64-bit seed, so
//! batches of runs parallelize freely and reproduce bit for bit. The
//! [`stats`] module summarizes batches in the mean / CI / median / skewness
//! format used by the extinction-time experiments.

pub mod agent;
pub mod config;
pub mod engine;
pub mod genome;
pub mod seed;
pub mod snapshot;
pub mod stats;
pub mod world;

pub use agent::{CognitiveType, DisplayState, MAgent};
pub use config::{Config, ConfigError};
pub use engine::{run_batch, run_simulation, run_simulation_observed, RunResult, StopReason, TickReport};
pub use genome::{Chromosome, TagPair};
pub use stats::{batch_extinction, describe, quartiles, SummaryStats};
pub use world::World;
