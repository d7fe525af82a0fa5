//! Simulation configuration and validation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// All parameters of one simulation (and of a batch of them).
///
/// Defaults reproduce the harsh-environment reference setting: a 19x19
/// torus, maximum chromosome length 20, plantoid reservoir capacity up to
/// 10, agent base reservoir 10, mutation probability 0.001, replenishment
/// rate 2, replication probability 0.9 and 20 initial m-agents split evenly
/// between the two cognitive types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Lattice radius; the torus is (2r+1) x (2r+1) patches.
    pub r: u32,
    /// Number of letters in the formal alphabet.
    pub alphabet_size: u16,
    /// Maximum chromosome (tag) length drawn at setup.
    pub max_gen: u32,
    /// Upper bound of the per-patch plantoid reservoir capacity.
    pub max_plantoid_capacity: f64,
    /// Base m-agent reservoir capacity, before the chromosome-length bonus.
    pub agent_base_reservoir: f64,
    /// One-point mutation probability at every replication.
    pub mutation_p: f64,
    /// Energy units regained per tick by plantoids below capacity.
    pub replenish_rate: f64,
    /// Probability that an agent above its threshold actually replicates.
    pub replication_p: f64,
    /// Initial m-agent count; must be even unless a single-type flag is set.
    pub initial_agents: u32,
    /// Populate only cog-1 agents.
    pub cog1_only: bool,
    /// Populate only cog-0 agents.
    pub cog0_only: bool,
    /// Hard tick bound for a run.
    pub max_ticks: u64,
    /// Base seed; batches derive per-run seeds from it.
    pub seed: u64,
    /// Number of runs in a batch.
    pub replicates: u32,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            r: 9,
            alphabet_size: 4,
            max_gen: 20,
            max_plantoid_capacity: 10.0,
            agent_base_reservoir: 10.0,
            mutation_p: 0.001,
            replenish_rate: 2.0,
            replication_p: 0.9,
            initial_agents: 20,
            cog1_only: false,
            cog0_only: false,
            max_ticks: 5_000,
            seed: 1,
            replicates: 1,
        }
    }
}

/// A configuration value out of range, reported with the offending key.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("config error: {key}: {message}")]
pub struct ConfigError {
    pub key: &'static str,
    pub message: String,
}

impl ConfigError {
    fn new(key: &'static str, message: impl Into<String>) -> Self {
        Self {
            key,
            message: message.into(),
        }
    }
}

impl Config {
    /// Side length of the lattice.
    pub fn lattice_width(&self) -> usize {
        2 * self.r as usize + 1
    }

    /// Total number of patches.
    pub fn patch_count(&self) -> usize {
        self.lattice_width() * self.lattice_width()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.r < 1 {
            return Err(ConfigError::new("r", "lattice radius must be at least 1"));
        }
        if self.alphabet_size < 2 {
            return Err(ConfigError::new(
                "alphabet_size",
                "formal alphabet needs at least 2 letters",
            ));
        }
        if self.max_gen < 1 {
            return Err(ConfigError::new(
                "max_gen",
                "maximum chromosome length must be at least 1",
            ));
        }
        if !self.max_plantoid_capacity.is_finite() || self.max_plantoid_capacity < 1.0 {
            return Err(ConfigError::new(
                "max_plantoid_capacity",
                "plantoid capacity bound must be at least 1",
            ));
        }
        if !self.agent_base_reservoir.is_finite() || self.agent_base_reservoir <= 0.0 {
            return Err(ConfigError::new(
                "agent_base_reservoir",
                "agent base reservoir must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.mutation_p) {
            return Err(ConfigError::new(
                "mutation_p",
                "mutation probability must lie in [0, 1]",
            ));
        }
        if !self.replenish_rate.is_finite() || self.replenish_rate <= 0.0 {
            return Err(ConfigError::new(
                "replenish_rate",
                "replenishment rate must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.replication_p) {
            return Err(ConfigError::new(
                "replication_p",
                "replication probability must lie in [0, 1]",
            ));
        }
        if self.cog1_only && self.cog0_only {
            return Err(ConfigError::new(
                "cog1_only",
                "cog1_only and cog0_only are mutually exclusive",
            ));
        }
        let single_type = self.cog1_only || self.cog0_only;
        if !single_type && self.initial_agents % 2 != 0 {
            return Err(ConfigError::new(
                "initial_agents",
                "must be even so the two cognitive types split evenly",
            ));
        }
        if self.max_ticks < 1 {
            return Err(ConfigError::new("max_ticks", "must run at least one tick"));
        }
        if self.replicates < 1 {
            return Err(ConfigError::new("replicates", "need at least one run"));
        }
        Ok(())
    }
}
