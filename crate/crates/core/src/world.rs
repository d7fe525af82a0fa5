//! The toroidal patch lattice and the plantoid lifecycle: replenishment,
//! poison release and territorial replication.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::agent::{CognitiveType, MAgent};
use crate::config::{Config, ConfigError};
use crate::genome::{Chromosome, TagPair};

/// Moore neighborhood offsets, enumerated row by row. This order is fixed:
/// it is the candidate order behind every random tie-break.
pub const MOORE_OFFSETS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// A plant-like replicator bound to one patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Plantoid {
    pub chromosome: Chromosome,
    pub energy: f64,
}

/// One lattice site: a fixed reservoir capacity and the plantoid living on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    /// Patch-bound reservoir capacity, constant for the whole run.
    pub capacity: f64,
    pub plantoid: Plantoid,
}

/// The full simulation state: a (2r+1) x (2r+1) torus of patches, the living
/// m-agents, the tick counter and the run-owned random stream.
#[derive(Debug, Clone)]
pub struct World {
    pub radius: u32,
    pub width: usize,
    /// Row-major patches, `width * width` of them.
    pub patches: Vec<Patch>,
    /// Living agents (plus, mid-tick, corpses awaiting the next cleanup).
    pub agents: Vec<MAgent>,
    pub tick: u64,
    pub rng: ChaCha8Rng,
    pub next_agent_id: u64,
}

/// Deaths and energy drained by one poison release.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PoisonReport {
    pub deaths: u32,
    /// Total energy removed from the population: one unit per survivor plus
    /// the whole remaining reservoir of every agent the poison killed.
    pub energy_drained: f64,
}

/// Replications performed by one plantoid-competition pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompetitionReport {
    pub replications: u32,
    /// Net plantoid energy created by installing replicas at full patch
    /// capacity over the replaced plantoids' remainders.
    pub energy_adjustment: f64,
}

impl World {
    /// Build the initial world for `cfg`, fully determined by `seed`.
    pub fn init(cfg: &Config, seed: u64) -> Result<Self, ConfigError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let width = cfg.lattice_width();
        let capacity_levels = cfg.max_plantoid_capacity.floor() as u64;

        let patches: Vec<Patch> = (0..width * width)
            .map(|_| {
                let capacity = rng.random_range(1..=capacity_levels) as f64;
                let length = rng.random_range(1..=cfg.max_gen) as usize;
                let chromosome = Chromosome::random(length, cfg.alphabet_size, &mut rng);
                Patch {
                    capacity,
                    // Plantoids start with their reservoir full.
                    plantoid: Plantoid {
                        chromosome,
                        energy: capacity,
                    },
                }
            })
            .collect();

        let mut agents = Vec::with_capacity(cfg.initial_agents as usize);
        for i in 0..cfg.initial_agents {
            let cog = if cfg.cog0_only {
                CognitiveType::Cog0
            } else if cfg.cog1_only {
                CognitiveType::Cog1
            } else if i < cfg.initial_agents / 2 {
                CognitiveType::Cog0
            } else {
                CognitiveType::Cog1
            };
            let tags = TagPair::random(cfg.max_gen as usize, cfg.alphabet_size, &mut rng);
            let patch = rng.random_range(0..patches.len());
            let mut agent = MAgent::new(i as u64, tags, cog, cfg.agent_base_reservoir, patch);
            // Founders start with the base reservoir filled; the
            // chromosome-length bonus is headroom they must earn.
            agent.energy = cfg.agent_base_reservoir;
            if agent.is_cog1() {
                agent.evaluate_internal_state();
            }
            agents.push(agent);
        }

        Ok(Self {
            radius: cfg.r,
            width,
            patches,
            agents,
            tick: 0,
            rng,
            next_agent_id: cfg.initial_agents as u64,
        })
    }

    pub fn patch_count(&self) -> usize {
        self.patches.len()
    }

    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.width, idx / self.width)
    }

    /// Flat index of the patch at torus coordinates (x, y).
    pub fn index(&self, x: i64, y: i64) -> usize {
        let w = self.width as i64;
        (y.rem_euclid(w) * w + x.rem_euclid(w)) as usize
    }

    /// Patch reached from `idx` by stepping (dx, dy) with periodic borders.
    pub fn neighbor(&self, idx: usize, dx: i64, dy: i64) -> usize {
        neighbor_of(self.width, idx, dx, dy)
    }

    /// The 8 Moore neighbors of a patch, in `MOORE_OFFSETS` order.
    pub fn moore_neighbors(&self, idx: usize) -> [usize; 8] {
        MOORE_OFFSETS.map(|(dx, dy)| self.neighbor(idx, dx, dy))
    }

    /// Living plantoids below their patch capacity regain `rate` units,
    /// clamped at capacity. A plantoid stripped to nothing has nothing left
    /// to regrow from; its patch only revives when a neighbor recolonizes it
    /// during the competition phase. Returns the total energy added.
    pub fn replenish(&mut self, rate: f64) -> f64 {
        let mut added = 0.0;
        for patch in &mut self.patches {
            let before = patch.plantoid.energy;
            if before <= 0.0 {
                continue;
            }
            patch.plantoid.energy = (before + rate).min(patch.capacity);
            added += patch.plantoid.energy - before;
        }
        added
    }

    /// Every living m-agent loses one unit of energy; agents at zero or
    /// below die on the spot. Corpses stay in the roster until the caller
    /// removes them.
    pub fn poison_release(&mut self) -> PoisonReport {
        let mut report = PoisonReport::default();
        for agent in &mut self.agents {
            if !agent.alive {
                continue;
            }
            if agent.energy <= 1.0 {
                report.deaths += 1;
                report.energy_drained += agent.energy;
                agent.energy -= 1.0;
                agent.alive = false;
            } else {
                agent.energy -= 1.0;
                report.energy_drained += 1.0;
            }
        }
        report
    }

    /// Drop dead agents from the roster, preserving order. Returns how many
    /// were removed.
    pub fn remove_dead(&mut self) -> usize {
        let before = self.agents.len();
        self.agents.retain(|a| a.alive);
        before - self.agents.len()
    }

    /// The Moore neighbor whose plantoid holds strictly more energy than
    /// every other neighbor *and* than the plantoid at `idx`; ties broken
    /// uniformly. None when no neighbor strictly improves on the current
    /// patch.
    pub fn best_neighbor_patch(&mut self, idx: usize) -> Option<usize> {
        best_neighbor_from(&self.patches, self.width, idx, &mut self.rng)
    }

    /// One territorial-replication pass over all plantoids, processed in a
    /// freshly shuffled order. A plantoid with at least one Moore neighbor
    /// holding less than half its energy overwrites one such neighbor
    /// (chosen uniformly) with a replica: parent chromosome with a possible
    /// one-point mutation, energy at the target patch's full capacity.
    pub fn plantoid_competition(&mut self, mutation_p: f64) -> CompetitionReport {
        let mut report = CompetitionReport::default();
        let mut order: Vec<usize> = (0..self.patches.len()).collect();
        order.shuffle(&mut self.rng);
        let mut candidates: Vec<usize> = Vec::with_capacity(8);
        for &idx in &order {
            let own_energy = self.patches[idx].plantoid.energy;
            let threshold = 0.5 * own_energy;
            candidates.clear();
            for n in self.moore_neighbors(idx) {
                if self.patches[n].plantoid.energy < threshold {
                    candidates.push(n);
                }
            }
            if candidates.is_empty() {
                continue;
            }
            let target = if candidates.len() == 1 {
                candidates[0]
            } else {
                candidates[self.rng.random_range(0..candidates.len())]
            };
            let replica = self.patches[idx]
                .plantoid
                .chromosome
                .mutate_one_point(mutation_p, &mut self.rng);
            let target_patch = &mut self.patches[target];
            report.energy_adjustment += target_patch.capacity - target_patch.plantoid.energy;
            report.replications += 1;
            target_patch.plantoid = Plantoid {
                chromosome: replica,
                energy: target_patch.capacity,
            };
        }
        report
    }

    /// Total plantoid energy over all patches.
    pub fn plantoid_energy_total(&self) -> f64 {
        self.patches.iter().map(|p| p.plantoid.energy).sum()
    }

    /// Total energy held by living agents.
    pub fn agent_energy_total(&self) -> f64 {
        self.agents
            .iter()
            .filter(|a| a.alive)
            .map(|a| a.energy)
            .sum()
    }

    /// Living-agent counts as (cog-0, cog-1).
    pub fn census(&self) -> (u32, u32) {
        let mut cog0 = 0;
        let mut cog1 = 0;
        for a in &self.agents {
            if !a.alive {
                continue;
            }
            match a.cog {
                CognitiveType::Cog0 => cog0 += 1,
                CognitiveType::Cog1 => cog1 += 1,
            }
        }
        (cog0, cog1)
    }
}

/// Torus step on a row-major lattice of side `width`.
pub(crate) fn neighbor_of(width: usize, idx: usize, dx: i64, dy: i64) -> usize {
    let w = width as i64;
    let x = (idx % width) as i64;
    let y = (idx / width) as i64;
    ((y + dy).rem_euclid(w) * w + (x + dx).rem_euclid(w)) as usize
}

/// `best_neighbor_patch` against borrowed parts, so engine phases can hold
/// agent borrows at the same time.
pub(crate) fn best_neighbor_from(
    patches: &[Patch],
    width: usize,
    idx: usize,
    rng: &mut ChaCha8Rng,
) -> Option<usize> {
    let w = width as i64;
    let x = (idx % width) as i64;
    let y = (idx / width) as i64;
    let own = patches[idx].plantoid.energy;
    let mut best = f64::NEG_INFINITY;
    let mut candidates: [usize; 8] = [0; 8];
    let mut count = 0;
    for (dx, dy) in MOORE_OFFSETS {
        let n = ((y + dy).rem_euclid(w) * w + (x + dx).rem_euclid(w)) as usize;
        let energy = patches[n].plantoid.energy;
        if energy > best {
            best = energy;
            candidates[0] = n;
            count = 1;
        } else if energy == best {
            candidates[count] = n;
            count += 1;
        }
    }
    if best <= own {
        return None;
    }
    let pick = if count == 1 {
        candidates[0]
    } else {
        candidates[rng.random_range(0..count)]
    };
    Some(pick)
}
