//! The round scheduler: feeding, predation, replication, death, poison,
//! movement and plantoid competition, plus whole-run and batch drivers.
//!
//! Every phase processes agents in a freshly shuffled order drawn from the
//! run's random stream, so a run is a pure function of (config, seed).

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::agent::{
    attack_decision, may_step, predator_fear_desire, prey_fear_desire, AttackChoice,
    CognitiveType, DisplayState, MAgent, PhaseFlags,
};
use crate::config::{Config, ConfigError};
use crate::genome::{combat_scores, plantoid_score};
use crate::world::{best_neighbor_from, neighbor_of, World, MOORE_OFFSETS};

/// The most energy an m-agent can swallow from a plantoid in one round.
///
/// Feeding is an interface-scored competition for the local stock, but the
/// meal itself is bounded by this quantum, a whisker above the one-unit
/// metabolic costs of the model (poison, steps). Agents that sit still on a
/// live patch run a small surplus; agents that burn a step every round run
/// a deficit they can only cover by fighting well or finding richer ground.
pub const MEAL_QUANTUM: f64 = 1.05;

/// Fraction of a plantoid's standing stock an agent can bite past the flat
/// quantum. Only reservoirs deeper than ten units ever exceed the quantum,
/// so worlds capped at ten or below never notice it.
pub const DEEP_STOCK_BITE: f64 = 0.1;

/// Per-tick census and event counts, sampled after plantoid competition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TickReport {
    pub tick: u64,
    pub cog0: u32,
    pub cog1: u32,
    pub plantoid_energy: f64,
    pub agent_energy: f64,
    pub births: u32,
    pub deaths: u32,
    pub conflicts: u32,
    pub avoided_conflicts: u32,
    /// Plantoid-energy ledger terms for the tick.
    pub replenish_added: f64,
    pub feed_withdrawn: f64,
    pub replica_adjust: f64,
}

/// Transfers and resulting reservoir levels of one resolved conflict.
/// Both transfers are computed from the pre-conflict reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictOutcome {
    /// T(ij): energy conceded by the predator to the prey.
    pub to_prey: f64,
    /// T(ji): energy taken by the predator from the prey.
    pub to_predator: f64,
    pub predator_new_energy: f64,
    pub prey_new_energy: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct PredationReport {
    conflicts: u32,
    avoided: u32,
    deaths: u32,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The cog-0 population (present at setup) died out.
    Cog0Extinct,
    /// Every m-agent died.
    TotalExtinction,
    /// The configured tick bound was reached.
    MaxTicks,
}

/// Everything recorded about one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub seed: u64,
    pub ticks: u64,
    pub stop: StopReason,
    /// Tick at which the last cog-0 died, when cog-0 were present at setup.
    pub cog0_extinction_tick: Option<u64>,
    /// Tick at which the last cog-1 died, when cog-1 were present at setup.
    pub cog1_extinction_tick: Option<u64>,
    pub final_cog0: u32,
    pub final_cog1: u32,
    pub final_plantoid_energy: f64,
    pub final_agent_energy: f64,
    pub series: Vec<TickReport>,
}

impl RunResult {
    /// Copy with the per-tick series thinned to every `stride`-th report,
    /// always keeping the last one. Stride 0 is treated as 1.
    pub fn with_series_stride(&self, stride: u64) -> RunResult {
        let stride = stride.max(1);
        let mut out = self.clone();
        let last = self.series.len();
        out.series = self
            .series
            .iter()
            .enumerate()
            .filter(|(i, r)| r.tick % stride == 0 || *i + 1 == last)
            .map(|(_, r)| *r)
            .collect();
        out
    }
}

fn pair_mut(agents: &mut [MAgent], i: usize, j: usize) -> (&mut MAgent, &mut MAgent) {
    assert_ne!(i, j, "an agent cannot fight itself");
    if i < j {
        let (head, tail) = agents.split_at_mut(j);
        (&mut head[i], &mut tail[0])
    } else {
        let (head, tail) = agents.split_at_mut(i);
        (&mut tail[0], &mut head[j])
    }
}

fn shuffled_indices(n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

fn agents_by_patch(patch_count: usize, agents: &[MAgent]) -> Vec<Vec<usize>> {
    let mut by_patch: Vec<Vec<usize>> = vec![Vec::new(); patch_count];
    for (i, agent) in agents.iter().enumerate() {
        if agent.alive {
            by_patch[agent.patch].push(i);
        }
    }
    by_patch
}

/// Feeding phase. Cog-1 agents first evaluate their internal state, in
/// shuffled order, refreshing the desire level their later decisions build
/// on. Then every patch with a live plantoid pays each co-located agent its
/// interface-score share of the stock, each meal bounded by
/// [`MEAL_QUANTUM`] and by the agent's free capacity; whatever is not
/// claimed stays in the plantoid.
///
/// Returns the total energy withdrawn from plantoids.
pub fn feeding_phase(world: &mut World) -> f64 {
    let order = shuffled_indices(world.agents.len(), &mut world.rng);
    for &ai in &order {
        let agent = &mut world.agents[ai];
        if agent.alive && agent.is_cog1() {
            agent.evaluate_internal_state();
        }
    }

    let by_patch = agents_by_patch(world.patches.len(), &world.agents);
    let World {
        ref mut agents,
        ref mut patches,
        ..
    } = *world;
    let mut total_withdrawn = 0.0;
    for (pi, feeders) in by_patch.iter().enumerate() {
        if feeders.is_empty() {
            continue;
        }
        let available = patches[pi].plantoid.energy;
        if available <= 0.0 {
            continue;
        }
        let scores: Vec<f64> = feeders
            .iter()
            .map(|&ai| plantoid_score(&agents[ai].tags.offense, &patches[pi].plantoid.chromosome))
            .collect();
        let score_total: f64 = scores.iter().sum();
        // Deep reservoirs support proportionally bigger mouthfuls; shallow
        // ones are bounded by the flat quantum.
        let meal_bound = (available * DEEP_STOCK_BITE).max(MEAL_QUANTUM);
        let mut withdrawn = 0.0;
        for (&ai, &score) in feeders.iter().zip(&scores) {
            let agent = &mut agents[ai];
            debug_assert!(!agent.acted.fed, "agent fed twice in one tick");
            agent.acted.fed = true;
            let share = (available * score / score_total).min(meal_bound);
            let free = (agent.capacity - agent.energy).max(0.0);
            let take = share.min(free);
            agent.energy += take;
            withdrawn += take;
        }
        // Guard the reservoir against float dust when the shares sum to
        // slightly more than what was available.
        patches[pi].plantoid.energy = (available - withdrawn).max(0.0);
        total_withdrawn += withdrawn;
    }
    total_withdrawn
}

/// Predation phase. Agents below their capacity hunt in shuffled order,
/// picking a prey uniformly among the other living agents on their patch.
/// Cog-0 predators always fight; cog-1 predators anticipate the transfers
/// and fight only when fear does not surpass desire.
fn predation_phase(world: &mut World) -> PredationReport {
    let order = shuffled_indices(world.agents.len(), &mut world.rng);
    let by_patch = agents_by_patch(world.patches.len(), &world.agents);
    let World {
        ref mut agents,
        ref mut rng,
        ..
    } = *world;
    let mut report = PredationReport::default();
    let mut candidates: Vec<usize> = Vec::new();
    for &ai in &order {
        if !agents[ai].alive || agents[ai].energy >= agents[ai].capacity {
            continue;
        }
        candidates.clear();
        candidates.extend(
            by_patch[agents[ai].patch]
                .iter()
                .copied()
                .filter(|&j| j != ai && agents[j].alive),
        );
        if candidates.is_empty() {
            continue;
        }
        let prey_index = if candidates.len() == 1 {
            candidates[0]
        } else {
            candidates[rng.random_range(0..candidates.len())]
        };
        debug_assert!(!agents[ai].acted.hunted, "agent hunted twice in one tick");
        agents[ai].acted.hunted = true;
        let (predator, prey) = pair_mut(agents, ai, prey_index);

        if predator.is_cog1() {
            // Run the confrontation scenario before committing to it.
            let (s_attack, s_counter) = combat_scores(&predator.tags, &prey.tags);
            let score_total = s_attack + s_counter;
            let incoming = prey.energy * s_attack / score_total;
            let outgoing = predator.energy * s_counter / score_total;
            let choice = match predator_fear_desire(outgoing, incoming) {
                Ok((fear, desire)) => {
                    let emotion = predator.emotion.as_mut().expect("cog-1");
                    emotion.last_fear = fear;
                    emotion.last_desire = desire;
                    attack_decision(fear, desire)
                }
                // Nothing at stake on either side: a zero-stake fight has no
                // payoff, so it is not sought.
                Err(_) => AttackChoice::Avoid,
            };
            match choice {
                AttackChoice::Avoid => {
                    predator.display = DisplayState::FearYellow;
                    report.avoided += 1;
                    continue;
                }
                AttackChoice::Attack => {
                    predator.display = DisplayState::AttackRed;
                }
            }
        }

        resolve_conflict(predator, prey);
        report.conflicts += 1;
        if !predator.alive {
            report.deaths += 1;
        }
        if !prey.alive {
            report.deaths += 1;
        }
    }
    report
}

/// Resolve a confrontation: both transfers are computed from the pre-conflict
/// reservoirs, then applied simultaneously with each side clamped at its
/// capacity. A side left at zero or below dies. A cog-1 prey appraises the
/// exchange for display and logging.
pub fn resolve_conflict(predator: &mut MAgent, prey: &mut MAgent) -> ConflictOutcome {
    debug_assert!(predator.alive && prey.alive, "conflict between corpses");
    debug_assert_eq!(predator.patch, prey.patch, "conflict across patches");

    let (s_attack, s_counter) = combat_scores(&predator.tags, &prey.tags);
    let score_total = s_attack + s_counter;
    let to_predator = prey.energy * s_attack / score_total;
    let to_prey = predator.energy * s_counter / score_total;
    let predator_new = (predator.energy + to_predator - to_prey).min(predator.capacity);
    let prey_new = (prey.energy + to_prey - to_predator).min(prey.capacity);

    // Conflict ledger: the exchange conserves energy up to the overflow
    // discarded at each capacity clamp.
    debug_assert!({
        let spill_predator =
            (predator.energy + to_predator - to_prey - predator.capacity).max(0.0);
        let spill_prey = (prey.energy + to_prey - to_predator - prey.capacity).max(0.0);
        let before = predator.energy + prey.energy;
        (predator_new + prey_new + spill_predator + spill_prey - before).abs()
            <= 1e-9 * before.max(1.0)
    });
    debug_assert!(to_predator + to_prey <= predator.energy + prey.energy + 1e-9);

    predator.energy = predator_new;
    prey.energy = prey_new;
    if predator.energy <= 0.0 {
        predator.alive = false;
    }
    if prey.energy <= 0.0 {
        prey.alive = false;
    }

    if prey.is_cog1() {
        if let Ok((fear, desire)) = prey_fear_desire(to_predator, to_prey) {
            let emotion = prey.emotion.as_mut().expect("cog-1");
            emotion.last_fear = fear;
            emotion.last_desire = desire;
            prey.display = if fear > desire {
                DisplayState::FearYellow
            } else {
                DisplayState::AttackRed
            };
        }
    }

    ConflictOutcome {
        to_prey,
        to_predator,
        predator_new_energy: predator_new,
        prey_new_energy: prey_new,
    }
}

/// Replication phase. Agents above their replication threshold replicate
/// with probability `replication_p`: the child receives the parent's
/// chromosome (with a possible one-point mutation over the full chain), the
/// parent's cognitive type, and half the parent's energy; capacity and
/// threshold re-derive from the child's own chromosome. Newborns join the
/// roster at the parent's patch. Returns the number of births.
fn replication_phase(world: &mut World, cfg: &Config) -> u32 {
    let order = shuffled_indices(world.agents.len(), &mut world.rng);
    let mut newborns: Vec<MAgent> = Vec::new();
    {
        let World {
            ref mut agents,
            ref mut rng,
            ref mut next_agent_id,
            ..
        } = *world;
        for &ai in &order {
            let agent = &mut agents[ai];
            if !agent.alive {
                continue;
            }
            let eligible = agent.energy > agent.replication_threshold as f64;
            if agent.is_cog1() && eligible {
                agent.emotion.as_mut().expect("cog-1").desire_to_replicate = 1;
                agent.display = DisplayState::ReplicatePink;
            }
            if !eligible || !rng.random_bool(cfg.replication_p) {
                continue;
            }
            debug_assert!(!agent.acted.replicated, "agent replicated twice in one tick");
            agent.acted.replicated = true;

            let child_tags = agent.tags.mutate_one_point(cfg.mutation_p, rng);
            agent.energy /= 2.0;
            let mut child = MAgent::new(
                *next_agent_id,
                child_tags,
                agent.cog,
                cfg.agent_base_reservoir,
                agent.patch,
            );
            *next_agent_id += 1;
            child.energy = agent.energy;

            if agent.is_cog1() {
                agent.emotion.as_mut().expect("cog-1").desire_to_replicate = 0;
                agent.evaluate_internal_state();
            }
            if child.is_cog1() {
                child.evaluate_internal_state();
            }
            newborns.push(child);
        }
    }
    let births = newborns.len() as u32;
    world.agents.append(&mut newborns);
    births
}

/// Movement phase, the one step an agent may take per round. Cog-0 step to
/// a uniformly random Moore neighbor no matter what, and die when the step
/// exhausts them. Cog-1 weigh the step somatically: they re-evaluate their
/// internal state and move only when the step is affordable, the local
/// plantoid cannot serve a full meal, and a strictly better plantoid sits
/// next door; staying costs nothing. Returns the number of deaths.
fn movement_phase(world: &mut World) -> u32 {
    let order = shuffled_indices(world.agents.len(), &mut world.rng);
    let width = world.width;
    let World {
        ref mut agents,
        ref patches,
        ref mut rng,
        ..
    } = *world;
    let mut deaths = 0;
    for &ai in &order {
        let agent = &mut agents[ai];
        if !agent.alive {
            continue;
        }
        match agent.cog {
            CognitiveType::Cog0 => {
                let (dx, dy) = MOORE_OFFSETS[rng.random_range(0..MOORE_OFFSETS.len())];
                debug_assert!(!agent.acted.moved, "agent moved twice in one tick");
                agent.acted.moved = true;
                agent.patch = neighbor_of(width, agent.patch, dx, dy);
                agent.energy -= 1.0;
                if agent.energy <= 0.0 {
                    agent.alive = false;
                    deaths += 1;
                }
            }
            CognitiveType::Cog1 => {
                agent.evaluate_internal_state();
                let desire = agent.emotion.as_ref().expect("cog-1").desire_to_feed;
                let hungry_here = patches[agent.patch].plantoid.energy < MEAL_QUANTUM;
                if may_step(desire, agent.capacity) && hungry_here {
                    if let Some(target) = best_neighbor_from(patches, width, agent.patch, rng) {
                        debug_assert!(!agent.acted.moved, "agent moved twice in one tick");
                        agent.acted.moved = true;
                        agent.patch = target;
                        agent.energy -= 1.0;
                        agent.evaluate_internal_state();
                    }
                }
            }
        }
    }
    deaths
}

/// One full round: replenish, feed, predate, replicate, clean up, poison
/// (with its own cleanup), move, plantoid competition. The tick counter
/// advances and the census is sampled after competition.
pub fn run_tick(world: &mut World, cfg: &Config) -> TickReport {
    for agent in &mut world.agents {
        agent.acted = PhaseFlags::default();
    }
    let plantoid_before = world.plantoid_energy_total();
    let mut report = TickReport::default();

    report.replenish_added = world.replenish(cfg.replenish_rate);
    report.feed_withdrawn = feeding_phase(world);

    let predation = predation_phase(world);
    report.conflicts = predation.conflicts;
    report.avoided_conflicts = predation.avoided;
    report.deaths += predation.deaths;

    report.births = replication_phase(world, cfg);

    let removed = world.remove_dead();
    debug_assert_eq!(removed as u32, predation.deaths, "stray corpses at cleanup");

    let poison = world.poison_release();
    report.deaths += poison.deaths;
    world.remove_dead();

    report.deaths += movement_phase(world);
    world.remove_dead();

    let competition = world.plantoid_competition(cfg.mutation_p);
    report.replica_adjust = competition.energy_adjustment;

    world.tick += 1;
    report.tick = world.tick;
    let (cog0, cog1) = world.census();
    report.cog0 = cog0;
    report.cog1 = cog1;
    report.plantoid_energy = world.plantoid_energy_total();
    report.agent_energy = world.agent_energy_total();

    // Tick-level plantoid ledger: replenishment in, feeding out, replicas
    // installed at capacity over whatever energy they overwrote.
    debug_assert!(
        (report.plantoid_energy
            - plantoid_before
            - (report.replenish_added - report.feed_withdrawn + report.replica_adjust))
            .abs()
            <= 1e-9 * plantoid_before.max(1.0),
        "plantoid energy ledger does not reconcile"
    );
    debug_assert!(
        world
            .agents
            .iter()
            .all(|a| a.alive && a.energy <= a.capacity + 1e-9),
        "agent capacity invariant violated at tick boundary"
    );
    debug_assert!(
        world
            .patches
            .iter()
            .all(|p| p.plantoid.energy >= 0.0 && p.plantoid.energy <= p.capacity + 1e-9),
        "plantoid capacity invariant violated at tick boundary"
    );
    report
}

/// Run one simulation to its stop condition: extinction of an initially
/// present cog-0 population, total extinction, or the tick bound.
pub fn run_simulation(cfg: &Config, seed: u64) -> Result<RunResult, ConfigError> {
    run_simulation_observed(cfg, seed, |_, _| {})
}

/// Like [`run_simulation`], with an observer invoked after every completed
/// tick — the hook behind per-tick CSV streaming and PPM snapshot export.
pub fn run_simulation_observed(
    cfg: &Config,
    seed: u64,
    mut observe: impl FnMut(&World, &TickReport),
) -> Result<RunResult, ConfigError> {
    let mut world = World::init(cfg, seed)?;
    let (initial_cog0, initial_cog1) = world.census();
    let had_cog0 = initial_cog0 > 0;
    let had_cog1 = initial_cog1 > 0;

    let mut series: Vec<TickReport> = Vec::new();
    let mut cog0_extinction_tick = None;
    let mut cog1_extinction_tick = None;

    let stop = if world.agents.is_empty() {
        StopReason::TotalExtinction
    } else {
        loop {
            let report = run_tick(&mut world, cfg);
            observe(&world, &report);
            if had_cog0 && cog0_extinction_tick.is_none() && report.cog0 == 0 {
                cog0_extinction_tick = Some(report.tick);
            }
            if had_cog1 && cog1_extinction_tick.is_none() && report.cog1 == 0 {
                cog1_extinction_tick = Some(report.tick);
            }
            series.push(report);
            if report.cog0 + report.cog1 == 0 {
                break StopReason::TotalExtinction;
            }
            if had_cog0 && report.cog0 == 0 {
                break StopReason::Cog0Extinct;
            }
            if report.tick >= cfg.max_ticks {
                break StopReason::MaxTicks;
            }
        }
    };

    let (final_cog0, final_cog1) = world.census();
    Ok(RunResult {
        seed,
        ticks: world.tick,
        stop,
        cog0_extinction_tick,
        cog1_extinction_tick,
        final_cog0,
        final_cog1,
        final_plantoid_energy: world.plantoid_energy_total(),
        final_agent_energy: world.agent_energy_total(),
        series,
    })
}

/// Run one simulation per seed, in parallel. Results come back in seed
/// order, so the output is independent of the worker-pool size.
pub fn run_batch(cfg: &Config, seeds: &[u64]) -> Result<Vec<RunResult>, ConfigError> {
    cfg.validate()?;
    Ok(seeds
        .par_iter()
        .map(|&seed| run_simulation(cfg, seed).expect("config validated above"))
        .collect())
}
