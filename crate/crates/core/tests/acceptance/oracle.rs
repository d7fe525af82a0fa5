//! Straight-line restatement of the round rules, deliberately independent of
//! the engine: every score, transfer, and state update is recomputed inline
//! here, consuming the same random draws in the same order. Data containers
//! ([`World`], [`MAgent`]) and constructors are shared; the tick logic is not.

use echoworld::agent::{CognitiveType, DisplayState, MAgent};
use echoworld::genome::{Chromosome, TagPair};
use echoworld::world::{Patch, Plantoid, World, MOORE_OFFSETS};
use echoworld::Config;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const MEAL_QUANTUM: f64 = 1.05;
const DEEP_STOCK_BITE: f64 = 0.1;
const STEP_EPS: f64 = 1e-9;

fn wrap(width: usize, idx: usize, dx: i64, dy: i64) -> usize {
    let w = width as i64;
    let x = (idx % width) as i64;
    let y = (idx / width) as i64;
    ((y + dy).rem_euclid(w) * w + (x + dx).rem_euclid(w)) as usize
}

fn prefix_counts(a: &[u16], b: &[u16]) -> (f64, f64) {
    let k = a.len().min(b.len());
    let mut plus = 0.0;
    let mut minus = 0.0;
    for i in 0..k {
        if a[i] == b[i] {
            plus += 1.0;
        } else {
            minus += 1.0;
        }
    }
    (plus, minus)
}

fn feed_score(offense: &[u16], plantoid: &[u16]) -> f64 {
    let (plus, minus) = prefix_counts(offense, plantoid);
    let k = offense.len().min(plantoid.len());
    let raw = 0.5 * (plus - minus + k as f64) + 1.0;
    if offense.len() >= plantoid.len() {
        raw
    } else {
        raw * 0.5
    }
}

fn combat_scores(pred: &TagPair, prey: &TagPair) -> (f64, f64) {
    let (p1, m1) = prefix_counts(pred.offense.letters(), prey.defense.letters());
    let k1 = pred.offense.len().max(prey.defense.len());
    let u1 = if pred.offense.len() < prey.defense.len() { 0.5 } else { 1.0 };
    let s_attack = (0.5 * (p1 - m1 + k1 as f64) + 1.0) * u1;

    let (p2, m2) = prefix_counts(prey.offense.letters(), pred.defense.letters());
    let k2 = prey.offense.len().max(pred.defense.len());
    let u2 = if prey.offense.len() > pred.defense.len() { 1.0 } else { 0.5 };
    let s_counter = (0.5 * (p2 - m2 + k2 as f64) + 1.0) * u2;

    (s_attack, s_counter)
}

fn mutate_chain(letters: &mut [u16], alphabet: u16, p: f64, rng: &mut ChaCha8Rng) {
    if rng.random_bool(p) {
        let pos = rng.random_range(0..letters.len());
        let old = letters[pos];
        let mut replacement = rng.random_range(0..alphabet - 1);
        if replacement >= old {
            replacement += 1;
        }
        letters[pos] = replacement;
    }
}

fn paleness(d: f64) -> u8 {
    ((d.max(0.0) * 10.0) as u8).min(9)
}

fn evaluate(agent: &mut MAgent) {
    let d = 1.0 - agent.energy / agent.capacity;
    let emotion = agent.emotion.as_mut().expect("cog-1");
    emotion.desire_to_feed = d;
    agent.display = DisplayState::Normal(paleness(d));
}

fn best_neighbor(
    patches: &[Patch],
    width: usize,
    idx: usize,
    rng: &mut ChaCha8Rng,
) -> Option<usize> {
    let own = patches[idx].plantoid.energy;
    let mut best = f64::NEG_INFINITY;
    let mut candidates = [0usize; 8];
    let mut count = 0;
    for (dx, dy) in MOORE_OFFSETS {
        let n = wrap(width, idx, dx, dy);
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
    Some(if count == 1 {
        candidates[0]
    } else {
        candidates[rng.random_range(0..count)]
    })
}

fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order
}

/// One full round, transcribed rule by rule.
pub fn oracle_tick(world: &mut World, cfg: &Config) {
    let width = world.width;

    // (1) replenishment; fully grazed plantoids stay bare
    for patch in world.patches.iter_mut() {
        if patch.plantoid.energy > 0.0 {
            patch.plantoid.energy = (patch.plantoid.energy + cfg.replenish_rate).min(patch.capacity);
        }
    }

    // (2) feeding: cog-1 agents evaluate in shuffled order, then every patch
    // pays interface-score shares bounded by the meal rule
    let order = shuffled(world.agents.len(), &mut world.rng);
    for &ai in &order {
        let agent = &mut world.agents[ai];
        if agent.alive && agent.cog == CognitiveType::Cog1 {
            evaluate(agent);
        }
    }
    let mut by_patch: Vec<Vec<usize>> = vec![Vec::new(); world.patches.len()];
    for (i, agent) in world.agents.iter().enumerate() {
        if agent.alive {
            by_patch[agent.patch].push(i);
        }
    }
    for pi in 0..world.patches.len() {
        if by_patch[pi].is_empty() {
            continue;
        }
        let available = world.patches[pi].plantoid.energy;
        if available <= 0.0 {
            continue;
        }
        let scores: Vec<f64> = by_patch[pi]
            .iter()
            .map(|&ai| {
                feed_score(
                    world.agents[ai].tags.offense.letters(),
                    world.patches[pi].plantoid.chromosome.letters(),
                )
            })
            .collect();
        let score_total: f64 = scores.iter().sum();
        let meal_bound = (available * DEEP_STOCK_BITE).max(MEAL_QUANTUM);
        let mut withdrawn = 0.0;
        for (&ai, &score) in by_patch[pi].iter().zip(&scores) {
            let agent = &mut world.agents[ai];
            let share = (available * score / score_total).min(meal_bound);
            let free = (agent.capacity - agent.energy).max(0.0);
            let take = share.min(free);
            agent.energy += take;
            withdrawn += take;
        }
        world.patches[pi].plantoid.energy = (available - withdrawn).max(0.0);
    }

    // (3) predation
    let order = shuffled(world.agents.len(), &mut world.rng);
    let mut by_patch: Vec<Vec<usize>> = vec![Vec::new(); world.patches.len()];
    for (i, agent) in world.agents.iter().enumerate() {
        if agent.alive {
            by_patch[agent.patch].push(i);
        }
    }
    for &ai in &order {
        if !world.agents[ai].alive || world.agents[ai].energy >= world.agents[ai].capacity {
            continue;
        }
        let candidates: Vec<usize> = by_patch[world.agents[ai].patch]
            .iter()
            .copied()
            .filter(|&j| j != ai && world.agents[j].alive)
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let prey_index = if candidates.len() == 1 {
            candidates[0]
        } else {
            candidates[world.rng.random_range(0..candidates.len())]
        };

        let (s_attack, s_counter) =
            combat_scores(&world.agents[ai].tags, &world.agents[prey_index].tags);
        let score_total = s_attack + s_counter;
        let prey_energy = world.agents[prey_index].energy;
        let predator_energy = world.agents[ai].energy;

        if world.agents[ai].cog == CognitiveType::Cog1 {
            let incoming = prey_energy * s_attack / score_total;
            let outgoing = predator_energy * s_counter / score_total;
            let total = outgoing + incoming;
            let avoid = if total <= 0.0 {
                true
            } else {
                let fear = outgoing / total;
                let desire = 1.0 - fear;
                let emotion = world.agents[ai].emotion.as_mut().expect("cog-1");
                emotion.last_fear = fear;
                emotion.last_desire = desire;
                fear > desire
            };
            if avoid {
                world.agents[ai].display = DisplayState::FearYellow;
                continue;
            }
            world.agents[ai].display = DisplayState::AttackRed;
        }

        // resolve the confrontation
        let to_predator = prey_energy * s_attack / score_total;
        let to_prey = predator_energy * s_counter / score_total;
        let predator_new =
            (predator_energy + to_predator - to_prey).min(world.agents[ai].capacity);
        let prey_new =
            (prey_energy + to_prey - to_predator).min(world.agents[prey_index].capacity);
        world.agents[ai].energy = predator_new;
        world.agents[prey_index].energy = prey_new;
        if predator_new <= 0.0 {
            world.agents[ai].alive = false;
        }
        if prey_new <= 0.0 {
            world.agents[prey_index].alive = false;
        }
        if world.agents[prey_index].cog == CognitiveType::Cog1 {
            let total = to_predator + to_prey;
            if total > 0.0 {
                let fear = to_predator / total;
                let desire = 1.0 - fear;
                let prey = &mut world.agents[prey_index];
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
    }

    // (4) replication
    let order = shuffled(world.agents.len(), &mut world.rng);
    let mut newborns: Vec<MAgent> = Vec::new();
    for &ai in &order {
        if !world.agents[ai].alive {
            continue;
        }
        let eligible =
            world.agents[ai].energy > world.agents[ai].replication_threshold as f64;
        if world.agents[ai].cog == CognitiveType::Cog1 && eligible {
            let agent = &mut world.agents[ai];
            agent.emotion.as_mut().expect("cog-1").desire_to_replicate = 1;
            agent.display = DisplayState::ReplicatePink;
        }
        if !eligible || !world.rng.random_bool(cfg.replication_p) {
            continue;
        }
        let offense_len = world.agents[ai].tags.offense.len();
        let alphabet = world.agents[ai].tags.offense.alphabet();
        let mut chain: Vec<u16> = world.agents[ai].tags.offense.letters().to_vec();
        chain.extend_from_slice(world.agents[ai].tags.defense.letters());
        mutate_chain(&mut chain, alphabet, cfg.mutation_p, &mut world.rng);
        let child_tags = TagPair::new(
            Chromosome::new(chain[..offense_len].to_vec(), alphabet),
            Chromosome::new(chain[offense_len..].to_vec(), alphabet),
        );

        world.agents[ai].energy /= 2.0;
        let mut child = MAgent::new(
            world.next_agent_id,
            child_tags,
            world.agents[ai].cog,
            cfg.agent_base_reservoir,
            world.agents[ai].patch,
        );
        world.next_agent_id += 1;
        child.energy = world.agents[ai].energy;

        if world.agents[ai].cog == CognitiveType::Cog1 {
            let agent = &mut world.agents[ai];
            agent.emotion.as_mut().expect("cog-1").desire_to_replicate = 0;
            evaluate(agent);
        }
        if child.cog == CognitiveType::Cog1 {
            evaluate(&mut child);
        }
        newborns.push(child);
    }
    world.agents.append(&mut newborns);

    // (5) death cleanup
    world.agents.retain(|a| a.alive);

    // (6) poison release, then its own cleanup
    for agent in world.agents.iter_mut() {
        if !agent.alive {
            continue;
        }
        agent.energy -= 1.0;
        if agent.energy <= 0.0 {
            agent.alive = false;
        }
    }
    world.agents.retain(|a| a.alive);

    // (7) movement
    let order = shuffled(world.agents.len(), &mut world.rng);
    for &ai in &order {
        if !world.agents[ai].alive {
            continue;
        }
        match world.agents[ai].cog {
            CognitiveType::Cog0 => {
                let (dx, dy) =
                    MOORE_OFFSETS[world.rng.random_range(0..MOORE_OFFSETS.len())];
                let agent = &mut world.agents[ai];
                agent.patch = wrap(width, agent.patch, dx, dy);
                agent.energy -= 1.0;
                if agent.energy <= 0.0 {
                    agent.alive = false;
                }
            }
            CognitiveType::Cog1 => {
                evaluate(&mut world.agents[ai]);
                let desire = world.agents[ai]
                    .emotion
                    .as_ref()
                    .expect("cog-1")
                    .desire_to_feed;
                let capacity = world.agents[ai].capacity;
                let hungry =
                    world.patches[world.agents[ai].patch].plantoid.energy < MEAL_QUANTUM;
                if (1.0 - desire) * capacity - 1.0 > STEP_EPS && hungry {
                    if let Some(target) =
                        best_neighbor(&world.patches, width, world.agents[ai].patch, &mut world.rng)
                    {
                        let agent = &mut world.agents[ai];
                        agent.patch = target;
                        agent.energy -= 1.0;
                        evaluate(agent);
                    }
                }
            }
        }
    }
    world.agents.retain(|a| a.alive);

    // (8) plantoid competition
    let order = shuffled(world.patches.len(), &mut world.rng);
    for &idx in &order {
        let own_energy = world.patches[idx].plantoid.energy;
        let threshold = 0.5 * own_energy;
        let mut candidates: Vec<usize> = Vec::with_capacity(8);
        for (dx, dy) in MOORE_OFFSETS {
            let n = wrap(width, idx, dx, dy);
            if world.patches[n].plantoid.energy < threshold {
                candidates.push(n);
            }
        }
        if candidates.is_empty() {
            continue;
        }
        let target = if candidates.len() == 1 {
            candidates[0]
        } else {
            candidates[world.rng.random_range(0..candidates.len())]
        };
        let alphabet = world.patches[idx].plantoid.chromosome.alphabet();
        let mut letters = world.patches[idx].plantoid.chromosome.letters().to_vec();
        mutate_chain(&mut letters, alphabet, cfg.mutation_p, &mut world.rng);
        let capacity = world.patches[target].capacity;
        world.patches[target].plantoid = Plantoid {
            chromosome: Chromosome::new(letters, alphabet),
            energy: capacity,
        };
    }

    world.tick += 1;
}
