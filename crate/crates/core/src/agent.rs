//! Mobile agents (m-agents): state, the cog-1 somatic computations that turn
//! body state into desire/fear responses, and the display colors those
//! responses drive.

use serde::Serialize;
use thiserror::Error;

use crate::genome::TagPair;

/// Tolerance absorbing the float round trip through the desire level, so an
/// agent holding exactly one unit of energy never takes a fatal step.
const STEP_EPS: f64 = 1e-9;

/// Cognitive grade of an m-agent. Inherited exactly; never mutates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CognitiveType {
    /// Reflexless automaton: feeds, fights and moves mechanically.
    Cog0,
    /// Emotional-response agent: evaluates its body state and anticipates
    /// conflict outcomes before acting.
    Cog1,
}

/// Emotional state carried only by cog-1 agents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Emotion {
    /// Desire to feed: the empty fraction of the reservoir.
    pub desire_to_feed: f64,
    /// 1 while the replication threshold is exceeded, 0 otherwise.
    pub desire_to_replicate: u8,
    /// Fear level from the most recent conflict appraisal (display/log only).
    pub last_fear: f64,
    /// Desire level from the most recent conflict appraisal (display/log only).
    pub last_desire: f64,
}

/// Color-relevant state of an agent; presentation only, never read by the
/// dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisplayState {
    /// Gray ramp: the hungrier the agent, the paler. Level in 0..=9.
    Normal(u8),
    /// Fear won the appraisal; the conflict was avoided.
    FearYellow,
    /// Desire won; the agent attacked.
    AttackRed,
    /// The replication threshold is exceeded.
    ReplicatePink,
}

impl DisplayState {
    /// RGB color used by PPM snapshots.
    pub fn color(&self) -> [u8; 3] {
        match self {
            DisplayState::Normal(level) => {
                let g = 40 + 20 * (*level).min(9);
                [g, g, g]
            }
            DisplayState::FearYellow => [255, 255, 0],
            DisplayState::AttackRed => [255, 0, 0],
            DisplayState::ReplicatePink => [255, 105, 180],
        }
    }
}

/// Per-tick action bookkeeping used to assert the phase-order invariant:
/// no agent feeds, fights as predator, replicates or moves twice in a tick.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PhaseFlags {
    pub fed: bool,
    pub hunted: bool,
    pub replicated: bool,
    pub moved: bool,
}

/// A mobile replicator.
#[derive(Debug, Clone, PartialEq)]
pub struct MAgent {
    pub id: u64,
    pub tags: TagPair,
    pub cog: CognitiveType,
    /// Current energy reservoir level R(i).
    pub energy: f64,
    /// Maximum reservoir capacity: base reservoir plus total chromosome length.
    pub capacity: f64,
    /// Replication threshold: the total chromosome length.
    pub replication_threshold: u32,
    /// Flat index of the patch the agent stands on.
    pub patch: usize,
    /// Some for cog-1 agents, None for cog-0.
    pub emotion: Option<Emotion>,
    pub display: DisplayState,
    pub alive: bool,
    pub(crate) acted: PhaseFlags,
}

impl MAgent {
    /// Newborn agent at full reservoir. Capacity and threshold derive from
    /// the tag pair; cog-1 callers still owe an `evaluate_internal_state`.
    pub fn new(id: u64, tags: TagPair, cog: CognitiveType, base_reservoir: f64, patch: usize) -> Self {
        let total_len = tags.total_len() as u32;
        let capacity = base_reservoir + total_len as f64;
        Self {
            id,
            tags,
            cog,
            energy: capacity,
            capacity,
            replication_threshold: total_len,
            patch,
            emotion: (cog == CognitiveType::Cog1).then(Emotion::default),
            display: DisplayState::Normal(0),
            alive: true,
            acted: PhaseFlags::default(),
        }
    }

    /// Recompute the desire to feed from the current reservoir and refresh
    /// the paleness display. Cog-1 only; calling this on a cog-0 is a
    /// programming error.
    pub fn evaluate_internal_state(&mut self) {
        let d = desire_to_feed(self.energy, self.capacity);
        let emotion = self
            .emotion
            .as_mut()
            .expect("evaluate_internal_state called on a cog-0 agent");
        emotion.desire_to_feed = d;
        self.display = DisplayState::Normal(paleness_level(d));
    }

    pub fn is_cog1(&self) -> bool {
        self.cog == CognitiveType::Cog1
    }
}

/// Desire to feed D = 1 - R/Rc: the proportion of the reservoir that is empty.
pub fn desire_to_feed(energy: f64, capacity: f64) -> f64 {
    assert!(capacity > 0.0, "reservoir capacity must be positive");
    debug_assert!(
        (0.0..=capacity).contains(&energy),
        "energy {energy} outside [0, {capacity}]"
    );
    1.0 - energy / capacity
}

/// Quantize a desire level into one of 10 paleness display levels.
pub fn paleness_level(d: f64) -> u8 {
    ((d.max(0.0) * 10.0) as u8).min(9)
}

/// Whether an agent with desire level `d` and capacity `rc` can afford a
/// one-unit step: (1 - d) * rc - 1 > 0, i.e. more than one unit of energy
/// remains. At exactly one unit the step would be fatal and is refused.
pub fn may_step(d: f64, rc: f64) -> bool {
    (1.0 - d) * rc - 1.0 > STEP_EPS
}

/// Both prospective transfers are zero, so the conflict has no stakes to
/// appraise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("degenerate conflict: both prospective transfers are zero")]
pub struct DegenerateConflict;

/// Predator-side appraisal of a prospective conflict. `outgoing` is the
/// transfer the predator would concede to the prey, `incoming` the transfer
/// it would receive. Fear is the predator's relative share of the losses;
/// desire is the complement.
pub fn predator_fear_desire(outgoing: f64, incoming: f64) -> Result<(f64, f64), DegenerateConflict> {
    let total = outgoing + incoming;
    if total <= 0.0 {
        return Err(DegenerateConflict);
    }
    let fear = outgoing / total;
    Ok((fear, 1.0 - fear))
}

/// Prey-side appraisal: fear of the transfer conceded to the predator,
/// desire for the counterattack gain. Normalized so fear + desire = 1.
pub fn prey_fear_desire(to_predator: f64, from_predator: f64) -> Result<(f64, f64), DegenerateConflict> {
    let total = to_predator + from_predator;
    if total <= 0.0 {
        return Err(DegenerateConflict);
    }
    let fear = to_predator / total;
    Ok((fear, 1.0 - fear))
}

/// Outcome of weighing fear against desire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackChoice {
    Attack,
    Avoid,
}

/// Avoid the conflict only when fear strictly surpasses desire.
pub fn attack_decision(fear: f64, desire: f64) -> AttackChoice {
    if fear > desire {
        AttackChoice::Avoid
    } else {
        AttackChoice::Attack
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genome::{Chromosome, TagPair};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn test_agent(cog: CognitiveType) -> MAgent {
        let tags = TagPair::new(
            Chromosome::new(vec![0, 1], 4),
            Chromosome::new(vec![2, 3], 4),
        );
        MAgent::new(1, tags, cog, 10.0, 0)
    }

    #[test]
    fn desire_to_feed_matches_the_reservoir_gap() {
        assert_eq!(desire_to_feed(12.0, 12.0), 0.0);
        assert_eq!(desire_to_feed(0.0, 12.0), 1.0);
        assert_eq!(desire_to_feed(3.0, 12.0), 0.75);
    }

    #[test]
    #[should_panic(expected = "capacity must be positive")]
    fn desire_to_feed_rejects_nonpositive_capacity() {
        desire_to_feed(1.0, 0.0);
    }

    #[test]
    fn may_step_refuses_the_fatal_step() {
        // R = 1 exactly: (1 - D) * Rc - 1 = 0, the step would kill the agent.
        for rc in [2.0, 10.0, 12.0, 37.0] {
            let d = desire_to_feed(1.0, rc);
            assert!(!may_step(d, rc), "agent at one unit stepped (rc = {rc})");
        }
        let rc = 12.0;
        assert!(may_step(desire_to_feed(1.5, rc), rc));
    }

    #[test]
    fn may_step_agrees_with_the_direct_energy_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100_000 {
            let rc = rng.random_range(1.0..60.0);
            let r = rng.random_range(0.0..=rc);
            let d = desire_to_feed(r, rc);
            assert_eq!(may_step(d, rc), r > 1.0, "r = {r}, rc = {rc}");
        }
    }

    #[test]
    fn predator_appraisal_normalizes() {
        assert_eq!(predator_fear_desire(4.0, 4.0), Ok((0.5, 0.5)));
        let (f, d) = predator_fear_desire(2.0, 6.0).unwrap();
        assert_eq!((f, d), (0.25, 0.75));
    }

    #[test]
    fn fear_plus_desire_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100_000 {
            let a = rng.random_range(0.0..50.0);
            let b = rng.random_range(f64::MIN_POSITIVE..50.0);
            let (f, d) = predator_fear_desire(a, b).unwrap();
            assert_eq!(f + d, 1.0);
            let (pf, pd) = prey_fear_desire(a, b).unwrap();
            assert_eq!(pf + pd, 1.0);
            // The prey's fear of the same conflict is the predator's desire.
            let (qf, _) = prey_fear_desire(b, a).unwrap();
            assert!((qf - d).abs() < 1e-15);
        }
    }

    #[test]
    fn prey_appraisal_hand_values() {
        assert_eq!(prey_fear_desire(3.0, 3.0), Ok((0.5, 0.5)));
        let (f, d) = prey_fear_desire(1.0, 3.0).unwrap();
        assert_eq!((f, d), (0.25, 0.75));
    }

    #[test]
    fn degenerate_conflict_is_an_error_at_the_operation_level() {
        assert_eq!(predator_fear_desire(0.0, 0.0), Err(DegenerateConflict));
        assert_eq!(prey_fear_desire(0.0, 0.0), Err(DegenerateConflict));
    }

    #[test]
    fn attack_on_ties_avoid_on_strict_fear() {
        assert_eq!(attack_decision(0.5, 0.5), AttackChoice::Attack);
        assert_eq!(attack_decision(0.51, 0.49), AttackChoice::Avoid);
        assert_eq!(attack_decision(0.49, 0.51), AttackChoice::Attack);
    }

    #[test]
    fn attack_decision_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let t_out = rng.random_range(0.0..20.0);
            let t_in = rng.random_range(f64::MIN_POSITIVE..20.0);
            let scale = rng.random_range(0.001..1000.0);
            let (f1, d1) = predator_fear_desire(t_out, t_in).unwrap();
            let (f2, d2) = predator_fear_desire(t_out * scale, t_in * scale).unwrap();
            assert_eq!(attack_decision(f1, d1), attack_decision(f2, d2));
            // Attack exactly when the incoming transfer is at least the outgoing.
            assert_eq!(attack_decision(f1, d1) == AttackChoice::Attack, t_in >= t_out);
        }
    }

    #[test]
    fn evaluate_internal_state_round_trips_the_reservoir() {
        let mut agent = test_agent(CognitiveType::Cog1);
        agent.energy = agent.capacity / 2.0;
        agent.evaluate_internal_state();
        let d = agent.emotion.unwrap().desire_to_feed;
        assert_eq!(d, 0.5);
        // Desire round trip: R = (1 - D) * Rc to machine precision.
        assert!(((1.0 - d) * agent.capacity - agent.energy).abs() <= 1e-12 * agent.capacity);

        agent.energy = agent.capacity;
        agent.evaluate_internal_state();
        assert_eq!(agent.emotion.unwrap().desire_to_feed, 0.0);
        assert_eq!(agent.display, DisplayState::Normal(0));

        // Idempotent when nothing changed.
        let before = agent.clone();
        agent.evaluate_internal_state();
        assert_eq!(agent, before);
    }

    #[test]
    #[should_panic(expected = "called on a cog-0")]
    fn evaluate_internal_state_rejects_cog0() {
        let mut agent = test_agent(CognitiveType::Cog0);
        agent.evaluate_internal_state();
    }

    #[test]
    fn newborn_capacity_and_threshold_derive_from_the_tags() {
        let agent = test_agent(CognitiveType::Cog1);
        assert_eq!(agent.capacity, 14.0);
        assert_eq!(agent.replication_threshold, 4);
        assert_eq!(agent.energy, agent.capacity);
        assert!(agent.emotion.is_some());
        assert!(test_agent(CognitiveType::Cog0).emotion.is_none());
    }

    #[test]
    fn paleness_ramp_is_monotone_and_quantized() {
        assert_eq!(paleness_level(0.0), 0);
        assert_eq!(paleness_level(0.05), 0);
        assert_eq!(paleness_level(0.55), 5);
        assert_eq!(paleness_level(1.0), 9);
        let mut last = 0;
        for i in 0..=100 {
            let level = paleness_level(i as f64 / 100.0);
            assert!(level >= last);
            last = level;
        }
        // Paler (lighter gray) the hungrier the agent.
        let dark = DisplayState::Normal(0).color();
        let pale = DisplayState::Normal(9).color();
        assert!(pale[0] > dark[0]);
    }
}
