//! Chromosomes over an n-letter formal alphabet, one-point mutation, and the
//! interface-matching scores that drive feeding and combat.

use std::fmt;

use rand::Rng;

/// A chromosome chain: a sequence of letter indices drawn from a formal
/// alphabet of `alphabet` letters. Always at least one letter long.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    letters: Vec<u16>,
    alphabet: u16,
}

impl Chromosome {
    pub fn new(letters: Vec<u16>, alphabet: u16) -> Self {
        assert!(alphabet >= 2, "alphabet size must be at least 2");
        assert!(!letters.is_empty(), "chromosome must be at least one letter long");
        assert!(
            letters.iter().all(|&l| l < alphabet),
            "chromosome letter outside the alphabet"
        );
        Self { letters, alphabet }
    }

    /// Random chromosome: every position an independent equiprobable draw
    /// from the alphabet.
    pub fn random(length: usize, alphabet: u16, rng: &mut impl Rng) -> Self {
        assert!(length >= 1, "chromosome length must be at least 1");
        assert!(alphabet >= 2, "alphabet size must be at least 2");
        let letters = (0..length).map(|_| rng.random_range(0..alphabet)).collect();
        Self { letters, alphabet }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn alphabet(&self) -> u16 {
        self.alphabet
    }

    pub fn letters(&self) -> &[u16] {
        &self.letters
    }

    /// Copy of this chromosome that, with probability `p`, carries a one-point
    /// mutation: a uniformly chosen position replaced by a uniformly chosen
    /// *different* letter. Length and alphabet never change.
    pub fn mutate_one_point(&self, p: f64, rng: &mut impl Rng) -> Self {
        let mut letters = self.letters.clone();
        if rng.random_bool(p) {
            let pos = rng.random_range(0..letters.len());
            let old = letters[pos];
            // Draw from the alphabet minus the current letter.
            let mut replacement = rng.random_range(0..self.alphabet - 1);
            if replacement >= old {
                replacement += 1;
            }
            letters[pos] = replacement;
        }
        Self {
            letters,
            alphabet: self.alphabet,
        }
    }
}

impl fmt::Display for Chromosome {
    /// Letters render as `a`, `b`, `c`, ... for alphabets up to 26 letters,
    /// falling back to dot-separated indices for larger ones. Display only;
    /// the simulation works on indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.alphabet <= 26 {
            for &l in &self.letters {
                write!(f, "{}", (b'a' + l as u8) as char)?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

/// Offense and defense tags of an m-agent. The full chromosome is the
/// offense chain followed by the defense chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagPair {
    pub offense: Chromosome,
    pub defense: Chromosome,
}

impl TagPair {
    pub fn new(offense: Chromosome, defense: Chromosome) -> Self {
        assert_eq!(
            offense.alphabet, defense.alphabet,
            "offense and defense tags must share an alphabet"
        );
        Self { offense, defense }
    }

    /// Random tag pair: each tag's length uniform in 1..=max_len, letters
    /// uniform over the alphabet.
    pub fn random(max_len: usize, alphabet: u16, rng: &mut impl Rng) -> Self {
        let offense_len = rng.random_range(1..=max_len);
        let offense = Chromosome::random(offense_len, alphabet, rng);
        let defense_len = rng.random_range(1..=max_len);
        let defense = Chromosome::random(defense_len, alphabet, rng);
        Self { offense, defense }
    }

    /// Combined length of the full chromosome chain.
    pub fn total_len(&self) -> usize {
        self.offense.len() + self.defense.len()
    }

    /// One-point mutation over the concatenated chain, re-split at the
    /// offense/defense boundary, so a single mutation can land in either tag.
    pub fn mutate_one_point(&self, p: f64, rng: &mut impl Rng) -> Self {
        let alphabet = self.offense.alphabet;
        let mut full: Vec<u16> = Vec::with_capacity(self.total_len());
        full.extend_from_slice(self.offense.letters());
        full.extend_from_slice(self.defense.letters());
        let mutated = Chromosome::new(full, alphabet).mutate_one_point(p, rng);
        let (off, def) = mutated.letters().split_at(self.offense.len());
        Self {
            offense: Chromosome::new(off.to_vec(), alphabet),
            defense: Chromosome::new(def.to_vec(), alphabet),
        }
    }
}

/// Letter-by-letter comparison counts over a shared prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchResult {
    /// Number of positions where the letters agree.
    pub matching: u32,
    /// Number of compared positions where they differ.
    pub mismatching: u32,
}

impl MatchResult {
    pub fn compared(&self) -> u32 {
        self.matching + self.mismatching
    }

    /// Matching level: matching minus mismatching letters.
    pub fn level(&self) -> f64 {
        self.matching as f64 - self.mismatching as f64
    }
}

/// Compare the first `min(len(a), len(b))` letters of two chains.
pub fn match_prefix(a: &Chromosome, b: &Chromosome) -> MatchResult {
    debug_assert_eq!(a.alphabet, b.alphabet, "cannot compare across alphabets");
    let k = a.len().min(b.len());
    let matching = a.letters[..k]
        .iter()
        .zip(&b.letters[..k])
        .filter(|(x, y)| x == y)
        .count() as u32;
    MatchResult {
        matching,
        mismatching: k as u32 - matching,
    }
}

/// Nonnegative interface score from a matching level over `k` compared
/// letters: 0.5 * (matching - mismatching + k) + 1, which lies in [1, k+1].
fn interface_score(m: MatchResult, k: usize) -> f64 {
    0.5 * (m.level() + k as f64) + 1.0
}

/// Feeding interface score of an m-agent's offense tag against a plantoid's
/// chromosome. The score is computed over the shorter of the two lengths and
/// halved when shortness is on the agent's side.
pub fn plantoid_score(offense: &Chromosome, plantoid: &Chromosome) -> f64 {
    let m = match_prefix(offense, plantoid);
    let k = offense.len().min(plantoid.len());
    let score = interface_score(m, k);
    if offense.len() >= plantoid.len() {
        score
    } else {
        score * 0.5
    }
}

/// Combat interface scores for a predator/prey confrontation.
///
/// The first score weighs the predator's offense tag against the prey's
/// defense tag; the second weighs the prey's offense tag against the
/// predator's defense tag. Both use the length of the *longest* tag in the
/// comparison. A predator avoids the 0.5 penalty when its tag is at least as
/// long as the prey's; a prey avoids it only with a strictly longer tag.
pub fn combat_scores(predator: &TagPair, prey: &TagPair) -> (f64, f64) {
    let attack = match_prefix(&predator.offense, &prey.defense);
    let k_attack = predator.offense.len().max(prey.defense.len());
    let u_attack = if predator.offense.len() < prey.defense.len() {
        0.5
    } else {
        1.0
    };
    let s_attack = interface_score(attack, k_attack) * u_attack;

    let counter = match_prefix(&prey.offense, &predator.defense);
    let k_counter = prey.offense.len().max(predator.defense.len());
    let u_counter = if prey.offense.len() > predator.defense.len() {
        1.0
    } else {
        0.5
    };
    let s_counter = interface_score(counter, k_counter) * u_counter;

    (s_attack, s_counter)
}
