//! Greedy maximal-Hamming permutation-set generation.
//!
//! The symmetric group blows up fast (9! = 362,880), so classification runs
//! on a small set of maximally diverse permutations built greedily: start
//! from a seeded uniform draw, then repeatedly add the candidate that
//! maximizes the minimum Hamming distance to the members chosen so far.
//! Ties fall to the larger distance sum, then to the lexicographically
//! smallest mapping, which makes generation fully deterministic for a given
//! `(n_steps, set_size, seed, pool_size)`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{enumerate_all, PermError, Permutation};

/// Exhaustive candidate enumeration is used up to this many steps; beyond it
/// each greedy iteration draws a fresh seeded sample of `pool_size`
/// candidates instead.
const EXHAUSTIVE_LIMIT: usize = 8;

/// An ordered set of distinct equal-length permutations. The index of a
/// permutation in `permutations` is its classification label, stable for a
/// given generation seed and stable across save/load.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationSet {
    pub n_steps: usize,
    pub set_size: usize,
    pub seed: u64,
    pub pool_size: usize,
    pub permutations: Vec<Permutation>,
}

impl PermutationSet {
    /// Wraps an explicit list of permutations, validating set invariants.
    pub fn from_permutations(
        permutations: Vec<Permutation>,
        seed: u64,
        pool_size: usize,
    ) -> Result<Self, PermError> {
        let set = Self {
            n_steps: permutations.first().map_or(0, Permutation::len),
            set_size: permutations.len(),
            seed,
            pool_size,
            permutations,
        };
        set.validate()?;
        Ok(set)
    }

    /// Checks distinctness, equal lengths, and header consistency.
    pub fn validate(&self) -> Result<(), PermError> {
        if self.permutations.is_empty() {
            return Err(PermError::InvalidSet("no permutations".into()));
        }
        if self.set_size != self.permutations.len() {
            return Err(PermError::InvalidSet(format!(
                "set_size {} does not match {} stored permutations",
                self.set_size,
                self.permutations.len()
            )));
        }
        let mut seen = HashSet::new();
        for (idx, p) in self.permutations.iter().enumerate() {
            if p.len() != self.n_steps {
                return Err(PermError::InvalidSet(format!(
                    "permutation at label {idx} has length {}, expected {}",
                    p.len(),
                    self.n_steps
                )));
            }
            if !seen.insert(p.mapping().to_vec()) {
                return Err(PermError::InvalidSet(format!(
                    "permutation at label {idx} duplicates an earlier one"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.permutations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutations.is_empty()
    }

    /// The permutation carrying classification label `label`.
    pub fn get(&self, label: usize) -> Option<&Permutation> {
        self.permutations.get(label)
    }

    /// Smallest pairwise Hamming distance in the set.
    pub fn min_pairwise_hamming(&self) -> usize {
        let mut min = usize::MAX;
        for i in 0..self.permutations.len() {
            for j in (i + 1)..self.permutations.len() {
                let d = self.permutations[i]
                    .hamming_distance(&self.permutations[j])
                    .expect("equal lengths");
                min = min.min(d);
            }
        }
        min
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("permutation set serializes")
    }

    pub fn write_to<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        writer.write_all(self.to_json_pretty().as_bytes())?;
        writer.write_all(b"\n")
    }

    pub fn save(&self, path: &Path) -> std::io::Result<()> {
        let file = File::create(path)?;
        self.write_to(BufWriter::new(file))
    }

    pub fn read_from<R: Read>(reader: R) -> Result<Self, SetLoadError> {
        let set: PermutationSet = serde_json::from_reader(reader)?;
        set.validate()?;
        Ok(set)
    }

    pub fn load(path: &Path) -> Result<Self, SetLoadError> {
        let file = File::open(path)?;
        Self::read_from(BufReader::new(file))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SetLoadError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed permutation set: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(#[from] PermError),
}

/// `n!` saturating at `u64::MAX`.
pub fn factorial_saturating(n: usize) -> u64 {
    (2..=n as u64).fold(1u64, |acc, k| acc.saturating_mul(k))
}

/// Greedily builds a set of `set_size` maximally diverse permutations of
/// length `n_steps`.
///
/// The first member is drawn uniformly from the candidate pool; each later
/// member maximizes the minimum Hamming distance to the chosen ones, with
/// ties broken by distance sum and then lexicographically. Output is
/// byte-identical across runs and platforms for equal arguments.
pub fn generate_max_hamming_set(
    n_steps: usize,
    set_size: usize,
    seed: u64,
    pool_size: usize,
) -> Result<PermutationSet, PermError> {
    if n_steps < 2 {
        return Err(PermError::TooShort(n_steps));
    }
    if set_size < 2 {
        return Err(PermError::SetSizeTooSmall(set_size));
    }
    let max = factorial_saturating(n_steps);
    if set_size as u64 > max {
        return Err(PermError::SetSizeTooLarge {
            requested: set_size,
            n_steps,
            max,
        });
    }
    if pool_size < set_size {
        return Err(PermError::PoolTooSmall {
            pool_size,
            set_size,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let permutations = if n_steps <= EXHAUSTIVE_LIMIT {
        greedy_exhaustive(n_steps, set_size, &mut rng)
    } else {
        greedy_pooled(n_steps, set_size, pool_size, &mut rng)?
    };

    Ok(PermutationSet {
        n_steps,
        set_size,
        seed,
        pool_size,
        permutations,
    })
}

/// Greedy selection over the full symmetric group, enumerated
/// lexicographically. Per-candidate (min, sum) distances to the chosen set
/// are maintained incrementally, so each iteration only compares against the
/// newest member.
fn greedy_exhaustive(n_steps: usize, set_size: usize, rng: &mut ChaCha8Rng) -> Vec<Permutation> {
    let pool = enumerate_all(n_steps);
    let first = rng.random_range(0..pool.len());

    let mut used = vec![false; pool.len()];
    let mut min_dist = vec![usize::MAX; pool.len()];
    let mut sum_dist = vec![0usize; pool.len()];

    used[first] = true;
    let mut chosen = vec![pool[first].clone()];

    while chosen.len() < set_size {
        let newest = chosen.last().expect("nonempty");
        let mut best: Option<usize> = None;
        for (idx, candidate) in pool.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let d = candidate.hamming_distance(newest).expect("equal lengths");
            min_dist[idx] = min_dist[idx].min(d);
            sum_dist[idx] += d;
            let better = match best {
                None => true,
                // pool is in lexicographic order, so strict improvement
                // leaves the lexicographically smallest winner in place
                Some(b) => {
                    (min_dist[idx], sum_dist[idx]) > (min_dist[b], sum_dist[b])
                }
            };
            if better {
                best = Some(idx);
            }
        }
        let pick = best.expect("set_size <= n! leaves candidates");
        used[pick] = true;
        chosen.push(pool[pick].clone());
    }
    chosen
}

/// Greedy selection with a fresh seeded sample of `pool_size` candidates per
/// iteration, deduplicated against already-chosen members.
fn greedy_pooled(
    n_steps: usize,
    set_size: usize,
    pool_size: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Permutation>, PermError> {
    let mut chosen: Vec<Permutation> = vec![Permutation::random(n_steps, rng)?];
    let mut chosen_keys: HashSet<Vec<usize>> = HashSet::new();
    chosen_keys.insert(chosen[0].mapping().to_vec());

    while chosen.len() < set_size {
        let mut best: Option<(usize, usize, Permutation)> = None;
        let mut drawn = 0usize;
        let mut attempts = 0usize;
        // Oversampling bound only matters when set_size approaches n!.
        let max_attempts = pool_size.saturating_mul(1000);
        while drawn < pool_size {
            attempts += 1;
            if attempts > max_attempts {
                return Err(PermError::InvalidSet(format!(
                    "could not draw {pool_size} candidates distinct from the \
                     {} chosen members",
                    chosen.len()
                )));
            }
            let candidate = Permutation::random(n_steps, rng)?;
            if chosen_keys.contains(candidate.mapping()) {
                continue;
            }
            drawn += 1;
            let mut min = usize::MAX;
            let mut sum = 0usize;
            for member in &chosen {
                let d = candidate.hamming_distance(member).expect("equal lengths");
                min = min.min(d);
                sum += d;
            }
            let better = match &best {
                None => true,
                Some((bmin, bsum, bperm)) => {
                    (min, sum) > (*bmin, *bsum)
                        || ((min, sum) == (*bmin, *bsum) && candidate.mapping() < bperm.mapping())
                }
            };
            if better {
                best = Some((min, sum, candidate));
            }
        }
        let (_, _, pick) = best.expect("pool_size >= 1");
        chosen_keys.insert(pick.mapping().to_vec());
        chosen.push(pick);
    }
    Ok(chosen)
}
