//! Permutations over recipe-step indices.
//!
//! A [`Permutation`] is a bijection `ψ` over `{1..N}`, stored as the value
//! sequence `(ψ(1), …, ψ(N))`. All external representations are 1-indexed.
//! The module provides the two distance metrics used for set generation and
//! evaluation (positionwise Hamming and Kendall's tau), embedding codecs
//! ([`lehmer_encode`] / [`hamming_encode`] and their inverses), and greedy
//! maximal-Hamming set generation ([`generate_max_hamming_set`]).

mod codec;
mod maxset;

pub use codec::{
    hamming_decode, hamming_encode, lehmer_decode, lehmer_encode, HammingEmbedding,
    LehmerEmbedding,
};
pub use maxset::{factorial_saturating, generate_max_hamming_set, PermutationSet};

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Why a mapping failed bijection validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BijectionFault {
    /// The value already appeared at an earlier position.
    Duplicate,
    /// The value lies outside `1..=N`.
    OutOfRange,
}

impl fmt::Display for BijectionFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BijectionFault::Duplicate => write!(f, "duplicate"),
            BijectionFault::OutOfRange => write!(f, "out of range"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    /// The mapping is not a bijection over `1..=N`. Position is 1-indexed.
    #[error("not a bijection: {fault} value {value} at position {position}")]
    NotABijection {
        position: usize,
        value: usize,
        fault: BijectionFault,
    },
    #[error("permutation must have at least 2 elements, got {0}")]
    TooShort(usize),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    /// A Lehmer code entry exceeds its positional bound. Position is 1-indexed.
    #[error("invalid Lehmer code: entry {value} at position {position} exceeds {max}")]
    InvalidLehmerCode {
        position: usize,
        value: usize,
        max: usize,
    },
    #[error("invalid Hamming embedding: {0}")]
    InvalidHammingEmbedding(String),
    #[error("set size {requested} exceeds the {n_steps}! = {max} distinct permutations")]
    SetSizeTooLarge {
        requested: usize,
        n_steps: usize,
        max: u64,
    },
    #[error("set size must be at least 2, got {0}")]
    SetSizeTooSmall(usize),
    #[error("candidate pool size {pool_size} is smaller than set size {set_size}")]
    PoolTooSmall { pool_size: usize, set_size: usize },
    #[error("permutation set invalid: {0}")]
    InvalidSet(String),
}

/// A bijection over step indices `1..=N`, stored as `(ψ(1), …, ψ(N))`.
///
/// Serializes as a bare 1-indexed integer array and re-validates on
/// deserialization, so permutation-set files reject corrupt mappings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    /// Validates `mapping` as a bijection over `{1..N}` with `N ≥ 2`.
    pub fn new(mapping: Vec<usize>) -> Result<Self, PermError> {
        let n = mapping.len();
        if n < 2 {
            return Err(PermError::TooShort(n));
        }
        let mut seen = vec![false; n];
        for (idx, &value) in mapping.iter().enumerate() {
            if value < 1 || value > n {
                return Err(PermError::NotABijection {
                    position: idx + 1,
                    value,
                    fault: BijectionFault::OutOfRange,
                });
            }
            if seen[value - 1] {
                return Err(PermError::NotABijection {
                    position: idx + 1,
                    value,
                    fault: BijectionFault::Duplicate,
                });
            }
            seen[value - 1] = true;
        }
        Ok(Self { mapping })
    }

    /// The identity permutation of length `n`.
    pub fn identity(n: usize) -> Result<Self, PermError> {
        Self::new((1..=n).collect())
    }

    /// A uniformly random permutation of length `n`.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self, PermError> {
        if n < 2 {
            return Err(PermError::TooShort(n));
        }
        let mut mapping: Vec<usize> = (1..=n).collect();
        mapping.shuffle(rng);
        Ok(Self { mapping })
    }

    /// Number of elements `N`.
    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// The stored value sequence `(ψ(1), …, ψ(N))`, 1-indexed values.
    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    /// `ψ(i)` for 1-indexed `i`.
    pub fn value_at(&self, i: usize) -> usize {
        self.mapping[i - 1]
    }

    /// The inverse bijection: `inv(ψ(i)) = i`.
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.mapping.len()];
        for (idx, &value) in self.mapping.iter().enumerate() {
            inv[value - 1] = idx + 1;
        }
        Self { mapping: inv }
    }

    /// Composition `self ∘ other`: applies `other` first, i.e.
    /// `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Result<Self, PermError> {
        check_equal_len(self, other)?;
        let mapping = other.mapping.iter().map(|&v| self.mapping[v - 1]).collect();
        Ok(Self { mapping })
    }

    /// Number of positions where the two permutations disagree.
    pub fn hamming_distance(&self, other: &Self) -> Result<usize, PermError> {
        check_equal_len(self, other)?;
        Ok(self
            .mapping
            .iter()
            .zip(&other.mapping)
            .filter(|(a, b)| a != b)
            .count())
    }

    /// Number of discordant pairs between the two permutations; equals the
    /// inversion count of `other ∘ self⁻¹`.
    pub fn kendall_tau_distance(&self, other: &Self) -> Result<usize, PermError> {
        check_equal_len(self, other)?;
        let n = self.mapping.len();
        let mut discordant = 0usize;
        for i in 0..n {
            for j in (i + 1)..n {
                let a = self.mapping[i] as isize - self.mapping[j] as isize;
                let b = other.mapping[i] as isize - other.mapping[j] as isize;
                if a * b < 0 {
                    discordant += 1;
                }
            }
        }
        Ok(discordant)
    }

    /// Reorders `items` so that output position `i` holds `items[ψ(i)]`
    /// (1-indexed). Applying the inverse permutation restores the input.
    pub fn apply<T: Clone>(&self, items: &[T]) -> Result<Vec<T>, PermError> {
        if items.len() != self.mapping.len() {
            return Err(PermError::LengthMismatch {
                left: items.len(),
                right: self.mapping.len(),
            });
        }
        Ok(self.mapping.iter().map(|&v| items[v - 1].clone()).collect())
    }
}

fn check_equal_len(p: &Permutation, q: &Permutation) -> Result<(), PermError> {
    if p.len() != q.len() {
        return Err(PermError::LengthMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    Ok(())
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = PermError;

    fn try_from(mapping: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(mapping)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.mapping
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (idx, v) in self.mapping.iter().enumerate() {
            if idx > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// All permutations of `{1..n}` in lexicographic order. Intended for small
/// `n`; the greedy generator caps exhaustive enumeration at `n = 8`.
pub fn enumerate_all(n: usize) -> Vec<Permutation> {
    let mut current: Vec<usize> = (1..=n).collect();
    let mut out = Vec::new();
    loop {
        out.push(Permutation {
            mapping: current.clone(),
        });
        if !next_lexicographic(&mut current) {
            break;
        }
    }
    out
}

/// Advances `a` to its lexicographic successor; false once at the last one.
fn next_lexicographic(a: &mut [usize]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validate_accepts_identity() {
        let p = Permutation::new(vec![1, 2, 3, 4]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.mapping(), &[1, 2, 3, 4]);
    }

    #[test]
    fn validate_accepts_worked_example() {
        let p = Permutation::new(vec![4, 3, 1, 2]).unwrap();
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn validate_rejects_duplicate() {
        let err = Permutation::new(vec![1, 1, 3]).unwrap_err();
        assert_eq!(
            err,
            PermError::NotABijection {
                position: 2,
                value: 1,
                fault: BijectionFault::Duplicate,
            }
        );
    }

    #[test]
    fn validate_rejects_out_of_range() {
        let err = Permutation::new(vec![1, 2, 5]).unwrap_err();
        assert_eq!(
            err,
            PermError::NotABijection {
                position: 3,
                value: 5,
                fault: BijectionFault::OutOfRange,
            }
        );
        assert!(matches!(
            Permutation::new(vec![0, 1]).unwrap_err(),
            PermError::NotABijection { position: 1, .. }
        ));
    }

    #[test]
    fn validate_rejects_too_short() {
        assert_eq!(Permutation::new(vec![]).unwrap_err(), PermError::TooShort(0));
        assert_eq!(
            Permutation::new(vec![1]).unwrap_err(),
            PermError::TooShort(1)
        );
    }

    #[test]
    fn hamming_distance_examples() {
        let id = Permutation::identity(4).unwrap();
        let q = Permutation::new(vec![4, 3, 1, 2]).unwrap();
        assert_eq!(id.hamming_distance(&id).unwrap(), 0);
        assert_eq!(id.hamming_distance(&q).unwrap(), 4);

        let p = Permutation::identity(3).unwrap();
        let r = Permutation::new(vec![1, 3, 2]).unwrap();
        assert_eq!(p.hamming_distance(&r).unwrap(), 2);
    }

    #[test]
    fn hamming_distance_length_mismatch() {
        let p = Permutation::identity(3).unwrap();
        let q = Permutation::identity(4).unwrap();
        assert_eq!(
            p.hamming_distance(&q).unwrap_err(),
            PermError::LengthMismatch { left: 3, right: 4 }
        );
    }

    #[test]
    fn kendall_tau_examples() {
        let id = Permutation::identity(4).unwrap();
        assert_eq!(id.kendall_tau_distance(&id).unwrap(), 0);

        let q = Permutation::new(vec![4, 3, 1, 2]).unwrap();
        assert_eq!(id.kendall_tau_distance(&q).unwrap(), 5);

        let rev = Permutation::new(vec![4, 3, 2, 1]).unwrap();
        assert_eq!(id.kendall_tau_distance(&rev).unwrap(), 6);
    }

    #[test]
    fn kendall_tau_equals_inversions_of_composition() {
        // d(p, q) must equal the inversion count of q ∘ p⁻¹.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let p = Permutation::random(7, &mut rng).unwrap();
            let q = Permutation::random(7, &mut rng).unwrap();
            let r = q.compose(&p.inverse()).unwrap();
            let inversions = Permutation::identity(7)
                .unwrap()
                .kendall_tau_distance(&r)
                .unwrap();
            assert_eq!(p.kendall_tau_distance(&q).unwrap(), inversions);
        }
    }

    #[test]
    fn apply_reorders_and_inverse_restores() {
        let steps = vec!["s1", "s2", "s3", "s4"];
        let p = Permutation::new(vec![4, 3, 1, 2]).unwrap();
        let shuffled = p.apply(&steps).unwrap();
        assert_eq!(shuffled, vec!["s4", "s3", "s1", "s2"]);
        let restored = p.inverse().apply(&shuffled).unwrap();
        assert_eq!(restored, steps);

        let id = Permutation::identity(2).unwrap();
        assert_eq!(id.apply(&["a", "b"]).unwrap(), vec!["a", "b"]);
    }

    #[test]
    fn apply_length_mismatch() {
        let p = Permutation::identity(3).unwrap();
        assert_eq!(
            p.apply(&["a", "b"]).unwrap_err(),
            PermError::LengthMismatch { left: 2, right: 3 }
        );
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=9 {
            let p = Permutation::random(n, &mut rng).unwrap();
            let id = Permutation::identity(n).unwrap();
            assert_eq!(p.compose(&p.inverse()).unwrap(), id);
            assert_eq!(p.inverse().compose(&p).unwrap(), id);
        }
    }

    #[test]
    fn enumerate_all_is_lexicographic_and_complete() {
        let all = enumerate_all(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all[0].mapping(), &[1, 2, 3, 4]);
        assert_eq!(all[23].mapping(), &[4, 3, 2, 1]);
        for w in all.windows(2) {
            assert!(w[0].mapping() < w[1].mapping());
        }
    }

    #[test]
    fn serde_roundtrip_and_rejects_bad_mapping() {
        let p = Permutation::new(vec![4, 3, 1, 2]).unwrap();
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, "[4,3,1,2]");
        let back: Permutation = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Permutation>("[1,1,3]").is_err());
    }
}
