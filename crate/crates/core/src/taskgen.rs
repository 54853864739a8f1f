//! Training-example generators for the three pre-training tasks.
//!
//! All randomness is keyed by `(seed, stream position)`: example `k` of a
//! stream is produced from an RNG that depends only on the seed and `k`, so
//! streaming and batched generation agree and reruns are byte-identical.
//!
//! Emitted JSONL schemas, one object per line:
//!
//! - perm-class: `{"recipe_id", "permuted_steps", "label", "permset_ref"}`
//! - emb-reg: adds `{"target": [int], "kind"}`
//! - skip-clip: `{"recipe_id", "context_steps", "targets": [{"t", "text"}]}`

use rand::SeedableRng;
use rand::{seq::index::sample, Rng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Recipe;
use crate::perm::{hamming_encode, lehmer_encode, PermutationSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskGenError {
    #[error("recipe {recipe_id}: expected {expected} steps, found {found}")]
    StepCountMismatch {
        recipe_id: String,
        expected: usize,
        found: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// RNG for stream position `position` under `seed`.
fn position_rng(seed: u64, position: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(position);
    rng
}

/// Which permutation embedding a regression example targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    Lehmer,
    Hamming,
}

impl std::fmt::Display for EmbeddingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EmbeddingKind::Lehmer => write!(f, "lehmer"),
            EmbeddingKind::Hamming => write!(f, "hamming"),
        }
    }
}

/// A permuted recipe labeled with the index of the applied permutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermClassExample {
    pub recipe_id: String,
    pub permuted_steps: Vec<String>,
    pub label: usize,
    pub permset_ref: String,
}

/// A permuted recipe whose target is the embedding of the applied
/// permutation (length N for Lehmer, N² for Hamming).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbRegExample {
    pub recipe_id: String,
    pub permuted_steps: Vec<String>,
    pub label: usize,
    pub permset_ref: String,
    pub target: Vec<u32>,
    pub kind: EmbeddingKind,
}

/// One target step with its original 1-indexed position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipClipTarget {
    pub t: usize,
    pub text: String,
}

/// The first K steps as context plus M later steps as ranking targets,
/// sorted ascending by original index; every `t > K`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipClipExample {
    pub recipe_id: String,
    pub context_steps: Vec<String>,
    pub targets: Vec<SkipClipTarget>,
}

/// Draws the permutation label for stream position `position`.
fn choose_label(pset: &PermutationSet, seed: u64, position: u64) -> usize {
    position_rng(seed, position).random_range(0..pset.len())
}

/// Builds the classification example for one recipe at a stream position.
pub fn perm_class_example(
    recipe: &Recipe,
    pset: &PermutationSet,
    permset_ref: &str,
    seed: u64,
    position: u64,
) -> Result<PermClassExample, TaskGenError> {
    if recipe.steps.len() != pset.n_steps {
        return Err(TaskGenError::StepCountMismatch {
            recipe_id: recipe.id.clone(),
            expected: pset.n_steps,
            found: recipe.steps.len(),
        });
    }
    let label = choose_label(pset, seed, position);
    let permuted_steps = pset
        .get(label)
        .expect("label drawn in range")
        .apply(&recipe.steps)
        .expect("step count checked");
    Ok(PermClassExample {
        recipe_id: recipe.id.clone(),
        permuted_steps,
        label,
        permset_ref: permset_ref.to_string(),
    })
}

/// Builds the regression example for one recipe at a stream position. Uses
/// the same label-choice procedure as [`perm_class_example`], so equal seeds
/// pick equal permutations.
pub fn emb_reg_example(
    recipe: &Recipe,
    pset: &PermutationSet,
    kind: EmbeddingKind,
    permset_ref: &str,
    seed: u64,
    position: u64,
) -> Result<EmbRegExample, TaskGenError> {
    let base = perm_class_example(recipe, pset, permset_ref, seed, position)?;
    let p = pset.get(base.label).expect("label in range");
    let target: Vec<u32> = match kind {
        EmbeddingKind::Lehmer => lehmer_encode(p).into_iter().map(|v| v as u32).collect(),
        EmbeddingKind::Hamming => hamming_encode(p).into_iter().map(u32::from).collect(),
    };
    Ok(EmbRegExample {
        recipe_id: base.recipe_id,
        permuted_steps: base.permuted_steps,
        label: base.label,
        permset_ref: base.permset_ref,
        target,
        kind,
    })
}

/// Context length K and target count M for skip-clip generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SkipClipParams {
    pub k: usize,
    pub m: usize,
}

impl SkipClipParams {
    pub fn new(k: usize, m: usize) -> Result<Self, TaskGenError> {
        if k < 1 {
            return Err(TaskGenError::InvalidParams("K must be at least 1".into()));
        }
        if m < 2 {
            return Err(TaskGenError::InvalidParams("M must be at least 2".into()));
        }
        Ok(Self { k, m })
    }

    /// A recipe is usable when it has more than K steps and at least M of
    /// them fall after the context.
    pub fn feasible(&self, n_steps: usize) -> bool {
        n_steps > self.k && n_steps - self.k >= self.m
    }
}

/// Builds the skip-clip example for one recipe, or `None` when the recipe is
/// too short for the requested context/target split.
///
/// Target indices are a uniform sample without replacement from
/// `{K+1..=N}`, emitted ascending.
pub fn skip_clip_example(
    recipe: &Recipe,
    params: SkipClipParams,
    seed: u64,
    position: u64,
) -> Option<SkipClipExample> {
    let n = recipe.steps.len();
    if !params.feasible(n) {
        return None;
    }
    let mut rng = position_rng(seed, position);
    let mut indices: Vec<usize> = sample(&mut rng, n - params.k, params.m)
        .into_iter()
        .map(|offset| offset + params.k + 1)
        .collect();
    indices.sort_unstable();
    let targets = indices
        .into_iter()
        .map(|t| SkipClipTarget {
            t,
            text: recipe.steps[t - 1].clone(),
        })
        .collect();
    Some(SkipClipExample {
        recipe_id: recipe.id.clone(),
        context_steps: recipe.steps[..params.k].to_vec(),
        targets,
    })
}

/// Streaming generator over recipes with per-example keyed randomness.
///
/// With `copies > 1` each recipe yields that many consecutive examples; the
/// stream position (and thus the RNG key) advances per example.
pub struct ExampleStream<I, F, T> {
    recipes: I,
    make: F,
    copies: usize,
    position: u64,
    pending: Option<(Recipe, usize)>,
    _marker: std::marker::PhantomData<T>,
}

impl<I, F, T> ExampleStream<I, F, T>
where
    I: Iterator<Item = Recipe>,
    F: FnMut(&Recipe, u64) -> T,
{
    pub fn new(recipes: I, copies: usize, make: F) -> Self {
        Self {
            recipes,
            make,
            copies: copies.max(1),
            position: 0,
            pending: None,
            _marker: std::marker::PhantomData,
        }
    }
}

impl<I, F, T> Iterator for ExampleStream<I, F, T>
where
    I: Iterator<Item = Recipe>,
    F: FnMut(&Recipe, u64) -> T,
{
    type Item = T;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some((recipe, remaining)) = self.pending.take() {
                let item = (self.make)(&recipe, self.position);
                self.position += 1;
                if remaining > 1 {
                    self.pending = Some((recipe, remaining - 1));
                }
                return Some(item);
            }
            let recipe = self.recipes.next()?;
            self.pending = Some((recipe, self.copies));
        }
    }
}

/// Classification examples for every recipe in the stream.
pub fn generate_perm_class<'a, I>(
    recipes: I,
    pset: &'a PermutationSet,
    permset_ref: &'a str,
    seed: u64,
    copies: usize,
) -> impl Iterator<Item = Result<PermClassExample, TaskGenError>> + 'a
where
    I: Iterator<Item = Recipe> + 'a,
{
    ExampleStream::new(recipes, copies, move |recipe, position| {
        perm_class_example(recipe, pset, permset_ref, seed, position)
    })
}

/// Regression examples for every recipe in the stream.
pub fn generate_emb_reg<'a, I>(
    recipes: I,
    pset: &'a PermutationSet,
    kind: EmbeddingKind,
    permset_ref: &'a str,
    seed: u64,
    copies: usize,
) -> impl Iterator<Item = Result<EmbRegExample, TaskGenError>> + 'a
where
    I: Iterator<Item = Recipe> + 'a,
{
    ExampleStream::new(recipes, copies, move |recipe, position| {
        emb_reg_example(recipe, pset, kind, permset_ref, seed, position)
    })
}

/// Skip-clip examples; infeasible recipes come back as `None` so callers can
/// count skips.
pub fn generate_skip_clip<'a, I>(
    recipes: I,
    params: SkipClipParams,
    seed: u64,
    copies: usize,
) -> impl Iterator<Item = Option<SkipClipExample>> + 'a
where
    I: Iterator<Item = Recipe> + 'a,
{
    ExampleStream::new(recipes, copies, move |recipe, position| {
        skip_clip_example(recipe, params, seed, position)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::synthetic_marker_corpus;
    use crate::perm::{generate_max_hamming_set, hamming_decode, lehmer_decode, Permutation};

    fn recipe_with_steps(id: &str, steps: &[&str]) -> Recipe {
        Recipe {
            id: id.into(),
            title: id.into(),
            ingredients: vec![],
            steps: steps.iter().map(|s| s.to_string()).collect(),
            source: "test".into(),
            ingredients_prepended: false,
        }
    }

    fn singleton_set(p: Permutation) -> PermutationSet {
        PermutationSet::from_permutations(vec![p], 0, 1).unwrap()
    }

    #[test]
    fn perm_class_applies_labeled_permutation() {
        let pset = singleton_set(Permutation::new(vec![4, 3, 1, 2]).unwrap());
        let recipe = recipe_with_steps("r", &["s1", "s2", "s3", "s4"]);
        let ex = perm_class_example(&recipe, &pset, "ps.json", 0, 0).unwrap();
        assert_eq!(ex.label, 0);
        assert_eq!(ex.permuted_steps, vec!["s4", "s3", "s1", "s2"]);
        assert_eq!(ex.permset_ref, "ps.json");
    }

    #[test]
    fn identity_only_set_keeps_steps() {
        let pset = singleton_set(Permutation::identity(3).unwrap());
        let recipe = recipe_with_steps("r", &["a", "b", "c"]);
        let ex = perm_class_example(&recipe, &pset, "ps", 9, 4).unwrap();
        assert_eq!(ex.label, 0);
        assert_eq!(ex.permuted_steps, vec!["a", "b", "c"]);
    }

    #[test]
    fn step_count_mismatch_reports_recipe_id() {
        let pset = singleton_set(Permutation::identity(4).unwrap());
        let recipe = recipe_with_steps("short", &["a", "b"]);
        let err = perm_class_example(&recipe, &pset, "ps", 0, 0).unwrap_err();
        assert_eq!(
            err,
            TaskGenError::StepCountMismatch {
                recipe_id: "short".into(),
                expected: 4,
                found: 2,
            }
        );
    }

    #[test]
    fn same_seed_same_stream() {
        let pset = generate_max_hamming_set(6, 10, 3, 720).unwrap();
        let recipes = synthetic_marker_corpus(20, 6, 1);
        let run = |seed| -> Vec<_> {
            generate_perm_class(recipes.clone().into_iter(), &pset, "ps", seed, 1)
                .map(|r| r.unwrap())
                .collect()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn copies_advance_stream_position() {
        let pset = generate_max_hamming_set(6, 10, 3, 720).unwrap();
        let recipes = synthetic_marker_corpus(5, 6, 1);
        let examples: Vec<_> =
            generate_perm_class(recipes.clone().into_iter(), &pset, "ps", 7, 3)
                .map(|r| r.unwrap())
                .collect();
        assert_eq!(examples.len(), 15);
        // copies of one recipe share the id but (almost surely) not all labels
        assert_eq!(examples[0].recipe_id, examples[1].recipe_id);
        let labels: std::collections::HashSet<_> =
            examples.iter().map(|e| e.label).collect();
        assert!(labels.len() > 1);
        // position keying: example k is reproducible in isolation
        let direct = perm_class_example(&recipes[1], &pset, "ps", 7, 4).unwrap();
        assert_eq!(examples[4], direct);
    }

    #[test]
    fn emb_reg_targets_match_codecs() {
        let p = Permutation::new(vec![4, 3, 1, 2]).unwrap();
        let pset = singleton_set(p);
        let recipe = recipe_with_steps("r", &["s1", "s2", "s3", "s4"]);
        let lehmer =
            emb_reg_example(&recipe, &pset, EmbeddingKind::Lehmer, "ps", 0, 0).unwrap();
        assert_eq!(lehmer.target, vec![0, 1, 2, 2]);
        let hamming =
            emb_reg_example(&recipe, &pset, EmbeddingKind::Hamming, "ps", 0, 0).unwrap();
        assert_eq!(
            hamming.target,
            vec![0, 0, 0, 1, 0, 0, 1, 0, 1, 0, 0, 0, 0, 1, 0, 0]
        );
    }

    #[test]
    fn emb_reg_identity_target_is_zero() {
        let pset = singleton_set(Permutation::identity(4).unwrap());
        let recipe = recipe_with_steps("r", &["a", "b", "c", "d"]);
        let ex = emb_reg_example(&recipe, &pset, EmbeddingKind::Lehmer, "ps", 0, 0).unwrap();
        assert_eq!(ex.target, vec![0, 0, 0, 0]);
    }

    #[test]
    fn emb_reg_target_decodes_to_applied_permutation() {
        let pset = generate_max_hamming_set(5, 20, 2, 200).unwrap();
        let recipes = synthetic_marker_corpus(30, 5, 4);
        for (pos, recipe) in recipes.iter().enumerate() {
            let ex = emb_reg_example(
                recipe,
                &pset,
                EmbeddingKind::Hamming,
                "ps",
                11,
                pos as u64,
            )
            .unwrap();
            let bits: Vec<u8> = ex.target.iter().map(|&v| v as u8).collect();
            let decoded = hamming_decode(&bits).unwrap();
            assert_eq!(&decoded, pset.get(ex.label).unwrap());
            assert_eq!(decoded.apply(&recipe.steps).unwrap(), ex.permuted_steps);

            let ex = emb_reg_example(
                recipe,
                &pset,
                EmbeddingKind::Lehmer,
                "ps",
                11,
                pos as u64,
            )
            .unwrap();
            let code: Vec<usize> = ex.target.iter().map(|&v| v as usize).collect();
            assert_eq!(&lehmer_decode(&code).unwrap(), pset.get(ex.label).unwrap());
        }
    }

    #[test]
    fn skip_clip_respects_constraints() {
        let params = SkipClipParams::new(4, 3).unwrap();
        let recipe = recipe_with_steps("r", &["1", "2", "3", "4", "5", "6", "7", "8", "9"]);
        let ex = skip_clip_example(&recipe, params, 2, 0).unwrap();
        assert_eq!(ex.context_steps, vec!["1", "2", "3", "4"]);
        assert_eq!(ex.targets.len(), 3);
        for w in ex.targets.windows(2) {
            assert!(w[0].t < w[1].t);
        }
        for t in &ex.targets {
            assert!(t.t > 4 && t.t <= 9);
            assert_eq!(t.text, recipe.steps[t.t - 1]);
        }
    }

    #[test]
    fn skip_clip_forced_targets_when_exact() {
        let params = SkipClipParams::new(4, 4).unwrap();
        let recipe = recipe_with_steps("r", &["1", "2", "3", "4", "5", "6", "7", "8"]);
        let ex = skip_clip_example(&recipe, params, 0, 0).unwrap();
        let ts: Vec<usize> = ex.targets.iter().map(|t| t.t).collect();
        assert_eq!(ts, vec![5, 6, 7, 8]);
    }

    #[test]
    fn skip_clip_skips_infeasible() {
        let params = SkipClipParams::new(4, 4).unwrap();
        let recipe = recipe_with_steps("r", &["1", "2", "3", "4", "5"]);
        assert!(skip_clip_example(&recipe, params, 0, 0).is_none());

        let recipes = vec![
            recipe_with_steps("a", &["1", "2", "3", "4", "5"]),
            recipe_with_steps("b", &["1", "2", "3", "4", "5", "6", "7", "8"]),
        ];
        let results: Vec<_> =
            generate_skip_clip(recipes.into_iter(), params, 0, 1).collect();
        let skipped = results.iter().filter(|r| r.is_none()).count();
        assert_eq!(skipped, 1);
        assert_eq!(results.len(), 2);
    }

    #[test]
    fn skip_clip_param_validation() {
        assert!(SkipClipParams::new(0, 2).is_err());
        assert!(SkipClipParams::new(4, 1).is_err());
        assert!(SkipClipParams::new(1, 2).is_ok());
    }

    #[test]
    fn label_recovery_oracle() {
        // With distinct step texts the applied permutation is recoverable by
        // matching permuted steps back to original positions.
        let pset = generate_max_hamming_set(6, 30, 8, 720).unwrap();
        let recipes = synthetic_marker_corpus(50, 6, 21);
        for (pos, recipe) in recipes.iter().enumerate() {
            let ex = perm_class_example(recipe, &pset, "ps", 13, pos as u64).unwrap();
            let recovered: Vec<usize> = ex
                .permuted_steps
                .iter()
                .map(|s| recipe.steps.iter().position(|o| o == s).unwrap() + 1)
                .collect();
            let recovered = Permutation::new(recovered).unwrap();
            assert_eq!(&recovered, pset.get(ex.label).unwrap());
        }
    }

    #[test]
    fn label_distribution_is_near_uniform() {
        // 10,000 draws over 100 labels: every count within 3σ of uniform.
        let pset = generate_max_hamming_set(6, 100, 9, 720).unwrap();
        let recipes = synthetic_marker_corpus(10_000, 6, 31);
        let mut counts = vec![0usize; pset.len()];
        for (pos, recipe) in recipes.iter().enumerate() {
            let ex = perm_class_example(recipe, &pset, "ps", 17, pos as u64).unwrap();
            counts[ex.label] += 1;
        }
        let n = 10_000f64;
        let p = 1.0 / pset.len() as f64;
        let sigma = (n * p * (1.0 - p)).sqrt();
        let mean = n * p;
        for (label, &count) in counts.iter().enumerate() {
            let dev = (count as f64 - mean).abs();
            assert!(
                dev <= 3.0 * sigma,
                "label {label} count {count} deviates {dev:.1} (3σ = {:.1})",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn jsonl_shapes() {
        let pset = singleton_set(Permutation::new(vec![2, 1]).unwrap());
        let recipe = recipe_with_steps("r", &["a", "b"]);
        let ex = perm_class_example(&recipe, &pset, "ps.json", 0, 0).unwrap();
        let line = serde_json::to_string(&ex).unwrap();
        assert_eq!(
            line,
            r#"{"recipe_id":"r","permuted_steps":["b","a"],"label":0,"permset_ref":"ps.json"}"#
        );

        let params = SkipClipParams::new(1, 2).unwrap();
        let recipe = recipe_with_steps("r", &["a", "b", "c"]);
        let ex = skip_clip_example(&recipe, params, 0, 0).unwrap();
        let line = serde_json::to_string(&ex).unwrap();
        assert_eq!(
            line,
            r#"{"recipe_id":"r","context_steps":["a"],"targets":[{"t":2,"text":"b"},{"t":3,"text":"c"}]}"#
        );
    }
}
