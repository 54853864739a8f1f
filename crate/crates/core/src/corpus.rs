//! Recipe corpus ingestion and preparation.
//!
//! Recipes arrive as JSONL, one object per line with fields
//! `{"id", "title", "ingredients", "steps", "source"}` plus an optional
//! `"ingredients_prepended"` marker. Ingestion streams the file, validates
//! each line, and skips malformed lines with their line numbers; transforms
//! are pure per-record functions or iterator adapters so pipelines never
//! hold a corpus in memory.

use std::collections::BTreeMap;
use std::io::{self, BufRead};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

fn is_false(b: &bool) -> bool {
    !b
}

/// One recipe: id, title, ingredient list, and ordered step texts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recipe {
    pub id: String,
    pub title: String,
    pub ingredients: Vec<String>,
    pub steps: Vec<String>,
    #[serde(default)]
    pub source: String,
    /// Set once the ingredient sentence has been inserted as the first step,
    /// so the augmentation is idempotent.
    #[serde(default, skip_serializing_if = "is_false")]
    pub ingredients_prepended: bool,
}

impl Recipe {
    /// Steps must be non-empty and no step may be whitespace-only.
    pub fn validate(&self) -> Result<(), String> {
        if self.steps.is_empty() {
            return Err("recipe has no steps".into());
        }
        if let Some(idx) = self.steps.iter().position(|s| s.trim().is_empty()) {
            return Err(format!("step {} is whitespace-only", idx + 1));
        }
        Ok(())
    }

    pub fn to_jsonl_line(&self) -> String {
        serde_json::to_string(self).expect("recipe serializes")
    }
}

/// A line that failed parsing or validation during ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedLine {
    /// 1-indexed line number in the input file.
    pub line: usize,
    pub reason: String,
}

/// Streaming JSONL recipe reader.
///
/// Yields validated recipes in file order. Malformed lines are recorded in
/// [`RecipeReader::skipped`] and skipped rather than ending the stream; only
/// I/O errors are fatal. Recipes without a `source` field get `source_tag`.
pub struct RecipeReader<R: BufRead> {
    lines: io::Lines<R>,
    line_no: usize,
    source_tag: String,
    skipped: Vec<SkippedLine>,
}

impl<R: BufRead> RecipeReader<R> {
    pub fn new(reader: R, source_tag: &str) -> Self {
        Self {
            lines: reader.lines(),
            line_no: 0,
            source_tag: source_tag.to_string(),
            skipped: Vec::new(),
        }
    }

    /// Malformed lines seen so far, with their 1-indexed line numbers.
    pub fn skipped(&self) -> &[SkippedLine] {
        &self.skipped
    }

    pub fn skipped_count(&self) -> usize {
        self.skipped.len()
    }
}

impl<R: BufRead> Iterator for RecipeReader<R> {
    type Item = io::Result<Recipe>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e)),
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<Recipe>(&line) {
                Ok(mut recipe) => {
                    if let Err(reason) = recipe.validate() {
                        self.skipped.push(SkippedLine {
                            line: self.line_no,
                            reason,
                        });
                        continue;
                    }
                    if recipe.source.is_empty() {
                        recipe.source = self.source_tag.clone();
                    }
                    return Some(Ok(recipe));
                }
                Err(e) => {
                    self.skipped.push(SkippedLine {
                        line: self.line_no,
                        reason: e.to_string(),
                    });
                }
            }
        }
    }
}

/// Opens `path` as a streaming recipe reader.
pub fn load_corpus(
    path: &std::path::Path,
    source_tag: &str,
) -> io::Result<RecipeReader<io::BufReader<std::fs::File>>> {
    let file = std::fs::File::open(path)?;
    Ok(RecipeReader::new(io::BufReader::new(file), source_tag))
}

/// Inserts the sentence `Ingredients: a, b, c.` as a new first step.
///
/// No-op when the recipe has no ingredients or was already augmented.
pub fn prepend_ingredient_step(mut recipe: Recipe) -> Recipe {
    if recipe.ingredients_prepended || recipe.ingredients.is_empty() {
        return recipe;
    }
    let sentence = format!("Ingredients: {}.", recipe.ingredients.join(", "));
    recipe.steps.insert(0, sentence);
    recipe.ingredients_prepended = true;
    recipe
}

/// Keeps recipes with strictly more than `min_steps_exclusive` steps.
pub fn filter_min_steps<I>(recipes: I, min_steps_exclusive: usize) -> impl Iterator<Item = Recipe>
where
    I: Iterator<Item = Recipe>,
{
    recipes.filter(move |r| r.steps.len() > min_steps_exclusive)
}

/// Keeps exactly the recipes whose step count equals `n_steps`.
pub fn select_fixed_step_subset<I>(recipes: I, n_steps: usize) -> impl Iterator<Item = Recipe>
where
    I: Iterator<Item = Recipe>,
{
    recipes.filter(move |r| r.steps.len() == n_steps)
}

/// Corpus summary: counts use whitespace tokenization and the histogram is
/// keyed by step count as observed in the stream.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub recipe_count: u64,
    pub step_word_count: u64,
    pub ingredient_word_count: u64,
    pub step_count_histogram: BTreeMap<usize, u64>,
}

impl CorpusStats {
    pub fn observe(&mut self, recipe: &Recipe) {
        self.recipe_count += 1;
        self.step_word_count += recipe
            .steps
            .iter()
            .map(|s| s.split_whitespace().count() as u64)
            .sum::<u64>();
        self.ingredient_word_count += recipe
            .ingredients
            .iter()
            .map(|s| s.split_whitespace().count() as u64)
            .sum::<u64>();
        *self
            .step_count_histogram
            .entry(recipe.steps.len())
            .or_insert(0) += 1;
    }
}

/// Folds a recipe stream into summary statistics.
pub fn compute_stats<I>(recipes: I) -> CorpusStats
where
    I: IntoIterator,
    I::Item: std::borrow::Borrow<Recipe>,
{
    let mut stats = CorpusStats::default();
    for recipe in recipes {
        stats.observe(std::borrow::Borrow::borrow(&recipe));
    }
    stats
}

const FILLER_VOCAB: &[&str] = &[
    "mix", "stir", "whisk", "fold", "pour", "bake", "simmer", "chop", "dice", "grate", "season",
    "rest", "cool", "heat", "combine", "drain", "knead", "spread", "slice", "serve", "cover",
    "boil", "roast", "garnish",
];

const INGREDIENT_VOCAB: &[&str] = &[
    "flour", "water", "salt", "sugar", "butter", "eggs", "milk", "oil", "onion", "garlic",
    "tomato", "basil", "rice", "beans", "cheese", "pepper",
];

/// Generates a deterministic corpus of `n_recipes` recipes with exactly
/// `n_steps` steps each. Step `j` embeds the token `posmark{j}` followed by
/// filler words, so the original position of every step is recoverable from
/// its text — the fixture corpus for training sanity checks and pipeline
/// demos.
pub fn synthetic_marker_corpus(n_recipes: usize, n_steps: usize, seed: u64) -> Vec<Recipe> {
    let mut recipes = Vec::with_capacity(n_recipes);
    for idx in 0..n_recipes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(idx as u64);
        let steps = (1..=n_steps)
            .map(|j| {
                let a = FILLER_VOCAB[rng.random_range(0..FILLER_VOCAB.len())];
                let b = FILLER_VOCAB[rng.random_range(0..FILLER_VOCAB.len())];
                let c = FILLER_VOCAB[rng.random_range(0..FILLER_VOCAB.len())];
                format!("posmark{j} {a} {b} {c}")
            })
            .collect();
        let ingredients = vec![
            INGREDIENT_VOCAB[rng.random_range(0..INGREDIENT_VOCAB.len())].to_string(),
            INGREDIENT_VOCAB[rng.random_range(0..INGREDIENT_VOCAB.len())].to_string(),
        ];
        recipes.push(Recipe {
            id: format!("syn-{idx:05}"),
            title: format!("Synthetic recipe {idx}"),
            ingredients,
            steps,
            source: "synthetic".to_string(),
            ingredients_prepended: false,
        });
    }
    recipes
}
